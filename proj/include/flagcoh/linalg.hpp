#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "flagcoh/fp.hpp"

namespace flagcoh {

// A sparse row vector over F_p: (column, value) pairs, strictly increasing
// columns, all values nonzero.
using SparseRow = std::vector<std::pair<int32_t, uint32_t>>;

inline bool row_is_normalized(const SparseRow& r, const PrimeField& F) {
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i].second == 0 || r[i].second >= F.p) return false;
    if (i > 0 && r[i - 1].first >= r[i].first) return false;
  }
  return true;
}

// dst := a + c * b, all rows sorted.
inline SparseRow row_axpy(const PrimeField& F, const SparseRow& a, uint32_t c,
                          const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      out.push_back(a[i++]);
    } else if (a[i].first > b[j].first) {
      uint32_t v = F.mul(c, b[j].second);
      if (v) out.emplace_back(b[j].first, v);
      ++j;
    } else {
      uint32_t v = F.add(a[i].second, F.mul(c, b[j].second));
      if (v) out.emplace_back(a[i].first, v);
      ++i;
      ++j;
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) {
    uint32_t v = F.mul(c, b[j].second);
    if (v) out.emplace_back(b[j].first, v);
    ++j;
  }
  return out;
}

inline SparseRow row_scale(const PrimeField& F, const SparseRow& a, uint32_t c) {
  SparseRow out;
  out.reserve(a.size());
  for (const auto& [col, val] : a) {
    uint32_t v = F.mul(val, c);
    if (v) out.emplace_back(col, v);
  }
  return out;
}

// Incremental row-reduction to reduced row echelon form.  Rows are inserted
// one at a time with forward elimination; finalize() performs the single
// back-substitution pass that makes the basis fully reduced.  The RREF basis
// of a row span is unique, so the finalized object is canonical: it does not
// depend on insertion order.
class Rref {
 public:
  Rref(const PrimeField& F, int32_t ncols) : F_(F), pivot_row_of_col_(ncols, -1) {}

  // Forward-reduces `row` against the current basis.  Returns true if the row
  // added a new pivot (was independent).
  bool add_row(SparseRow row) {
    assert(!finalized_);
    while (!row.empty()) {
      int32_t lead = row.front().first;
      int32_t r = pivot_row_of_col_[lead];
      if (r < 0) {
        // New pivot: normalize leading coefficient to 1.
        uint32_t lc = row.front().second;
        if (lc != 1) row = row_scale(F_, row, F_.inv(lc));
        pivot_row_of_col_[lead] = static_cast<int32_t>(rows_.size());
        pivot_cols_.push_back(lead);
        rows_.push_back(std::move(row));
        return true;
      }
      row = row_axpy(F_, row, F_.neg(row.front().second), rows_[r]);
    }
    return false;
  }

  // Back-substitution: eliminate every pivot column from all other rows.
  void finalize() {
    if (finalized_) return;
    std::sort(pivot_cols_.begin(), pivot_cols_.end());
    // Process pivots right to left so each row needs a single pass.
    for (auto it = pivot_cols_.rbegin(); it != pivot_cols_.rend(); ++it) {
      int32_t pc = *it;
      const int32_t pr = pivot_row_of_col_[pc];
      for (int32_t r = 0; r < static_cast<int32_t>(rows_.size()); ++r) {
        if (r == pr) continue;
        const SparseRow& row = rows_[r];
        auto pos = std::lower_bound(
            row.begin(), row.end(), pc,
            [](const std::pair<int32_t, uint32_t>& e, int32_t c) { return e.first < c; });
        if (pos != row.end() && pos->first == pc)
          rows_[r] = row_axpy(F_, row, F_.neg(pos->second), rows_[pr]);
      }
    }
    finalized_ = true;
  }

  // Fully reduces `v` modulo the (finalized) row span.  The residue is
  // supported on non-pivot columns only and is zero iff v lies in the span.
  SparseRow reduce(SparseRow v) const {
    assert(finalized_);
    SparseRow residue;
    while (!v.empty()) {
      auto [col, val] = v.front();
      int32_t r = pivot_row_of_col_[col];
      if (r < 0) {
        // Free column: rows in RREF cannot reintroduce columns left of their
        // pivot, so this entry is final.
        residue.emplace_back(col, val);
        v.erase(v.begin());
      } else {
        v = row_axpy(F_, v, F_.neg(val), rows_[r]);
      }
    }
    return residue;
  }

  int64_t rank() const { return static_cast<int64_t>(rows_.size()); }
  bool finalized() const { return finalized_; }
  int32_t ncols() const { return static_cast<int32_t>(pivot_row_of_col_.size()); }

  // Sorted after finalize().
  const std::vector<int32_t>& pivot_cols() const { return pivot_cols_; }

  std::vector<int32_t> free_cols() const {
    assert(finalized_);
    std::vector<int32_t> out;
    size_t k = 0;
    for (int32_t c = 0; c < ncols(); ++c) {
      if (k < pivot_cols_.size() && pivot_cols_[k] == c) {
        ++k;
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  const SparseRow& row_with_pivot(int32_t col) const {
    assert(pivot_row_of_col_[col] >= 0);
    return rows_[pivot_row_of_col_[col]];
  }

  const PrimeField& field() const { return F_; }

 private:
  PrimeField F_;
  std::vector<SparseRow> rows_;
  std::vector<int32_t> pivot_cols_;
  std::vector<int32_t> pivot_row_of_col_;
  bool finalized_ = false;
};

// Rank of the span of `rows`, together with the set of committed pivot
// columns.
//
// Sparse Gaussian elimination with Markowitz-style pivoting: always pivot on
// a shortest live row, at its entry whose column meets the fewest live rows,
// and eliminate that column eagerly.  Incidence-like matrices (a handful of
// unit entries per row) stay sparse under this order, where insertion-order
// echelon reduction lets fill-in snowball.
//
// The pivot columns matter for chain complexes: when these rows are one
// differential d with d' d = 0 (rows as domain coordinates, d' the next
// differential), each committed pivot row v lies in ker d' and has entry 1 at
// its pivot column t with the rest of its support off the earlier-committed
// pivots, so downward induction over commit time writes every row of d'
// indexed by a pivot column of d as a combination of the non-pivot rows.
// Deleting those rows of d' therefore preserves its row span and rank, and
// removes exactly the dependent rows whose reduction to zero is the expensive
// part of the elimination.
struct RankResult {
  int64_t rank = 0;
  std::vector<char> pivot_cols;  // size ncols, 1 where a pivot was committed
};

inline RankResult rank_and_pivots(const PrimeField& F, int32_t ncols,
                                  std::vector<SparseRow> rows) {
  RankResult out;
  out.pivot_cols.assign(ncols, 0);
  const int32_t nrows = static_cast<int32_t>(rows.size());
  std::vector<int32_t> colcnt(ncols, 0);
  size_t nnz = 0;
  int32_t maxlen = 0;
  for (const auto& r : rows) {
    nnz += r.size();
    maxlen = std::max(maxlen, static_cast<int32_t>(r.size()));
    for (const auto& [c, v] : r) ++colcnt[c];
  }
  if (nnz == 0) return out;

  // Rows currently meeting each column.  Entries go stale when elimination
  // cancels the coefficient; they are re-checked against the row on use.
  std::vector<std::vector<int32_t>> colrows(ncols);
  for (int32_t i = 0; i < nrows; ++i)
    for (const auto& [c, v] : rows[i]) colrows[c].push_back(i);

  // Bucket queue over row support sizes (lazy deletion: entries are
  // re-validated against the row's current size when popped).
  const int32_t nbuckets = maxlen + 1;
  std::vector<std::vector<int32_t>> bucket(nbuckets + 1);
  auto push = [&](int32_t i) {
    bucket[std::min<int32_t>(static_cast<int32_t>(rows[i].size()), nbuckets)].push_back(i);
  };
  for (int32_t i = 0; i < nrows; ++i)
    if (!rows[i].empty()) push(i);

  std::vector<char> used(nrows, 0);
  SparseRow scratch;
  std::vector<std::vector<uint32_t>> scaled(F.p);
  for (int32_t cur = 1; cur <= nbuckets; ++cur) {
    while (!bucket[cur].empty()) {
      const int32_t i = bucket[cur].back();
      bucket[cur].pop_back();
      if (used[i] || rows[i].empty()) continue;
      const int32_t sz = std::min<int32_t>(static_cast<int32_t>(rows[i].size()), nbuckets);
      if (sz != cur) {
        if (sz < cur) cur = sz;  // only happens via lazy entries; stay exact
        bucket[sz].push_back(i);
        continue;
      }

      int32_t pc = -1;
      int32_t best = INT32_MAX;
      uint32_t pv = 0;
      for (const auto& [c, v] : rows[i])
        if (colcnt[c] < best) {
          best = colcnt[c];
          pc = c;
          pv = v;
        }
      const uint32_t inv = F.inv(pv);
      if (inv != 1)
        for (auto& [c, v] : rows[i]) v = F.mul(v, inv);

      used[i] = 1;
      ++out.rank;
      out.pivot_cols[pc] = 1;
      const SparseRow& prow = rows[i];

      // Pivot-row values pre-scaled by each possible coefficient, built on
      // first use, so the merge below runs without modular multiplications.
      for (auto& sc : scaled) sc.clear();
      const uint32_t p = F.p;

      for (const int32_t j : colrows[pc]) {
        if (j == i || used[j] || rows[j].empty()) continue;
        const SparseRow& a = rows[j];
        // Merge a - a[pc] * prow into scratch, maintaining column occupancy
        // counts inline; skip rows whose pc entry is stale (cancelled).
        size_t ai = 0, bi = 0;
        uint32_t coef = 0;
        {
          auto it = std::lower_bound(
              a.begin(), a.end(), pc,
              [](const std::pair<int32_t, uint32_t>& e, int32_t c) { return e.first < c; });
          if (it == a.end() || it->first != pc) continue;
          coef = F.neg(it->second);
        }
        std::vector<uint32_t>& sc = scaled[coef];
        if (sc.empty()) {
          sc.reserve(prow.size());
          for (const auto& [c, v] : prow) sc.push_back(F.mul(coef, v));
        }
        scratch.clear();
        if (scratch.capacity() < a.size() + prow.size())
          scratch.reserve(a.size() + prow.size());
        while (ai < a.size() && bi < prow.size()) {
          const int32_t ca = a[ai].first;
          const int32_t cb = prow[bi].first;
          if (ca < cb) {
            scratch.push_back(a[ai++]);
          } else if (cb < ca) {
            scratch.emplace_back(cb, sc[bi]);
            ++colcnt[cb];
            colrows[cb].push_back(j);
            ++bi;
          } else {
            uint32_t v = a[ai].second + sc[bi];
            v -= (v >= p) ? p : 0;
            if (v)
              scratch.emplace_back(ca, v);
            else
              --colcnt[ca];
            ++ai;
            ++bi;
          }
        }
        while (ai < a.size()) scratch.push_back(a[ai++]);
        while (bi < prow.size()) {
          const int32_t cb = prow[bi].first;
          scratch.emplace_back(cb, sc[bi]);
          ++colcnt[cb];
          colrows[cb].push_back(j);
          ++bi;
        }
        rows[j].swap(scratch);
        if (!rows[j].empty()) {
          const int32_t nsz =
              std::min<int32_t>(static_cast<int32_t>(rows[j].size()), nbuckets);
          bucket[nsz].push_back(j);
          if (nsz < cur) cur = nsz;
        }
      }

      for (const auto& [c, v] : rows[i]) --colcnt[c];
      SparseRow().swap(rows[i]);
      std::vector<int32_t>().swap(colrows[pc]);
    }
  }
  return out;
}

inline int64_t rank_of(const PrimeField& F, int32_t ncols, std::vector<SparseRow> rows) {
  return rank_and_pivots(F, ncols, std::move(rows)).rank;
}

// Basis of the right kernel {v : M v^T = 0 for every row M of `rows`},
// i.e. of the kernel of the matrix whose rows are `rows`.
//
// One basis vector per free column f: it has coefficient 1 at f, zero at all
// other free columns, and -R[f] at the pivot column of each RREF row R.  The
// coordinates of any kernel vector in this basis can therefore be read off
// at the free columns.
struct KernelBasis {
  std::vector<SparseRow> vectors;   // one per free column, same order
  std::vector<int32_t> free_cols;   // sorted
};

inline KernelBasis kernel_basis(const PrimeField& F, int32_t ncols,
                                std::vector<SparseRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const SparseRow& a, const SparseRow& b) { return a.size() < b.size(); });
  Rref rr(F, ncols);
  for (auto& r : rows) rr.add_row(std::move(r));
  rr.finalize();

  KernelBasis kb;
  kb.free_cols = rr.free_cols();
  kb.vectors.reserve(kb.free_cols.size());
  const auto& pivots = rr.pivot_cols();
  for (int32_t f : kb.free_cols) {
    SparseRow v;
    v.emplace_back(f, 1);
    for (int32_t pc : pivots) {
      const SparseRow& R = rr.row_with_pivot(pc);
      auto pos = std::lower_bound(
          R.begin(), R.end(), f,
          [](const std::pair<int32_t, uint32_t>& e, int32_t c) { return e.first < c; });
      if (pos != R.end() && pos->first == f) v.emplace_back(pc, F.neg(pos->second));
    }
    std::sort(v.begin(), v.end());
    kb.vectors.push_back(std::move(v));
  }
  return kb;
}

// Applies a matrix (given as rows) to a column vector: (M v)_r = <rows[r], v>.
inline SparseRow matrix_apply(const PrimeField& F, const std::vector<SparseRow>& rows,
                              const SparseRow& v) {
  SparseRow out;
  for (int32_t r = 0; r < static_cast<int32_t>(rows.size()); ++r) {
    uint64_t acc = 0;
    const SparseRow& row = rows[r];
    size_t i = 0, j = 0;
    while (i < row.size() && j < v.size()) {
      if (row[i].first < v[j].first) {
        ++i;
      } else if (row[i].first > v[j].first) {
        ++j;
      } else {
        acc += static_cast<uint64_t>(row[i].second) * v[j].second % F.p;
        ++i;
        ++j;
      }
    }
    uint32_t val = static_cast<uint32_t>(acc % F.p);
    if (val) out.emplace_back(r, val);
  }
  return out;
}

}  // namespace flagcoh
