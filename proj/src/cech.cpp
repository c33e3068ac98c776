#include "flagcoh/cech.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <utility>

namespace flagcoh {

namespace {

bool is_odd_prime(uint32_t p) {
  if (p < 3 || p % 2 == 0) return false;
  for (uint32_t d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

void guard_cells(int dx, int dp, int64_t limit) {
  if (dx < 0 || dp < 0) return;
  if (euler_characteristic({dx, dp}) > limit)
    throw ResourceLimit("graded piece of bidegree (" + std::to_string(dx) + "," +
                        std::to_string(dp) + ") exceeds the cell budget");
}

// Is the (dx, dp) piece of the ambient coordinate ring possibly nonzero in
// character (e1, e2)?  Exact for the ambient ring; a slight overcount for the
// quotient, which only costs a wasted (and fast) lookup.
bool char_feasible(int dx, int dp, int64_t e1, int64_t e2) {
  if ((((e1 + e2 - dx) % 2) + 2) % 2 != 0) return false;
  const int64_t glo = std::max<int64_t>(-dx, e1 - dp);
  const int64_t ghi = std::min<int64_t>(dx, e1 + dp);
  for (int64_t g1 = glo; g1 <= ghi; ++g1) {
    const int64_t rem = dx - (g1 < 0 ? -g1 : g1);
    int64_t lo = std::max(-rem, e2 - dp);
    const int64_t hi = std::min(rem, e2 + dp);
    if (lo > hi) continue;
    const int64_t want = (((dx - g1) % 2) + 2) % 2;
    if ((((lo % 2) + 2) % 2) != want) ++lo;
    if (lo <= hi) return true;
  }
  return false;
}

struct SubsetEdge {
  int chart;
  int32_t target;  // index into the next level
  int sign;
};

struct SubsetInfo {
  std::vector<int> members;
  EpsPair tau{0, 0};
  std::vector<SubsetEdge> edges;
};

// All subsets of the eight charts of size 1..6, with the inclusion edges and
// alternating signs of the cover complex.
struct SubsetTable {
  std::array<std::vector<SubsetInfo>, 6> levels;

  static const SubsetTable& instance() {
    static const SubsetTable t = build();
    return t;
  }

 private:
  static SubsetTable build() {
    const ChartModel& cm = ChartModel::instance();
    SubsetTable t;
    std::array<std::vector<uint32_t>, 6> masks;
    std::map<uint32_t, int32_t> index_of;
    for (uint32_t mask = 1; mask < 256; ++mask) {
      int pc = __builtin_popcount(mask);
      if (pc <= 6) masks[pc - 1].push_back(mask);
    }
    for (int r = 0; r < 6; ++r)
      for (int32_t i = 0; i < static_cast<int32_t>(masks[r].size()); ++i)
        index_of[masks[r][i]] = i;
    for (int r = 0; r < 6; ++r) {
      t.levels[r].reserve(masks[r].size());
      for (uint32_t mask : masks[r]) {
        SubsetInfo info;
        for (int c = 0; c < 8; ++c)
          if (mask & (1u << c)) {
            info.members.push_back(c);
            info.tau = info.tau + cm.chart_character(c);
          }
        if (r + 1 < 6) {
          for (int c = 0; c < 8; ++c) {
            if (mask & (1u << c)) continue;
            const int below = __builtin_popcount(mask & ((1u << c) - 1));
            info.edges.push_back(
                {c, index_of.at(mask | (1u << c)), (below % 2 == 0) ? 1 : -1});
          }
        }
        t.levels[r].push_back(std::move(info));
      }
    }
    return t;
  }
};

// Sections of the sheaf over one chart intersection in one character: the
// concatenated numerator pieces, and for kernel presentations the kernel
// basis of the constraint matrix in those coordinates.
struct TermData {
  std::vector<QuotientPiece*> pieces;  // per source summand; null when empty
  std::vector<int32_t> offsets;        // ambient column offset per summand
  int32_t ambient = 0;
  bool kernel = false;
  std::vector<SparseRow> kb_vectors;
  std::vector<int32_t> kb_free;
  int32_t dim = 0;
};

TermData build_term(QuotientRing& ring, const PrimeField& F, const CompiledSheaf& sh,
                    int s, const EpsPair& base, int K, const EngineConfig& cfg) {
  TermData td;
  const int64_t shift = static_cast<int64_t>(K) * s;
  td.pieces.reserve(sh.src.size());
  td.offsets.reserve(sh.src.size());
  for (const auto& sm : sh.src) {
    const int dx = static_cast<int>(sm.deg.a + shift);
    const int dp = static_cast<int>(sm.deg.b + shift);
    td.offsets.push_back(td.ambient);
    QuotientPiece* piece = nullptr;
    if (dx >= 0 && dp >= 0) {
      guard_cells(dx, dp, cfg.max_piece_cells);
      piece = &ring.piece(dx, dp, base + sm.off);
      td.ambient += static_cast<int32_t>(piece->dim());
    }
    td.pieces.push_back(piece);
  }
  if (sh.is_direct_sum()) {
    td.dim = td.ambient;
    return td;
  }
  td.kernel = true;
  if (td.ambient == 0) return td;

  std::vector<QuotientPiece*> tpieces;
  std::vector<int32_t> toff;
  int32_t tambient = 0;
  tpieces.reserve(sh.tgt.size());
  toff.reserve(sh.tgt.size());
  for (const auto& sm : sh.tgt) {
    const int dx = static_cast<int>(sm.deg.a + shift);
    const int dp = static_cast<int>(sm.deg.b + shift);
    toff.push_back(tambient);
    QuotientPiece* piece = nullptr;
    if (dx >= 0 && dp >= 0) {
      guard_cells(dx, dp, cfg.max_piece_cells);
      piece = &ring.piece(dx, dp, base + sm.off);
      tambient += static_cast<int32_t>(piece->dim());
    }
    tpieces.push_back(piece);
  }

  std::vector<SparseRow> rows(tambient);
  for (const auto& e : sh.entries) {
    QuotientPiece* sp = td.pieces[e.j];
    QuotientPiece* tp = tpieces[e.l];
    if (!sp || !tp || sp->dim() == 0 || tp->dim() == 0) continue;
    const uint32_t c = F.reduce(e.coef);
    if (c == 0) continue;
    const int32_t col0 = td.offsets[e.j];
    for (int32_t local = 0; local < static_cast<int32_t>(sp->dim()); ++local) {
      const SparseRow& coords = tp->nf_coords(monomial_mul(sp->basis()[local], e.mono));
      for (const auto& [tc, tv] : coords)
        rows[toff[e.l] + tc].emplace_back(col0 + local, F.mul(c, tv));
    }
  }
  for (auto& row : rows) std::sort(row.begin(), row.end());
  KernelBasis kb = kernel_basis(F, td.ambient, std::move(rows));
  td.kb_vectors = std::move(kb.vectors);
  td.kb_free = std::move(kb.free_cols);
  td.dim = static_cast<int32_t>(td.kb_vectors.size());
  return td;
}

struct LevelView {
  std::vector<const TermData*> terms;
  std::vector<int32_t> offsets;
  int32_t total = 0;
};

}  // namespace

CompiledSheaf CompiledSheaf::line(const Weight& w) {
  CompiledSheaf s;
  s.src.push_back({w, EpsPair{0, 0}});
  s.fiber_rank = 1;
  s.chi_dec.emplace_back(w, 1);
  return s;
}

int64_t CompiledSheaf::expected_chi() const {
  int64_t total = 0;
  for (const auto& [w, mult] : chi_dec) total += mult * euler_characteristic(w);
  return total;
}

void CompiledSheaf::validate() const {
  if (src.empty()) throw UnsupportedExpression("sheaf presentation has no summands");
  if (chi_dec.empty())
    throw UnsupportedExpression("sheaf presentation is missing Euler characteristic data");
  for (const auto& e : entries) {
    if (e.l < 0 || e.l >= static_cast<int32_t>(tgt.size()) || e.j < 0 ||
        e.j >= static_cast<int32_t>(src.size()))
      throw UnsupportedExpression("matrix entry indexes a missing summand");
    if (e.coef == 0) throw UnsupportedExpression("matrix entry has zero coefficient");
    const auto [mx, mp] = monomial_bidegree(e.mono);
    const Weight got{src[e.j].deg.a + mx, src[e.j].deg.b + mp};
    if (!(got == tgt[e.l].deg))
      throw UnsupportedExpression("matrix entry violates the summand degrees");
    if (!(monomial_character(e.mono) + src[e.j].off == tgt[e.l].off))
      throw UnsupportedExpression("matrix entry violates the summand characters");
  }
}

CechEngine::CechEngine(uint32_t p, EngineConfig cfg) : p_(p), cfg_(cfg), F_{p} {
  if (!is_odd_prime(p)) throw ModelError("coefficient prime must be an odd prime");
  if (cfg_.k_start < 0 || cfg_.k_step <= 0 || cfg_.k_max < cfg_.k_start)
    throw ModelError("invalid truncation schedule");
}

CechEngine::MuResult CechEngine::run_mu(const CompiledSheaf& sheaf, int K,
                                        const EpsPair& mu) {
  const auto t0 = std::chrono::steady_clock::now();
  QuotientRing& ring = QuotientRing::for_prime(p_);
  const SubsetTable& st = SubsetTable::instance();

  std::map<std::pair<int, EpsPair>, TermData> term_cache;
  std::array<LevelView, 6> lv;
  for (int r = 0; r < 6; ++r) {
    const int s = r + 1;
    lv[r].terms.reserve(st.levels[r].size());
    lv[r].offsets.reserve(st.levels[r].size());
    for (const SubsetInfo& S : st.levels[r]) {
      const EpsPair base = mu + S.tau * static_cast<int64_t>(K);
      const auto key = std::make_pair(s, base);
      auto it = term_cache.find(key);
      if (it == term_cache.end())
        it = term_cache.emplace(key, build_term(ring, F_, sheaf, s, base, K, cfg_)).first;
      lv[r].offsets.push_back(lv[r].total);
      lv[r].terms.push_back(&it->second);
      lv[r].total += it->second.dim;
    }
  }

  MuResult res;
  for (int r = 0; r < 6; ++r) res.cols += lv[r].total;
  if (res.cols == 0) return res;

  std::array<std::vector<SparseRow>, 5> diff;
  std::vector<uint32_t> dense;
  std::vector<int32_t> touched;
  for (int r = 0; r < 5; ++r) {
    diff[r].assign(lv[r].total, SparseRow{});
    if (lv[r].total == 0 || lv[r + 1].total == 0) continue;
    for (size_t si = 0; si < st.levels[r].size(); ++si) {
      const SubsetInfo& S = st.levels[r][si];
      const TermData& td = *lv[r].terms[si];
      if (td.dim == 0) continue;
      const int32_t dom_off = lv[r].offsets[si];
      for (const SubsetEdge& e : S.edges) {
        const TermData& ttd = *lv[r + 1].terms[e.target];
        const int32_t tgt_off = lv[r + 1].offsets[e.target];
        if (ttd.dim == 0 && !td.kernel) continue;
        if (!td.kernel) {
          for (size_t j = 0; j < sheaf.src.size(); ++j) {
            QuotientPiece* piece = td.pieces[j];
            if (!piece || piece->dim() == 0) continue;
            QuotientPiece* tpiece = ttd.pieces[j];
            if (!tpiece || tpiece->dim() == 0) continue;
            const auto& mm =
                ring.mult_map(piece->dx(), piece->dp(), piece->chi(), e.chart, K);
            for (int32_t local = 0; local < static_cast<int32_t>(piece->dim()); ++local) {
              const SparseRow& out = mm[local];
              if (out.empty()) continue;
              SparseRow& row = diff[r][dom_off + td.offsets[j] + local];
              for (const auto& [tc, tv] : out)
                row.emplace_back(tgt_off + ttd.offsets[j] + tc,
                                 e.sign > 0 ? tv : F_.neg(tv));
            }
          }
        } else {
          if (ttd.ambient == 0) continue;
          if (ttd.dim == 0 && !cfg_.check_kernel_coords) continue;
          if (static_cast<int32_t>(dense.size()) < ttd.ambient)
            dense.assign(ttd.ambient, 0);
          for (int32_t k = 0; k < td.dim; ++k) {
            touched.clear();
            size_t j = 0;
            for (const auto& [acol, aval] : td.kb_vectors[k]) {
              while (j + 1 < td.offsets.size() && td.offsets[j + 1] <= acol) ++j;
              QuotientPiece* piece = td.pieces[j];
              const auto& mm =
                  ring.mult_map(piece->dx(), piece->dp(), piece->chi(), e.chart, K);
              const int32_t local = acol - td.offsets[j];
              for (const auto& [tc, tv] : mm[local]) {
                const int32_t pos = ttd.offsets[j] + tc;
                if (dense[pos] == 0) touched.push_back(pos);
                dense[pos] = F_.add(dense[pos], F_.mul(aval, tv));
              }
            }
            SparseRow& row = diff[r][dom_off + k];
            for (int32_t fi = 0; fi < static_cast<int32_t>(ttd.kb_free.size()); ++fi) {
              const uint32_t v = dense[ttd.kb_free[fi]];
              if (v != 0)
                row.emplace_back(tgt_off + fi, e.sign > 0 ? v : F_.neg(v));
            }
            if (cfg_.check_kernel_coords) {
              std::vector<uint32_t> recon(ttd.ambient, 0);
              for (int32_t fi = 0; fi < static_cast<int32_t>(ttd.kb_free.size()); ++fi) {
                const uint32_t v = dense[ttd.kb_free[fi]];
                if (v == 0) continue;
                for (const auto& [c2, v2] : ttd.kb_vectors[fi])
                  recon[c2] = F_.add(recon[c2], F_.mul(v, v2));
              }
              for (int32_t c2 = 0; c2 < ttd.ambient; ++c2)
                if (recon[c2] != dense[c2])
                  throw ModelError("restricted section left the truncated kernel");
            }
            for (int32_t pos : touched) dense[pos] = 0;
          }
        }
      }
    }
    // Edge targets are visited in ascending column ranges, so rows come out
    // sorted; the guard keeps correctness independent of that ordering.
    for (auto& row : diff[r])
      if (!std::is_sorted(row.begin(), row.end())) std::sort(row.begin(), row.end());
  }

  if (cfg_.check_d2) {
    std::vector<uint32_t> acc;
    std::vector<int32_t> hit;
    for (int r = 0; r + 1 < 5; ++r) {
      if (lv[r].total == 0 || lv[r + 2].total == 0) continue;
      if (static_cast<int32_t>(acc.size()) < lv[r + 2].total)
        acc.assign(lv[r + 2].total, 0);
      for (int32_t col = 0; col < lv[r].total; ++col) {
        hit.clear();
        for (const auto& [c2, v2] : diff[r][col])
          for (const auto& [c3, v3] : diff[r + 1][c2]) {
            if (acc[c3] == 0) hit.push_back(c3);
            acc[c3] = F_.add(acc[c3], F_.mul(v2, v3));
          }
        bool bad = false;
        for (int32_t c3 : hit) {
          if (acc[c3] != 0) bad = true;
          acc[c3] = 0;
        }
        if (bad) throw ModelError("cover differentials do not compose to zero");
      }
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  std::array<int64_t, 5> ranks{};
  auto tprev = t1;
  std::vector<char> cleared;  // pivot columns of the previous differential
  for (int r = 0; r < 5; ++r) {
    if (lv[r].total == 0 || lv[r + 1].total == 0) {
      cleared.clear();
      continue;
    }
    // Rows hit by a pivot of the previous differential are combinations of
    // the remaining rows (the complex composes to zero), so dropping them
    // preserves the row span while skipping their reduction to zero.
    if (static_cast<int32_t>(cleared.size()) == lv[r].total)
      for (int32_t i = 0; i < lv[r].total; ++i)
        if (cleared[i]) SparseRow().swap(diff[r][i]);
    RankResult rr = rank_and_pivots(F_, lv[r + 1].total, std::move(diff[r]));
    ranks[r] = rr.rank;
    cleared = std::move(rr.pivot_cols);
    const auto tnow = std::chrono::steady_clock::now();
    res.rank_level_ns[r] =
        std::chrono::duration_cast<std::chrono::nanoseconds>(tnow - tprev).count();
    tprev = tnow;
  }
  const auto t2 = std::chrono::steady_clock::now();
  res.assemble_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  res.rank_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();

  auto& h = res.h;
  h[0] = lv[0].total - ranks[0];
  for (int i = 1; i <= 4; ++i) h[i] = lv[i].total - ranks[i] - ranks[i - 1];
  for (int i = 0; i <= 4; ++i)
    if (h[i] < 0) throw ModelError("negative Betti contribution in one character");
  return res;
}

BettiVector CechEngine::betti_at(const CompiledSheaf& sheaf, int K) {
  sheaf.validate();
  stats_.complexes_built += 1;
  QuotientRing& ring = QuotientRing::for_prime(p_);
  const SubsetTable& st = SubsetTable::instance();

  std::set<EpsPair> mus;
  for (int r = 0; r < 6; ++r) {
    const int s = r + 1;
    for (const auto& sm : sheaf.src) {
      const int dx = static_cast<int>(sm.deg.a + static_cast<int64_t>(K) * s);
      const int dp = static_cast<int>(sm.deg.b + static_cast<int64_t>(K) * s);
      if (dx < 0 || dp < 0) continue;
      guard_cells(dx, dp, cfg_.max_piece_cells);
      const int64_t B = dx + dp;
      for (int64_t e1 = -B; e1 <= B; ++e1)
        for (int64_t e2 = -B; e2 <= B; ++e2) {
          if (!char_feasible(dx, dp, e1, e2)) continue;
          const EpsPair chi{e1, e2};
          if (ring.piece(dx, dp, chi).dim() == 0) continue;
          for (const SubsetInfo& S : st.levels[r])
            mus.insert(chi - S.tau * static_cast<int64_t>(K) - sm.off);
        }
    }
  }

  std::vector<EpsPair> mu_list(mus.begin(), mus.end());
  stats_.mu_jobs += static_cast<int64_t>(mu_list.size());
  BettiVector out;
  auto absorb = [this, &out](const MuResult& r) {
    for (int i = 0; i < 5; ++i) out.h[i] += r.h[i];
    stats_.assemble_ns += r.assemble_ns;
    stats_.rank_ns += r.rank_ns;
    if (r.cols >= 4096) stats_.rank_ns_heavy += r.rank_ns;
    stats_.max_mu_cols = std::max(stats_.max_mu_cols, r.cols);
    for (int i = 0; i < 5; ++i) stats_.rank_level_ns[i] += r.rank_level_ns[i];
  };

  const unsigned hw = std::thread::hardware_concurrency();
  int nthreads = cfg_.jobs > 0 ? cfg_.jobs : static_cast<int>(hw ? hw : 1);
  nthreads = std::min<int>(nthreads, static_cast<int>(mu_list.size()));
  if (nthreads <= 1) {
    for (const EpsPair& mu : mu_list) absorb(run_mu(sheaf, K, mu));
    return out;
  }

  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::vector<MuResult>> partial(nthreads);
  auto worker = [&](int tid) {
    try {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= mu_list.size()) break;
        partial[tid].push_back(run_mu(sheaf, K, mu_list[i]));
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  for (const auto& pa : partial)
    for (const MuResult& r : pa) absorb(r);
  return out;
}

CohomologyResult CechEngine::cohomology(const CompiledSheaf& sheaf) {
  const int64_t want_chi = sheaf.expected_chi();
  QuotientRing& ring = QuotientRing::for_prime(p_);
  std::optional<BettiVector> prev;
  bool plateau_mismatch = false;
  BettiVector last;
  int last_k = cfg_.k_start;
  for (int K = cfg_.k_start; K <= cfg_.k_max; K += cfg_.k_step) {
    BettiVector cur = betti_at(sheaf, K);
    if (prev && cur == *prev) {
      if (cur.chi() == want_chi) {
        if (cfg_.trim_ring) ring.trim();
        return {cur, p_, K, true};
      }
      plateau_mismatch = true;
    } else {
      plateau_mismatch = false;
    }
    prev = cur;
    last = cur;
    last_k = K;
  }
  if (cfg_.trim_ring) ring.trim();
  std::string hs = "[";
  for (int i = 0; i <= 4; ++i) hs += std::to_string(last.h[i]) + (i < 4 ? "," : "]");
  if (plateau_mismatch)
    throw ModelError("Betti plateau " + hs + " at exponent " + std::to_string(last_k) +
                     " has Euler characteristic " + std::to_string(last.chi()) +
                     ", expected " + std::to_string(want_chi));
  throw NotStabilized("no stable Betti vector up to truncation exponent " +
                      std::to_string(cfg_.k_max) + "; last " + hs);
}

CohomologyResult CechEngine::line_cohomology(const Weight& w) {
  return cohomology(CompiledSheaf::line(w));
}

bool CechEngine::dual_check(const Weight& w) {
  const CohomologyResult a = line_cohomology(w);
  const CohomologyResult b = line_cohomology(serre_dual(w));
  for (int i = 0; i <= 4; ++i)
    if (a.betti.h[i] != b.betti.h[4 - i]) return false;
  return true;
}

SectionSpace section_space(uint32_t p, const Weight& w, const std::vector<int>& charts,
                           int K) {
  if (!is_odd_prime(p)) throw ModelError("coefficient prime must be an odd prime");
  if (charts.empty() || charts.size() > 8)
    throw UnsupportedExpression("chart set must contain between one and eight charts");
  std::vector<int> sorted = charts;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      sorted.front() < 0 || sorted.back() >= 8)
    throw UnsupportedExpression("chart indices must be distinct and in 0..7");
  if (K < 0) throw UnsupportedExpression("truncation exponent must be nonnegative");

  QuotientRing& ring = QuotientRing::for_prime(p);
  const ChartModel& cm = ChartModel::instance();
  const int s = static_cast<int>(sorted.size());
  const int dx = static_cast<int>(w.a + static_cast<int64_t>(K) * s);
  const int dp = static_cast<int>(w.b + static_cast<int64_t>(K) * s);
  SectionSpace out;
  if (dx < 0 || dp < 0) return out;

  Monomial denom = monomial_one();
  for (int c : sorted) denom = monomial_mul(denom, monomial_pow(cm.chart_monomial(c), K));
  const int64_t B = dx + dp;
  for (int64_t e1 = -B; e1 <= B; ++e1)
    for (int64_t e2 = -B; e2 <= B; ++e2) {
      if (!char_feasible(dx, dp, e1, e2)) continue;
      QuotientPiece& piece = ring.piece(dx, dp, {e1, e2});
      for (const Monomial& m : piece.basis()) {
        std::array<int, kNumVars> exps;
        for (int v = 0; v < kNumVars; ++v)
          exps[v] = static_cast<int>(m[v]) - static_cast<int>(denom[v]);
        out.basis.push_back(exps);
      }
    }
  return out;
}

}  // namespace flagcoh
