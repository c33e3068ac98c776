#include "flagcoh/groebner.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace flagcoh {

namespace {

// Variable ranking for the order, most significant first: x1..x4, then p13
// and p24, then the chart pluckers p12, p14, p23, p34.
constexpr std::array<int, kNumVars> kRanked = {0, 1, 2, 3, 5, 8, 4, 6, 7, 9};

int total_degree(const Monomial& m) {
  int d = 0;
  for (int v = 0; v < kNumVars; ++v) d += m[v];
  return d;
}

}  // namespace

bool mono_less(const Monomial& a, const Monomial& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  // Graded reverse lex: a > b iff the least significant nonzero coordinate of
  // a - b is negative.
  for (int i = kNumVars - 1; i >= 0; --i) {
    int v = kRanked[i];
    if (a[v] != b[v]) return a[v] > b[v];
  }
  return false;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
  for (int v = 0; v < kNumVars; ++v)
    if (d[v] > m[v]) return false;
  return true;
}

Monomial mono_quotient(const Monomial& m, const Monomial& d) {
  Monomial q;
  for (int v = 0; v < kNumVars; ++v) {
    q[v] = static_cast<int16_t>(m[v] - d[v]);
    assert(q[v] >= 0);
  }
  return q;
}

Poly poly_normalize(std::vector<std::pair<Monomial, int64_t>> terms, const PrimeField& F) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& s, const auto& t) { return mono_less(t.first, s.first); });
  Poly out;
  for (size_t i = 0; i < terms.size();) {
    size_t j = i;
    int64_t acc = 0;
    while (j < terms.size() && terms[j].first == terms[i].first) acc += terms[j++].second;
    uint32_t c = F.reduce(acc);
    if (c) out.emplace_back(terms[i].first, c);
    i = j;
  }
  return out;
}

Poly poly_axpy(const PrimeField& F, const Poly& f, uint32_t c, const Monomial& shift,
               const Poly& g) {
  Poly out;
  out.reserve(f.size() + g.size());
  size_t i = 0, j = 0;
  auto shifted = [&](size_t k) { return monomial_mul(shift, g[k].first); };
  while (i < f.size() && j < g.size()) {
    Monomial gm = shifted(j);
    if (f[i].first == gm) {
      uint32_t v = F.add(f[i].second, F.mul(c, g[j].second));
      if (v) out.emplace_back(f[i].first, v);
      ++i;
      ++j;
    } else if (mono_less(gm, f[i].first)) {
      out.push_back(f[i]);
      ++i;
    } else {
      uint32_t v = F.mul(c, g[j].second);
      if (v) out.emplace_back(gm, v);
      ++j;
    }
  }
  while (i < f.size()) out.push_back(f[i++]);
  while (j < g.size()) {
    uint32_t v = F.mul(c, g[j].second);
    if (v) out.emplace_back(shifted(j), v);
    ++j;
  }
  return out;
}

namespace {

Poly make_monic(Poly f, const PrimeField& F) {
  if (f.empty() || f.front().second == 1) return f;
  uint32_t s = F.inv(f.front().second);
  for (auto& [m, c] : f) c = F.mul(c, s);
  return f;
}

Poly reduce_against(Poly f, const std::vector<Poly>& basis, const PrimeField& F,
                    const Poly* skip = nullptr) {
  Poly out;
  while (!f.empty()) {
    bool reduced = false;
    for (const Poly& g : basis) {
      if (&g == skip || g.empty()) continue;
      if (mono_divides(g.front().first, f.front().first)) {
        Monomial q = mono_quotient(f.front().first, g.front().first);
        // Cancel the lead: f -= (lc_f / lc_g) * q * g.
        uint32_t c = F.neg(F.mul(f.front().second, F.inv(g.front().second)));
        f = poly_axpy(F, f, c, q, g);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      out.push_back(f.front());
      f.erase(f.begin());
    }
  }
  return out;
}

}  // namespace

GroebnerBasis::GroebnerBasis(uint32_t p) : F_(p) {
  const ChartModel& cm = ChartModel::instance();
  for (const GeneratorPoly& g : cm.generators) {
    std::vector<std::pair<Monomial, int64_t>> terms;
    for (const Term& t : g.terms) terms.emplace_back(t.mono, t.coeff);
    Poly f = poly_normalize(std::move(terms), F_);
    if (f.empty()) throw std::logic_error("zero generator");
    basis_.push_back(make_monic(std::move(f), F_));
  }

  std::deque<std::pair<size_t, size_t>> queue;
  for (size_t i = 0; i < basis_.size(); ++i)
    for (size_t j = i + 1; j < basis_.size(); ++j) queue.emplace_back(i, j);

  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    const Monomial& li = basis_[i].front().first;
    const Monomial& lj = basis_[j].front().first;
    // Product criterion: coprime leads give an S-polynomial reducing to zero.
    bool coprime = true;
    for (int v = 0; v < kNumVars; ++v) coprime &= !(li[v] > 0 && lj[v] > 0);
    if (coprime) continue;
    Monomial lcm;
    for (int v = 0; v < kNumVars; ++v) lcm[v] = std::max(li[v], lj[v]);
    Poly s = poly_axpy(F_, Poly{}, 1, mono_quotient(lcm, li), basis_[i]);
    s = poly_axpy(F_, s, F_.neg(1), mono_quotient(lcm, lj), basis_[j]);
    Poly r = reduce_against(std::move(s), basis_, F_);
    if (r.empty()) continue;
    r = make_monic(std::move(r), F_);
    for (size_t k = 0; k < basis_.size(); ++k) queue.emplace_back(k, basis_.size());
    basis_.push_back(std::move(r));
  }

  // Minimalize: drop elements whose lead is divisible by another lead.
  std::vector<Poly> minimal;
  for (size_t i = 0; i < basis_.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < basis_.size(); ++j) {
      if (i == j) continue;
      const Monomial& li = basis_[i].front().first;
      const Monomial& lj = basis_[j].front().first;
      if (mono_divides(lj, li) && !(li == lj && j > i)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) minimal.push_back(basis_[i]);
  }
  basis_ = std::move(minimal);

  // Inter-reduce to the unique reduced basis.
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < basis_.size(); ++i) {
      Poly r = reduce_against(basis_[i], basis_, F_, &basis_[i]);
      if (r != basis_[i]) {
        basis_[i] = make_monic(std::move(r), F_);
        changed = true;
      }
    }
  }

  std::sort(basis_.begin(), basis_.end(),
            [](const Poly& f, const Poly& g) { return mono_less(f.front().first, g.front().first); });
  for (const Poly& f : basis_) leads_.push_back(f.front().first);
}

Poly GroebnerBasis::normal_form(Poly f) const { return reduce_against(std::move(f), basis_, F_); }

bool GroebnerBasis::is_standard(const Monomial& m) const {
  for (const Monomial& l : leads_)
    if (mono_divides(l, m)) return false;
  return true;
}

XPart GroebnerBasis::x_caps() const {
  XPart caps;
  caps.fill(INT16_MAX);
  for (const Monomial& l : leads_) {
    int nz = -1, count = 0;
    for (int v = 0; v < kNumVars; ++v) {
      if (l[v] > 0) {
        nz = v;
        ++count;
      }
    }
    if (count == 1 && nz < kNumX) caps[nz] = std::min<int16_t>(caps[nz], l[nz] - 1);
  }
  return caps;
}

PPart GroebnerBasis::p_caps() const {
  PPart caps;
  caps.fill(INT16_MAX);
  for (const Monomial& l : leads_) {
    int nz = -1, count = 0;
    for (int v = 0; v < kNumVars; ++v) {
      if (l[v] > 0) {
        nz = v;
        ++count;
      }
    }
    if (count == 1 && nz >= kNumX) caps[nz - kNumX] = std::min<int16_t>(caps[nz - kNumX], l[nz] - 1);
  }
  return caps;
}

std::vector<Monomial> GroebnerBasis::standard_monomials(int dx, int dp,
                                                        const EpsPair& chi) const {
  std::vector<Monomial> out;
  const XPart xcaps = x_caps();
  const PPart pcaps = p_caps();
  for (int64_t e1 = -dx; e1 <= dx; ++e1) {
    for (int64_t e2 = -dx + std::abs(e1); e2 <= dx - std::abs(e1); ++e2) {
      EpsPair cx{e1, e2};
      if (!x_parts_nonempty(dx, cx)) continue;
      EpsPair cp = chi - cx;
      if (!p_parts_nonempty(dp, cp)) continue;
      auto xs = x_parts_for(dx, cx, xcaps);
      if (xs.empty()) continue;
      auto ps = p_parts_for(dp, cp, pcaps);
      if (ps.empty()) continue;
      for (const XPart& xp : xs) {
        for (const PPart& pp : ps) {
          Monomial m = monomial_from_parts(xp, pp);
          if (is_standard(m)) out.push_back(m);
        }
      }
    }
  }
  return out;
}

QuotientPiece::QuotientPiece(const GroebnerBasis* gb, int dx, int dp, const EpsPair& chi)
    : gb_(gb), dx_(dx), dp_(dp), chi_(chi), basis_(gb->standard_monomials(dx, dp, chi)) {
  index_.reserve(basis_.size() * 2);
  for (int32_t i = 0; i < static_cast<int32_t>(basis_.size()); ++i) index_.emplace(basis_[i], i);
}

const SparseRow& QuotientPiece::nf_coords(const Monomial& m) {
  std::lock_guard<std::mutex> lock(memo_mu_);
  auto hit = nf_memo_.find(m);
  if (hit != nf_memo_.end()) return hit->second;
  assert(monomial_bidegree(m) == std::make_pair(dx_, dp_));
  assert(monomial_character(m) == chi_);
  SparseRow row;
  auto direct = index_.find(m);
  if (direct != index_.end()) {
    row.emplace_back(direct->second, 1);
  } else {
    Poly nf = gb_->normal_form(Poly{{m, 1}});
    row.reserve(nf.size());
    for (const auto& [mono, c] : nf) {
      auto it = index_.find(mono);
      if (it == index_.end())
        throw std::logic_error("normal form left the graded piece");
      row.emplace_back(it->second, c);
    }
    std::sort(row.begin(), row.end());
  }
  return nf_memo_.emplace(m, std::move(row)).first->second;
}

QuotientRing::QuotientRing(uint32_t p) : gb_(p) {}

QuotientRing& QuotientRing::for_prime(uint32_t p) {
  static std::mutex reg_mu;
  static std::map<uint32_t, std::unique_ptr<QuotientRing>> registry;
  std::lock_guard<std::mutex> lock(reg_mu);
  auto& slot = registry[p];
  if (!slot) slot.reset(new QuotientRing(p));
  return *slot;
}

QuotientPiece& QuotientRing::piece(int dx, int dp, const EpsPair& chi) {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_tuple(dx, dp, chi.e1, chi.e2);
  auto& slot = pieces_[key];
  if (!slot) slot.reset(new QuotientPiece(&gb_, dx, dp, chi));
  return *slot;
}

int64_t QuotientRing::pieces_built() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int64_t>(pieces_.size());
}

const std::vector<SparseRow>& QuotientRing::mult_map(int dx, int dp, const EpsPair& chi,
                                                     int chart, int K) {
  auto key = std::make_tuple(dx, dp, chi.e1, chi.e2, chart, K);
  {
    std::lock_guard<std::mutex> lock(mm_mu_);
    auto it = mult_maps_.find(key);
    if (it != mult_maps_.end()) return *it->second;
  }
  const ChartModel& cm = ChartModel::instance();
  const Monomial shift = monomial_pow(cm.chart_monomial(chart), K);
  QuotientPiece& dom = piece(dx, dp, chi);
  QuotientPiece& img = piece(dx + K, dp + K, chi + cm.chart_character(chart) * K);
  auto rows = std::make_unique<std::vector<SparseRow>>();
  rows->reserve(dom.basis().size());
  for (const Monomial& m : dom.basis()) rows->push_back(img.nf_coords(monomial_mul(m, shift)));
  std::lock_guard<std::mutex> lock(mm_mu_);
  auto it = mult_maps_.emplace(key, std::move(rows)).first;
  return *it->second;
}

void QuotientRing::trim() {
  std::scoped_lock lock(mm_mu_, mu_);
  mult_maps_.clear();
  pieces_.clear();
}

}  // namespace flagcoh
