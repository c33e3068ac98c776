#include "flagcoh/geom.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <stdexcept>

#include "flagcoh/linalg.hpp"

namespace flagcoh {

namespace {

// x1, x2, x3, x4 carry the weights of the standard symplectic 4-space; the
// plucker coordinate p_ij carries the sum of the weights of x_i and x_j.
constexpr std::array<std::pair<int, int>, kNumVars> kVarChars = {{
    {1, 0},
    {0, 1},
    {-1, 0},
    {0, -1},
    {1, 1},   // p12
    {0, 0},   // p13
    {1, -1},  // p14
    {-1, 1},  // p23
    {0, 0},   // p24
    {-1, -1}  // p34
}};

Monomial unit_monomial(std::initializer_list<int> vars) {
  Monomial m{};
  for (int v : vars) ++m[v];
  return m;
}

}  // namespace

EpsPair variable_character(int v) {
  return {kVarChars[v].first, kVarChars[v].second};
}

EpsPair monomial_character(const Monomial& m) {
  EpsPair c{0, 0};
  for (int v = 0; v < kNumVars; ++v) {
    c.e1 += static_cast<int64_t>(m[v]) * kVarChars[v].first;
    c.e2 += static_cast<int64_t>(m[v]) * kVarChars[v].second;
  }
  return c;
}

std::pair<int, int> monomial_bidegree(const Monomial& m) {
  int dx = 0, dp = 0;
  for (int v = 0; v < kNumX; ++v) dx += m[v];
  for (int v = kNumX; v < kNumVars; ++v) dp += m[v];
  return {dx, dp};
}

uint64_t monomial_key(const Monomial& m) {
  uint64_t k = 0;
  for (int v = 0; v < kNumVars; ++v) {
    assert(m[v] >= 0 && m[v] <= 63);
    k = (k << 6) | static_cast<uint64_t>(m[v]);
  }
  return k;
}

Monomial monomial_one() { return Monomial{}; }

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (int v = 0; v < kNumVars; ++v) m[v] = static_cast<int16_t>(a[v] + b[v]);
  return m;
}

Monomial monomial_from_parts(const XPart& xp, const PPart& pp) {
  Monomial m{};
  for (int v = 0; v < kNumX; ++v) m[v] = xp[v];
  for (int v = 0; v < kNumP; ++v) m[kNumX + v] = pp[v];
  return m;
}

Monomial monomial_pow(const Monomial& m, int e) {
  Monomial out{};
  for (int v = 0; v < kNumVars; ++v) out[v] = static_cast<int16_t>(m[v] * e);
  return out;
}

const ChartModel& ChartModel::instance() {
  static const ChartModel model = [] {
    ChartModel cm;
    // Variable indices: x1..x4 = 0..3, p12 = 4, p13 = 5, p14 = 6, p23 = 7,
    // p24 = 8, p34 = 9.
    auto gen = [](const char* name, std::vector<Term> terms) {
      GeneratorPoly g;
      g.name = name;
      g.terms = std::move(terms);
      auto [dx, dp] = monomial_bidegree(g.terms.front().mono);
      g.deg_x = dx;
      g.deg_p = dp;
      g.character = monomial_character(g.terms.front().mono);
      for (const Term& t : g.terms) {
        if (monomial_bidegree(t.mono) != std::make_pair(g.deg_x, g.deg_p) ||
            monomial_character(t.mono) != g.character)
          throw std::logic_error("generator is not bihomogeneous and equivariant");
      }
      return g;
    };
    // The symplectic form applied to a plane: its plucker expression.
    cm.generators.push_back(gen("isotropy", {{unit_monomial({5}), 1}, {unit_monomial({8}), 1}}));
    // The plucker quadric cutting the grassmannian of planes.
    cm.generators.push_back(gen("plucker", {{unit_monomial({4, 9}), 1},
                                            {unit_monomial({5, 8}), -1},
                                            {unit_monomial({6, 7}), 1}}));
    // Coefficients of (line wedge plane) = 0: the incidence conditions.
    cm.generators.push_back(gen("inc123", {{unit_monomial({0, 7}), 1},
                                           {unit_monomial({1, 5}), -1},
                                           {unit_monomial({2, 4}), 1}}));
    cm.generators.push_back(gen("inc124", {{unit_monomial({0, 8}), 1},
                                           {unit_monomial({1, 6}), -1},
                                           {unit_monomial({3, 4}), 1}}));
    cm.generators.push_back(gen("inc134", {{unit_monomial({0, 9}), 1},
                                           {unit_monomial({2, 6}), -1},
                                           {unit_monomial({3, 5}), 1}}));
    cm.generators.push_back(gen("inc234", {{unit_monomial({1, 9}), 1},
                                           {unit_monomial({2, 8}), -1},
                                           {unit_monomial({3, 7}), 1}}));
    // Torus-fixed charts (x_i, p_jk) with i in {j, k} and jk ranging over the
    // four plucker coordinates that survive on the incidence variety.
    cm.charts = {{0, 4}, {1, 4}, {0, 6}, {3, 6}, {1, 7}, {2, 7}, {2, 9}, {3, 9}};
    return cm;
  }();
  return model;
}

Monomial ChartModel::chart_monomial(int c) const {
  return unit_monomial({charts[c].xi, charts[c].pvar});
}

EpsPair ChartModel::chart_character(int c) const {
  return monomial_character(chart_monomial(c));
}

constexpr int16_t kNoCap = INT16_MAX;

std::vector<XPart> x_parts_for(int degree, const EpsPair& chi, const XPart& caps) {
  std::vector<XPart> out;
  const int64_t g = chi.e1, h = chi.e2;
  if (degree < 0) return out;
  if (((degree - g - h) % 2 + 2) % 2 != 0) return out;
  for (int64_t ap = std::abs(g); ap <= degree; ap += 2) {
    int64_t bp = degree - ap;
    if (bp < std::abs(h)) continue;
    XPart v;
    v[0] = static_cast<int16_t>((ap + g) / 2);
    v[2] = static_cast<int16_t>((ap - g) / 2);
    v[1] = static_cast<int16_t>((bp + h) / 2);
    v[3] = static_cast<int16_t>((bp - h) / 2);
    if (v[0] > caps[0] || v[1] > caps[1] || v[2] > caps[2] || v[3] > caps[3]) continue;
    out.push_back(v);
  }
  return out;
}

std::vector<XPart> x_parts_for(int degree, const EpsPair& chi) {
  return x_parts_for(degree, chi, XPart{kNoCap, kNoCap, kNoCap, kNoCap});
}

std::vector<PPart> p_parts_for(int degree, const EpsPair& chi, const PPart& caps) {
  std::vector<PPart> out;
  if (degree < 0) return out;
  if (((chi.e1 + chi.e2) % 2 + 2) % 2 != 0) return out;
  const int64_t dd = (chi.e1 + chi.e2) / 2;  // v12 - v34
  const int64_t ee = (chi.e1 - chi.e2) / 2;  // v14 - v23
  for (int64_t s = std::abs(dd); s <= degree; s += 2) {
    if ((s + dd) / 2 > caps[0] || (s - dd) / 2 > caps[5]) continue;
    for (int64_t r = std::abs(ee); r + s <= degree; r += 2) {
      if ((r + ee) / 2 > caps[2] || (r - ee) / 2 > caps[3]) continue;
      const int64_t f = degree - s - r;
      const int64_t lo = std::max<int64_t>(0, f - caps[4]);
      const int64_t hi = std::min<int64_t>(f, caps[1]);
      for (int64_t v13 = lo; v13 <= hi; ++v13) {
        PPart w;
        w[0] = static_cast<int16_t>((s + dd) / 2);
        w[5] = static_cast<int16_t>((s - dd) / 2);
        w[2] = static_cast<int16_t>((r + ee) / 2);
        w[3] = static_cast<int16_t>((r - ee) / 2);
        w[1] = static_cast<int16_t>(v13);
        w[4] = static_cast<int16_t>(f - v13);
        out.push_back(w);
      }
    }
  }
  return out;
}

std::vector<PPart> p_parts_for(int degree, const EpsPair& chi) {
  return p_parts_for(degree, chi,
                     PPart{kNoCap, kNoCap, kNoCap, kNoCap, kNoCap, kNoCap});
}

bool x_parts_nonempty(int degree, const EpsPair& chi) {
  return degree >= std::abs(chi.e1) + std::abs(chi.e2) &&
         ((degree - chi.e1 - chi.e2) % 2 + 2) % 2 == 0;
}

bool p_parts_nonempty(int degree, const EpsPair& chi) {
  if (((chi.e1 + chi.e2) % 2 + 2) % 2 != 0) return false;
  return std::abs(chi.e1 + chi.e2) / 2 + std::abs(chi.e1 - chi.e2) / 2 <= degree;
}

namespace {

// Projective representatives with the first nonzero coordinate equal to one.
template <size_t N>
std::vector<std::array<uint32_t, N>> projective_reps(uint32_t p) {
  std::vector<std::array<uint32_t, N>> out;
  for (size_t lead = 0; lead < N; ++lead) {
    size_t nfree = N - lead - 1;
    int64_t total = 1;
    for (size_t i = 0; i < nfree; ++i) total *= p;
    for (int64_t it = 0; it < total; ++it) {
      std::array<uint32_t, N> v{};
      v[lead] = 1;
      int64_t t = it;
      for (size_t i = lead + 1; i < N; ++i) {
        v[i] = static_cast<uint32_t>(t % p);
        t /= p;
      }
      out.push_back(v);
    }
  }
  return out;
}

uint32_t evaluate_monomial(const Monomial& m, const XPoint& pt, const PrimeField& F) {
  uint64_t acc = 1;
  for (int v = 0; v < kNumVars; ++v) {
    if (m[v] == 0) continue;
    uint32_t base = v < kNumX ? pt.x[v] : pt.pl[v - kNumX];
    acc = acc * F.pow(base, m[v]) % F.p;
  }
  return static_cast<uint32_t>(acc);
}

}  // namespace

uint32_t evaluate_generator(const GeneratorPoly& g, const XPoint& pt, const PrimeField& F) {
  int64_t acc = 0;
  for (const Term& t : g.terms)
    acc += static_cast<int64_t>(t.coeff) * evaluate_monomial(t.mono, pt, F);
  return F.reduce(acc);
}

std::vector<XPoint> enumerate_points(uint32_t p) {
  PrimeField F(p);
  const ChartModel& cm = ChartModel::instance();
  std::vector<XPoint> out;
  auto x_reps = projective_reps<kNumX>(p);
  for (const auto& x : x_reps) {
    // Impose the isotropy line and the four incidence conditions; all are
    // linear in the plucker coordinates once the line is fixed.
    auto row = [&](std::initializer_list<std::pair<int, int64_t>> entries) {
      SparseRow r;
      for (const auto& [c, v] : entries) {
        uint32_t vv = F.reduce(v);
        if (vv) r.emplace_back(c, vv);
      }
      std::sort(r.begin(), r.end());
      return r;
    };
    std::vector<SparseRow> rows;
    rows.push_back(row({{1, 1}, {4, 1}}));
    rows.push_back(row({{3, x[0]}, {1, -static_cast<int64_t>(x[1])}, {0, x[2]}}));
    rows.push_back(row({{4, x[0]}, {2, -static_cast<int64_t>(x[1])}, {0, x[3]}}));
    rows.push_back(row({{5, x[0]}, {2, -static_cast<int64_t>(x[2])}, {1, x[3]}}));
    rows.push_back(row({{5, x[1]}, {4, -static_cast<int64_t>(x[2])}, {3, x[3]}}));
    KernelBasis kb = kernel_basis(F, kNumP, rows);
    if (kb.vectors.size() != 2)
      throw std::runtime_error("incidence system is not a pencil of planes");
    auto densify = [&](const SparseRow& r) {
      std::array<uint32_t, kNumP> v{};
      for (const auto& [c, val] : r) v[c] = val;
      return v;
    };
    std::array<uint32_t, kNumP> w1 = densify(kb.vectors[0]);
    std::array<uint32_t, kNumP> w2 = densify(kb.vectors[1]);
    for (uint32_t t = 0; t <= p; ++t) {
      std::array<uint32_t, kNumP> v{};
      for (int i = 0; i < kNumP; ++i)
        v[i] = t < p ? F.add(w1[i], F.mul(t, w2[i])) : w2[i];
      // Normalize the representative.
      uint32_t scale = 0;
      for (int i = 0; i < kNumP; ++i) {
        if (v[i]) {
          scale = F.inv(v[i]);
          break;
        }
      }
      assert(scale != 0);
      for (int i = 0; i < kNumP; ++i) v[i] = F.mul(v[i], scale);
      XPoint pt{x, v};
      for (const GeneratorPoly& g : cm.generators) {
        if (evaluate_generator(g, pt, F) != 0)
          throw std::runtime_error("pencil member violates the chart model equations");
      }
      out.push_back(pt);
    }
  }
  return out;
}

int64_t point_count(uint32_t p) {
  return static_cast<int64_t>(enumerate_points(p).size());
}

int64_t point_count_brute(uint32_t p) {
  PrimeField F(p);
  const ChartModel& cm = ChartModel::instance();
  auto x_reps = projective_reps<kNumX>(p);
  auto pl_reps = projective_reps<kNumP>(p);
  int64_t count = 0;
  for (const auto& x : x_reps) {
    for (const auto& pl : pl_reps) {
      XPoint pt{x, pl};
      bool on = true;
      for (const GeneratorPoly& g : cm.generators) {
        if (evaluate_generator(g, pt, F) != 0) {
          on = false;
          break;
        }
      }
      if (on) ++count;
    }
  }
  return count;
}

int jacobian_rank_at(const XPoint& pt, uint32_t p) {
  PrimeField F(p);
  const ChartModel& cm = ChartModel::instance();
  std::vector<SparseRow> rows;
  for (const GeneratorPoly& g : cm.generators) {
    SparseRow r;
    for (int v = 0; v < kNumVars; ++v) {
      int64_t acc = 0;
      for (const Term& t : g.terms) {
        if (t.mono[v] == 0) continue;
        Monomial m = t.mono;
        --m[v];
        acc += static_cast<int64_t>(t.coeff) * t.mono[v] * evaluate_monomial(m, pt, F);
      }
      uint32_t val = F.reduce(acc);
      if (val) r.emplace_back(v, val);
    }
    rows.push_back(std::move(r));
  }
  return static_cast<int>(rank_of(F, kNumVars, rows));
}

}  // namespace flagcoh
