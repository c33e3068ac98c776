#include "flagcoh/rootdata.hpp"

#include <cassert>
#include <cstdlib>

namespace flagcoh {

EpsPair to_eps(const Weight& w) { return {w.a + w.b, w.b}; }

Weight from_eps(const EpsPair& e) { return {e.e1 - e.e2, e.e2}; }

int64_t euler_characteristic(const Weight& w) {
  // Product over the four positive roots of <w + rho, coroot> / <rho, coroot>.
  int64_t n = (w.a + 1) * (w.b + 1) * (w.a + w.b + 2) * (w.a + 2 * w.b + 3);
  assert(n % 6 == 0);
  return n / 6;
}

Weight WeylElement::dot(const Weight& v) const {
  EpsPair shifted = to_eps(v + rho());
  return from_eps(act(shifted)) - rho();
}

namespace {

// Positive roots in eps coordinates: short alpha, long beta, and their sums.
constexpr std::array<std::pair<int64_t, int64_t>, 4> kPositiveRoots = {
    {{1, -1}, {0, 2}, {1, 1}, {2, 0}}};

bool eps_vector_negative(int64_t x, int64_t y) { return x < 0 || (x == 0 && y < 0); }

std::vector<WeylElement> build_weyl_group() {
  std::vector<WeylElement> out;
  for (int sw = 0; sw < 2; ++sw) {
    for (int s1 = 0; s1 < 2; ++s1) {
      for (int s2 = 0; s2 < 2; ++s2) {
        WeylElement w;
        w.swap = sw != 0;
        w.s1 = s1 ? -1 : 1;
        w.s2 = s2 ? -1 : 1;
        w.length = 0;
        for (const auto& [r1, r2] : kPositiveRoots) {
          EpsPair img = w.act({r1, r2});
          if (eps_vector_negative(img.e1, img.e2)) ++w.length;
        }
        out.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<WeylElement>& WeylElement::all() {
  static const std::vector<WeylElement> group = build_weyl_group();
  return group;
}

int64_t chi_by_dominance_reduction(const Weight& w) {
  EpsPair mu = to_eps(w + rho());
  // Singular: fixed by some reflection, so the characteristic is zero.
  if (mu.e1 == 0 || mu.e2 == 0 || mu.e1 == mu.e2 || mu.e1 == -mu.e2) return 0;
  for (const WeylElement& g : WeylElement::all()) {
    EpsPair img = g.act(mu);
    if (img.e1 > img.e2 && img.e2 > 0) {
      Weight dominant = from_eps(img) - rho();
      assert(dominant.a >= 0 && dominant.b >= 0);
      int64_t dim = (dominant.a + 1) * (dominant.b + 1) * (dominant.a + dominant.b + 2) *
                    (dominant.a + 2 * dominant.b + 3) / 6;
      return g.sign() * dim;
    }
  }
  assert(false && "regular weight must reach the dominant chamber");
  return 0;
}

std::optional<std::array<int64_t, 5>> kempf_predicts(const Weight& w) {
  if (is_dominant(w)) {
    return std::array<int64_t, 5>{euler_characteristic(w), 0, 0, 0, 0};
  }
  Weight dual = serre_dual(w);
  if (is_dominant(dual)) {
    return std::array<int64_t, 5>{0, 0, 0, 0, euler_characteristic(dual)};
  }
  return std::nullopt;
}

}  // namespace flagcoh
