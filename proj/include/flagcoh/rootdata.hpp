#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace flagcoh {

// A character of the rank-2 maximal torus written in the fundamental-weight
// basis: (a, b) = a*w_alpha + b*w_beta, with alpha the short simple root.
struct Weight {
  int64_t a = 0;
  int64_t b = 0;

  friend bool operator==(const Weight&, const Weight&) = default;
  friend auto operator<=>(const Weight&, const Weight&) = default;
  Weight operator+(const Weight& o) const { return {a + o.a, b + o.b}; }
  Weight operator-(const Weight& o) const { return {a - o.a, b - o.b}; }
  Weight operator*(int64_t k) const { return {a * k, b * k}; }
};

struct WeightHash {
  size_t operator()(const Weight& w) const {
    uint64_t x = static_cast<uint64_t>(w.a) * 0x9e3779b97f4a7c15ull;
    x ^= static_cast<uint64_t>(w.b) + 0x517cc1b727220a95ull + (x << 6) + (x >> 2);
    return static_cast<size_t>(x);
  }
};

// Orthogonal coordinates: (e1, e2) = (a + b, b).
struct EpsPair {
  int64_t e1 = 0;
  int64_t e2 = 0;
  friend bool operator==(const EpsPair&, const EpsPair&) = default;
  friend auto operator<=>(const EpsPair&, const EpsPair&) = default;
  EpsPair operator+(const EpsPair& o) const { return {e1 + o.e1, e2 + o.e2}; }
  EpsPair operator-(const EpsPair& o) const { return {e1 - o.e1, e2 - o.e2}; }
  EpsPair operator*(int64_t k) const { return {e1 * k, e2 * k}; }
};

struct EpsPairHash {
  size_t operator()(const EpsPair& e) const {
    uint64_t x = static_cast<uint64_t>(e.e1) * 0x9e3779b97f4a7c15ull;
    x ^= static_cast<uint64_t>(e.e2) + 0x517cc1b727220a95ull + (x << 6) + (x >> 2);
    return static_cast<size_t>(x);
  }
};

EpsPair to_eps(const Weight& w);
Weight from_eps(const EpsPair& e);

inline Weight rho() { return {1, 1}; }

// Euler characteristic of the line bundle O(w) on the full flag variety,
// by the Weyl character/dimension polynomial.  Valid for every weight.
int64_t euler_characteristic(const Weight& w);

// Serre dual twist: h^i(w) = h^(4-i)(serre_dual(w)) on the 4-fold.
inline Weight serre_dual(const Weight& w) { return {-w.a - 2, -w.b - 2}; }

inline Weight canonical_weight() { return {-2, -2}; }

// Line bundles pulled back from, or relative to, the two fibrations:
// pi to projective 3-space, q to the 3-dimensional quadric.
inline Weight pi_star(int64_t d) { return {d, 0}; }
inline Weight q_star(int64_t m) { return {0, m}; }
inline Weight rel_pi(int64_t c) { return {-c, c}; }  // O_pi(c), relative to pi
inline Weight rel_q(int64_t c) { return {c, 0}; }    // O_q(c), relative to q

// An element of the Weyl group (order 8), acting on eps coordinates by
// signed permutation.
struct WeylElement {
  bool swap = false;  // exchange e1 and e2 before applying signs
  int8_t s1 = 1;      // sign applied to the first output coordinate
  int8_t s2 = 1;
  int length = 0;     // number of positive roots sent to negative ones

  EpsPair act(const EpsPair& e) const {
    EpsPair x = swap ? EpsPair{e.e2, e.e1} : e;
    return {s1 * x.e1, s2 * x.e2};
  }
  int sign() const { return length % 2 == 0 ? 1 : -1; }

  // Dot action: w . v = w(v + rho) - rho.
  Weight dot(const Weight& v) const;

  static const std::vector<WeylElement>& all();
};

// Euler characteristic computed by an independent route: reflect w + rho into
// the dominant chamber (or detect that it is singular), then apply the
// dimension polynomial only on the interior of the dominant cone.
int64_t chi_by_dominance_reduction(const Weight& w);

// Cohomology of O(w) in degrees 0..4 whenever it is forced in every
// characteristic: dominant weights concentrate in degree 0 (with higher
// vanishing), and their Serre duals concentrate in degree 4.  Returns
// nullopt for all other weights.
std::optional<std::array<int64_t, 5>> kempf_predicts(const Weight& w);

inline bool is_dominant(const Weight& w) { return w.a >= 0 && w.b >= 0; }

}  // namespace flagcoh
