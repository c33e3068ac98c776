#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "flagcoh/fp.hpp"
#include "flagcoh/rootdata.hpp"

namespace flagcoh {

// The incidence model lives in P^3 x P^5: a point of the 3-space recording a
// line through the origin of the standard symplectic 4-space, and a plucker
// vector recording a plane.  Variable order: x1..x4, then the plucker
// coordinates p12, p13, p14, p23, p24, p34.
constexpr int kNumX = 4;
constexpr int kNumP = 6;
constexpr int kNumVars = kNumX + kNumP;

using Monomial = std::array<int16_t, kNumVars>;
using XPart = std::array<int16_t, kNumX>;
using PPart = std::array<int16_t, kNumP>;

// Torus character (eps coordinates) of each coordinate variable.
EpsPair variable_character(int v);
EpsPair monomial_character(const Monomial& m);
std::pair<int, int> monomial_bidegree(const Monomial& m);
// Packs 10 exponents at 6 bits each; requires every exponent <= 63.
uint64_t monomial_key(const Monomial& m);
Monomial monomial_one();
Monomial monomial_mul(const Monomial& a, const Monomial& b);
Monomial monomial_from_parts(const XPart& xp, const PPart& pp);
Monomial monomial_pow(const Monomial& m, int e);

struct Term {
  Monomial mono;
  int coeff;
};

struct GeneratorPoly {
  const char* name;
  std::vector<Term> terms;
  int deg_x;
  int deg_p;
  EpsPair character;
};

struct Chart {
  int xi;    // variable index of the x coordinate, 0..3
  int pvar;  // variable index of the plucker coordinate, 4..9
};

// The bihomogeneous equations of the incidence variety and its eight
// torus-fixed affine charts {x_i != 0, p_jk != 0} with i in {j, k}.
struct ChartModel {
  std::vector<GeneratorPoly> generators;  // isotropy line, plucker quadric, 4 incidences
  std::vector<Chart> charts;

  static const ChartModel& instance();

  Monomial chart_monomial(int c) const;
  EpsPair chart_character(int c) const;
  int num_charts() const { return static_cast<int>(charts.size()); }
};

// Exponent vectors of fixed total degree and torus character, deterministic
// order, empty when infeasible.  The capped overloads additionally bound each
// exponent; they enumerate only the vectors meeting every cap.
std::vector<XPart> x_parts_for(int degree, const EpsPair& chi);
std::vector<PPart> p_parts_for(int degree, const EpsPair& chi);
std::vector<XPart> x_parts_for(int degree, const EpsPair& chi, const XPart& caps);
std::vector<PPart> p_parts_for(int degree, const EpsPair& chi, const PPart& caps);
bool x_parts_nonempty(int degree, const EpsPair& chi);
bool p_parts_nonempty(int degree, const EpsPair& chi);

struct MonomialHash {
  size_t operator()(const Monomial& m) const {
    uint64_t h = 1469598103934665603ull;
    for (int v = 0; v < kNumVars; ++v) {
      h ^= static_cast<uint16_t>(m[v]);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

// A rational point, both factors normalized to leading coefficient one.
struct XPoint {
  std::array<uint32_t, kNumX> x;
  std::array<uint32_t, kNumP> pl;
};

// Enumerates the rational points by solving the linear incidence system over
// each point of the 3-space and walking the resulting pencil of planes.
std::vector<XPoint> enumerate_points(uint32_t p);
int64_t point_count(uint32_t p);
// Scans the full product of projective spaces; only sensible for tiny p.
int64_t point_count_brute(uint32_t p);
// Independent count: sum of q^length over the eight cells.
inline int64_t poincare_point_oracle(uint32_t p) {
  int64_t q = p;
  return 1 + 2 * q + 2 * q * q + 2 * q * q * q + q * q * q * q;
}

uint32_t evaluate_generator(const GeneratorPoly& g, const XPoint& pt, const PrimeField& F);
// Rank of the 6 x 10 matrix of partial derivatives at the point; the affine
// bi-cone is smooth of codimension 4 away from the vertex loci, so this is 4
// at every rational point.
int jacobian_rank_at(const XPoint& pt, uint32_t p);

}  // namespace flagcoh
