#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagcoh/groebner.hpp"
#include "flagcoh/rootdata.hpp"

namespace flagcoh {

struct SheafSummand {
  Weight deg;
  EpsPair off;  // equivariant character offset of the summand
};

// Entry of the presenting matrix: row l, column j, a signed monomial.
struct SheafEntry {
  int32_t l;
  int32_t j;
  int coef;
  Monomial mono;
};

// A sheaf presented as the kernel of an equivariant monomial matrix between
// sums of line bundles; with tgt empty it is the plain sum of the sources.
struct CompiledSheaf {
  std::vector<SheafSummand> src;
  std::vector<SheafSummand> tgt;
  std::vector<SheafEntry> entries;
  int64_t fiber_rank = 0;  // generic rank of the kernel
  int64_t map_rank = 0;    // generic rank of the matrix
  // Euler characteristic decomposition: signed multiset of line weights.
  std::vector<std::pair<Weight, int64_t>> chi_dec;

  static CompiledSheaf line(const Weight& w);
  bool is_direct_sum() const { return tgt.empty(); }
  int64_t expected_chi() const;
  // Degrees, characters and entry shapes are mutually consistent.
  void validate() const;
};

struct BettiVector {
  std::array<int64_t, 5> h{};
  int64_t chi() const { return h[0] - h[1] + h[2] - h[3] + h[4]; }
  friend bool operator==(const BettiVector&, const BettiVector&) = default;
};

struct CohomologyResult {
  BettiVector betti;
  uint32_t p = 0;
  int k_used = 0;
  bool stabilized = false;
};

struct EngineConfig {
  int k_start = 0;
  int k_step = 1;
  int k_max = 8;
  bool check_d2 = true;              // verify the assembled differentials compose to zero
  bool check_kernel_coords = false;  // re-expand kernel coordinates (slow, for tests)
  bool trim_ring = true;             // release cached ring pieces after each run
  int jobs = 0;                      // worker threads; 0 = hardware concurrency
  int64_t max_piece_cells = 2'000'000;
};

struct EngineStats {
  int64_t complexes_built = 0;
  int64_t mu_jobs = 0;
  int64_t assemble_ns = 0;       // section spaces, kernels, differential rows
  int64_t rank_ns = 0;           // sparse elimination
  int64_t rank_ns_heavy = 0;     // rank_ns share of characters with >= 4096 columns
  int64_t max_mu_cols = 0;       // largest single-character complex seen
  std::array<int64_t, 5> rank_level_ns{};  // rank_ns split by cover degree
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotStabilized : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedExpression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncated alternating cover complex over the eight torus-fixed charts,
// levels 0..5, each section space presented with denominator exponent K.
// Cohomology in degrees 0..4 is read off once two consecutive truncation
// exponents agree and the alternating sum matches the expected Euler
// characteristic.
class CechEngine {
 public:
  explicit CechEngine(uint32_t p, EngineConfig cfg = {});

  uint32_t prime() const { return p_; }
  const EngineConfig& config() const { return cfg_; }

  BettiVector betti_at(const CompiledSheaf& sheaf, int K);
  CohomologyResult cohomology(const CompiledSheaf& sheaf);
  CohomologyResult line_cohomology(const Weight& w);
  // Computes the weight and its dualizing twist; true when the two Betti
  // vectors are reverses of each other.
  bool dual_check(const Weight& w);

  const EngineStats& stats() const { return stats_; }

 private:
  uint32_t p_;
  EngineConfig cfg_;
  PrimeField F_;
  EngineStats stats_;

  struct MuResult {
    std::array<int64_t, 5> h{};
    int64_t assemble_ns = 0;
    int64_t rank_ns = 0;
    int64_t cols = 0;
    std::array<int64_t, 5> rank_level_ns{};
  };
  MuResult run_mu(const CompiledSheaf& sheaf, int K, const EpsPair& mu);
};

// Sections of O(w) over the intersection of the given charts with denominator
// exponent K: Laurent exponent vectors (numerator minus K * chart monomials).
struct SectionSpace {
  std::vector<std::array<int, kNumVars>> basis;
  int64_t dim() const { return static_cast<int64_t>(basis.size()); }
};
SectionSpace section_space(uint32_t p, const Weight& w, const std::vector<int>& charts,
                           int K);

}  // namespace flagcoh
