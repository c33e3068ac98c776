#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagcoh/cache.hpp"
#include "flagcoh/cech.hpp"
#include "flagcoh/sheafexpr.hpp"

namespace flagcoh {

// ---------------------------------------------------------------------------
// Deduction primitives
// ---------------------------------------------------------------------------

// Set of cohomology degrees proven to vanish.  Knowledge only ever grows and
// never asserts nonvanishing; degrees outside the set are merely unknown.
struct ZeroPattern {
  std::array<bool, 5> zero{};

  bool at(int d) const { return d < 0 || d > 4 || zero[d]; }
  ZeroPattern& mark(int d) {
    if (d >= 0 && d <= 4) zero[d] = true;
    return *this;
  }
  bool all(std::initializer_list<int> degrees) const {
    for (int d : degrees)
      if (!at(d)) return false;
    return true;
  }
};

ZeroPattern zeros_of(const BettiVector& v);

// A short exact sequence of sheaves with partial knowledge of the cohomology
// of its terms.  infer(target) returns the degrees in which the target term
// is forced to vanish by the long exact cohomology sequence:
//   middle: h^i(B) = 0 when h^i(A) = 0 and h^i(C) = 0;
//   sub:    h^i(A) = 0 when h^{i-1}(C) = 0 and h^i(B) = 0;
//   quot:   h^i(C) = 0 when h^i(B) = 0 and h^{i+1}(A) = 0.
// Four-term exact sequences are split at the middle image and the two
// halves chained.  Only vanishing is ever concluded.
struct SESImplication {
  std::vector<ZeroPattern> terms;  // size 3 or 4, exact in listed order

  ZeroPattern infer(std::size_t target) const;
};

// Alternating sum of Euler characteristics along an exact sequence.
int64_t chi_alternating(const std::vector<int64_t>& chis);

// ---------------------------------------------------------------------------
// Künneth combination (external products of sheaves on the 3-fold base)
// ---------------------------------------------------------------------------

// Total-degree cohomology of an external product: out[k] = sum_i l[i]*r[k-i].
// Inputs are cohomology vectors of sheaves on a 3-fold, so h[4] must vanish;
// a nonzero h[4] means the model fed a 4-fold vector where a base sheaf was
// required and raises ModelError.  Checks chi multiplicativity internally.
std::array<int64_t, 7> kunneth_combine(const BettiVector& l, const BettiVector& r);
// Stabilization-checked overload; throws NotStabilized on unstabilized input.
std::array<int64_t, 7> kunneth_combine(const CohomologyResult& l,
                                       const CohomologyResult& r);
// Pattern-level version: out[k] is true when total degree k may be nonzero.
std::array<bool, 7> kunneth_mask(const ZeroPattern& l, const ZeroPattern& r);

// ---------------------------------------------------------------------------
// Rank bookkeeping
// ---------------------------------------------------------------------------

// Dense integer polynomials in one variable (the characteristic).
struct IntPoly {
  std::vector<int64_t> c;  // c[k] * x^k, trailing zeros trimmed

  static IntPoly constant(int64_t v);
  static IntPoly x_pow(int k);
  friend IntPoly operator+(const IntPoly&, const IntPoly&);
  friend IntPoly operator-(const IntPoly&, const IntPoly&);
  friend IntPoly operator*(const IntPoly&, const IntPoly&);
  friend bool operator==(const IntPoly&, const IntPoly&) = default;
};

// Rank bookkeeping of the Frobenius pushforward of the structure sheaf split
// along either ruling: x^{4n} = x^{3n} + x^{3n} (x^n - 1) coefficientwise.
bool frobenius_rank_identity(int n);

// ---------------------------------------------------------------------------
// Registered exact sequences
// ---------------------------------------------------------------------------

// A declared exact sequence.  Each term is a formal sum of expressions with
// integer multiplicities; its Euler characteristic is the matching linear
// combination of the declared Euler decompositions.
struct RegisteredSES {
  std::string id;
  std::string description;
  std::vector<std::vector<std::pair<int64_t, ExprPtr>>> terms;
};

// The exact sequences the verification replays, instantiated at (p, n).
std::vector<RegisteredSES> standard_sequences(uint32_t p, int n);

int64_t term_chi(const std::vector<std::pair<int64_t, ExprPtr>>& term, uint32_t p);
// Alternating chi sum over the declared terms; zero for every exact sequence.
int64_t ses_chi_defect(const RegisteredSES& s, uint32_t p);

// ---------------------------------------------------------------------------
// Claims
// ---------------------------------------------------------------------------

enum class ClaimStatus { kVerified, kVerifiedTrusted, kFailed, kSkipped };

std::string to_string(ClaimStatus s);

struct TrustedStep {
  std::string label;
  std::string citation;
};

struct ClaimOutcome {
  std::string claim;
  uint32_t p = 0;
  int n = 0;
  ClaimStatus status = ClaimStatus::kFailed;
  std::vector<std::string> checks;  // verified facts, human-readable
  std::vector<TrustedStep> trusted;
  std::string diagnostic;  // failure or skip reason
  double seconds = 0.0;
};

// Raised by claim bodies on a violated check; mapped to kFailed.
class CheckFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what);

// Per-(p, n) evaluation context: owns the engine, deduplicates leaf
// computations through the cache, certifies compiled kernels at rational
// points before trusting them.
class ClaimContext {
 public:
  ClaimContext(uint32_t p, int n, const EngineConfig& cfg, LeafCache* cache,
               uint64_t seed);

  uint32_t p() const { return p_; }
  int n() const { return n_; }
  int64_t q() const { return q_; }  // p^n
  uint64_t seed() const { return seed_; }
  CechEngine& engine() { return *engine_; }

  // Cohomology of an expression: rewrite, compile, certify, run, cache.
  CohomologyResult coh(const ExprPtr& e);
  CohomologyResult line(const Weight& w);
  // Declared Euler characteristic (no cohomology computation).
  int64_t chi_of(const ExprPtr& e) const;

  // Outcomes of previously verified claims at this grid point; used by the
  // assembly claim.  Filled by verify_claims.
  std::map<std::string, ClaimStatus> resolved;

 private:
  uint32_t p_;
  int n_;
  int64_t q_;
  uint64_t seed_;
  LeafCache* cache_;
  LeafCache local_;  // used when no shared cache is supplied
  std::unique_ptr<CechEngine> engine_;
};

struct Claim {
  std::string id;
  std::string statement;  // expected pattern, parametric in p and n
  std::function<void(ClaimContext&, ClaimOutcome&)> run;
};

// The standard registry: C1..C13.
const std::vector<Claim>& standard_claims();

// Run one claim; exceptions map to statuses (CheckFailed/ModelError ->
// kFailed, ResourceLimit/NotStabilized -> kSkipped).
ClaimOutcome verify_claim(const Claim& c, ClaimContext& ctx);

// Run a subset (empty = all) in registry order, expanding dependencies of
// the assembly claim; records outcomes in ctx.resolved.
std::vector<ClaimOutcome> verify_claims(const std::vector<std::string>& ids,
                                        ClaimContext& ctx);

}  // namespace flagcoh
