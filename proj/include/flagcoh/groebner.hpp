#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "flagcoh/fp.hpp"
#include "flagcoh/geom.hpp"
#include "flagcoh/linalg.hpp"

namespace flagcoh {

// Graded reverse lexicographic order; the variable ranking keeps the plucker
// coordinates absent from the affine charts (p13, p24) in front so that
// leading terms concentrate on them.
bool mono_less(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& d, const Monomial& m);
Monomial mono_quotient(const Monomial& m, const Monomial& d);

// Terms sorted in strictly decreasing monomial order, coefficients in (0, p).
using Poly = std::vector<std::pair<Monomial, uint32_t>>;

Poly poly_normalize(std::vector<std::pair<Monomial, int64_t>> terms, const PrimeField& F);
// f + c * shift * g, both inputs sorted; result sorted.
Poly poly_axpy(const PrimeField& F, const Poly& f, uint32_t c, const Monomial& shift,
               const Poly& g);

// Reduced Groebner basis of the chart-model ideal over F_p.
class GroebnerBasis {
 public:
  explicit GroebnerBasis(uint32_t p);

  const PrimeField& field() const { return F_; }
  const std::vector<Poly>& elements() const { return basis_; }
  const std::vector<Monomial>& leading_terms() const { return leads_; }

  Poly normal_form(Poly f) const;
  bool is_standard(const Monomial& m) const;

  // Exponent caps implied by pure-power leading terms (v^k a lead gives cap
  // k-1); variables without such a lead are unconstrained.
  XPart x_caps() const;
  PPart p_caps() const;

  // Basis of the (dx, dp) piece of the quotient ring in the given character:
  // the standard monomials, in a deterministic order.
  std::vector<Monomial> standard_monomials(int dx, int dp, const EpsPair& chi) const;

 private:
  PrimeField F_;
  std::vector<Poly> basis_;
  std::vector<Monomial> leads_;
};

// One graded character piece of the quotient ring: an ordered basis plus a
// memoized reducer expressing arbitrary monomials of the piece in it.
class QuotientPiece {
 public:
  QuotientPiece(const GroebnerBasis* gb, int dx, int dp, const EpsPair& chi);

  int64_t dim() const { return static_cast<int64_t>(basis_.size()); }
  const std::vector<Monomial>& basis() const { return basis_; }
  int dx() const { return dx_; }
  int dp() const { return dp_; }
  const EpsPair& chi() const { return chi_; }

  // Coordinates of the class of m, which must have this piece's bidegree and
  // character. Thread-safe; the returned reference stays valid.
  const SparseRow& nf_coords(const Monomial& m);

 private:
  const GroebnerBasis* gb_;
  int dx_, dp_;
  EpsPair chi_;
  std::vector<Monomial> basis_;
  std::unordered_map<Monomial, int32_t, MonomialHash> index_;
  std::unordered_map<Monomial, SparseRow, MonomialHash> nf_memo_;
  mutable std::mutex memo_mu_;
};

// Per-prime quotient ring context handing out cached graded pieces.
class QuotientRing {
 public:
  static QuotientRing& for_prime(uint32_t p);

  const GroebnerBasis& gb() const { return gb_; }
  QuotientPiece& piece(int dx, int dp, const EpsPair& chi);
  int64_t pieces_built() const;

  // Multiplication by the K-th power of a chart monomial, from the (dx, dp,
  // chi) piece into the (dx+K, dp+K) piece of the shifted character: one
  // coordinate row per domain basis element. Cached; thread-safe.
  const std::vector<SparseRow>& mult_map(int dx, int dp, const EpsPair& chi, int chart,
                                         int K);

  // Drops all cached pieces and multiplication maps (the basis itself stays).
  // Callers must not hold references across a trim.
  void trim();

 private:
  explicit QuotientRing(uint32_t p);
  GroebnerBasis gb_;
  std::map<std::tuple<int, int, int64_t, int64_t>, std::unique_ptr<QuotientPiece>> pieces_;
  std::map<std::tuple<int, int, int64_t, int64_t, int, int>,
           std::unique_ptr<std::vector<SparseRow>>>
      mult_maps_;
  mutable std::mutex mu_;
  std::mutex mm_mu_;
};

}  // namespace flagcoh
