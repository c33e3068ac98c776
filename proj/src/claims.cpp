#include "flagcoh/claims.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <stdexcept>

namespace flagcoh {

// ---------------------------------------------------------------------------
// Vanishing-pattern bookkeeping.

ZeroPattern zeros_of(const BettiVector& v) {
  ZeroPattern z;
  for (int i = 0; i < 5; ++i)
    if (v.h[i] == 0) z.mark(i);
  return z;
}

namespace {

// Long-exact-sequence deduction for a three-term short exact sequence
// 0 -> A -> B -> C -> 0 (terms[0..2]).  Only vanishing is concluded:
//   H^i(B) = 0  if H^i(A) = 0 and H^i(C) = 0
//   H^i(A) = 0  if H^{i-1}(C) = 0 and H^i(B) = 0
//   H^i(C) = 0  if H^i(B) = 0 and H^{i+1}(A) = 0
ZeroPattern infer3(const ZeroPattern& a, const ZeroPattern& b,
                   const ZeroPattern& c, size_t target) {
  ZeroPattern out;
  for (int i = 0; i < 5; ++i) {
    bool z = false;
    if (target == 0)
      z = c.at(i - 1) && b.at(i);
    else if (target == 1)
      z = a.at(i) && c.at(i);
    else
      z = b.at(i) && a.at(i + 1);
    if (z) out.mark(i);
  }
  return out;
}

}  // namespace

ZeroPattern SESImplication::infer(size_t target) const {
  if (terms.size() == 3) {
    if (target > 2) throw std::out_of_range("SESImplication: target index");
    return infer3(terms[0], terms[1], terms[2], target);
  }
  if (terms.size() == 4) {
    // Split 0 -> T0 -> T1 -> T2 -> T3 -> 0 at the image E = im(T1 -> T2):
    // 0 -> T0 -> T1 -> E -> 0 and 0 -> E -> T2 -> T3 -> 0.
    if (target > 3) throw std::out_of_range("SESImplication: target index");
    ZeroPattern e;
    for (int i = 0; i < 5; ++i) {
      bool z = (terms[1].at(i) && terms[0].at(i + 1)) ||
               (terms[3].at(i - 1) && terms[2].at(i));
      if (z) e.mark(i);
    }
    if (target <= 1) return infer3(terms[0], terms[1], e, target);
    return infer3(e, terms[2], terms[3], target - 2 + 1);
  }
  throw std::invalid_argument("SESImplication: expected 3 or 4 terms");
}

int64_t chi_alternating(const std::vector<int64_t>& h) {
  int64_t s = 0;
  int64_t sign = 1;
  for (int64_t v : h) {
    s += sign * v;
    sign = -sign;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Kunneth combination for a product of two 4-folds, with both factors'
// cohomology supported in degrees 0..3 (base 3-fold sheaves pulled back).

std::array<int64_t, 7> kunneth_combine(const BettiVector& l,
                                       const BettiVector& r) {
  if (l.h[4] != 0 || r.h[4] != 0)
    throw ModelError(
        "kunneth_combine: factor has h^4 != 0; factors must be pulled back "
        "from the 3-dimensional base");
  std::array<int64_t, 7> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i + j] += l.h[i] * r.h[j];
  int64_t chi = 0;
  for (int k = 0; k < 7; ++k) chi += (k % 2 ? -1 : 1) * out[k];
  if (chi != l.chi() * r.chi())
    throw ModelError("kunneth_combine: chi multiplicativity violated");
  return out;
}

std::array<int64_t, 7> kunneth_combine(const CohomologyResult& l,
                                       const CohomologyResult& r) {
  if (!l.stabilized || !r.stabilized)
    throw NotStabilized("kunneth_combine: factor not stabilized");
  return kunneth_combine(l.betti, r.betti);
}

std::array<bool, 7> kunneth_mask(const ZeroPattern& l, const ZeroPattern& r) {
  std::array<bool, 7> may{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (l.at(i) || r.at(j)) continue;
      if (i + j > 6)
        throw ModelError(
            "kunneth_mask: factor patterns allow total degree > 6; factors "
            "must vanish in degree 4");
      may[i + j] = true;
    }
  return may;
}

// ---------------------------------------------------------------------------
// Integer polynomials (coefficient vectors in the variable p).

IntPoly IntPoly::constant(int64_t v) {
  IntPoly r;
  if (v != 0) r.c = {v};
  return r;
}

IntPoly IntPoly::x_pow(int k) {
  IntPoly r;
  r.c.assign(static_cast<size_t>(k) + 1, 0);
  r.c.back() = 1;
  return r;
}

static void trim(std::vector<int64_t>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  IntPoly r;
  r.c.assign(std::max(a.c.size(), b.c.size()), 0);
  for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
  trim(r.c);
  return r;
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  IntPoly neg = b;
  for (auto& v : neg.c) v = -v;
  return a + neg;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  IntPoly r;
  if (a.c.empty() || b.c.empty()) return r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  trim(r.c);
  return r;
}

bool frobenius_rank_identity(int n) {
  // rank F^n_* O along a ruling: p^{4n} = p^{3n} + p^{3n} (p^n - 1),
  // the two summands being the structure sheaf part and the rank-(p^n - 1)
  // divided-power part of the graded pushforward.
  const IntPoly lhs = IntPoly::x_pow(4 * n);
  const IntPoly rhs = IntPoly::x_pow(3 * n) +
                      IntPoly::x_pow(3 * n) *
                          (IntPoly::x_pow(n) - IntPoly::constant(1));
  const IntPoly prod = IntPoly::x_pow(3 * n) * IntPoly::x_pow(n);
  return lhs == rhs && lhs == prod;
}

// ---------------------------------------------------------------------------
// Registered short exact sequences.

namespace {

ExprPtr L(int64_t a, int64_t b) { return line_expr(Weight{a, b}); }

std::vector<std::pair<int64_t, ExprPtr>> tm(ExprPtr e, int64_t mult = 1) {
  return {{mult, std::move(e)}};
}

}  // namespace

std::vector<RegisteredSES> standard_sequences(uint32_t p, int n) {
  int64_t q = 1;
  for (int i = 0; i < n; ++i) q *= p;

  const ExprPtr u2 = atom_expr(AtomId::U2);
  const ExprPtr u2d = atom_expr(AtomId::U2Dual);
  const ExprPtr om1 = atom_expr(AtomId::Omega1);
  const ExprPtr om2 = atom_expr(AtomId::Omega2);
  const ExprPtr fu2 = frob_expr(n, u2);
  const ExprPtr fu2d = frob_expr(n, u2d);

  std::vector<RegisteredSES> v;

  v.push_back({"taut",
               "tautological extension of the spinor pullback: "
               "0 -> O(-1,0) -> U2 -> O(1,-1) -> 0",
               {tm(L(-1, 0)), tm(u2), tm(L(1, -1))}});

  v.push_back({"taut-frob",
               "Frobenius pullback of the tautological extension: "
               "0 -> O(-q,0) -> F^n U2 -> O(q,-q) -> 0",
               {tm(L(-q, 0)), tm(fu2), tm(L(q, -q))}});

  v.push_back({"taut-frob-dual",
               "dual of the Frobenius-pulled tautological extension: "
               "0 -> O(-q,q) -> F^n U2^ -> O(q,0) -> 0",
               {tm(L(-q, q)), tm(fu2d), tm(L(q, 0))}});

  v.push_back({"taut-frob-dual-omega",
               "dual Frobenius tautological extension twisted by the "
               "relative canonical weight (0,-3) of the 3-fold base",
               {tm(L(-q, q - 3)), tm(twist_expr(fu2d, Weight{0, -3})),
                tm(L(q, -3))}});

  v.push_back({"taut-frob-pitwist",
               "Frobenius tautological extension twisted by O(-q,0)",
               {tm(L(-2 * q, 0)), tm(twist_expr(fu2, Weight{-q, 0})),
                tm(L(0, -q))}});

  v.push_back({"psi1-euler",
               "Euler-type presentation of the restricted twisted 1-form "
               "bundle: 0 -> Omega1(1)| -> 5 O -> O(0,1) -> 0",
               {tm(om1), tm(L(0, 0), 5), tm(L(0, 1))}});

  v.push_back({"psi2-koszul",
               "Koszul presentation of the restricted twisted 2-form "
               "bundle: 0 -> Omega2(2)| -> 10 O -> Omega1(2)| -> 0",
               {tm(om2), tm(L(0, 0), 10),
                tm(twist_expr(om1, Weight{0, 1}))}});

  v.push_back({"omega-tangent-adjunction",
               "self-duality of the twisted 1-form bundle on the base: "
               "0 -> O -> Omega1(2)| -> T -> 0, T = S^2 U2^",
               {tm(L(0, 0)), tm(twist_expr(om1, Weight{0, 1})),
                tm(sym_expr(2, u2d))}});

  v.push_back({"univ",
               "universal self-dual extension of the spinor bundle: "
               "0 -> U2 -> 4 O -> U2^ -> 0",
               {tm(u2), tm(L(0, 0), 4), tm(u2d)}});

  v.push_back({"univ-frob",
               "Frobenius pullback of the universal extension: "
               "0 -> F^n U2 -> 4 O -> F^n U2^ -> 0",
               {tm(fu2), tm(L(0, 0), 4), tm(fu2d)}});

  // Four-term symmetric square of univ-frob.  The last term is
  // S^2(F^n U2^) = (F^n U2^ (x) F^n U2^) - O(0,q) in the virtual sense
  // (the wedge square of a rank-2 bundle is its determinant; p odd).
  v.push_back({"univ-frob-sym2",
               "symmetric square of the Frobenius universal extension: "
               "0 -> O(0,-q) -> 4 F^n U2 -> 10 O -> S^2(F^n U2^) -> 0",
               {tm(L(0, -q)),
                tm(fu2, 4),
                tm(L(0, 0), 10),
                {{1, tensor_expr(fu2d, fu2d)}, {-1, L(0, q)}}}});

  v.push_back({"sym-product",
               "pushforward sequence for the spinor product: "
               "0 -> O(0,q) -> F^n U2^ (x) O(q,0) -> O(2q,0) -> 0",
               {tm(L(0, q)), tm(tensor_expr(fu2d, L(q, 0))), tm(L(2 * q, 0))}});

  return v;
}

int64_t term_chi(const std::vector<std::pair<int64_t, ExprPtr>>& term,
                 uint32_t p) {
  int64_t chi = 0;
  for (const auto& [mult, e] : term) {
    RewriteResult rw = rewrite(e, p);
    chi += mult * compile_sheaf(rw.expr).expected_chi();
  }
  return chi;
}

int64_t ses_chi_defect(const RegisteredSES& s, uint32_t p) {
  int64_t defect = 0;
  int64_t sign = 1;
  for (const auto& term : s.terms) {
    defect += sign * term_chi(term, p);
    sign = -sign;
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Claim plumbing.

std::string to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::kVerified: return "VERIFIED";
    case ClaimStatus::kVerifiedTrusted: return "VERIFIED*";
    case ClaimStatus::kFailed: return "FAILED";
    case ClaimStatus::kSkipped: return "SKIPPED";
  }
  return "?";
}

void require(bool cond, const std::string& what) {
  if (!cond) throw CheckFailed(what);
}

ClaimContext::ClaimContext(uint32_t p, int n, const EngineConfig& cfg,
                           LeafCache* cache, uint64_t seed)
    : p_(p), n_(n), q_(1), seed_(seed), cache_(cache ? cache : &local_),
      engine_(std::make_unique<CechEngine>(p, cfg)) {
  if (n < 1) throw std::invalid_argument("ClaimContext: n must be >= 1");
  for (int i = 0; i < n; ++i) q_ *= p;
}

CohomologyResult ClaimContext::coh(const ExprPtr& e) {
  const std::string ser = serialize(e);
  const std::string key =
      leaf_cache_key(kEngineVersion, ser, p_, engine_->config());
  if (auto hit = cache_->get(key)) return *hit;
  RewriteResult rw = rewrite(e, p_);
  CompiledSheaf cs = compile_sheaf(rw.expr);
  if (!cs.is_direct_sum()) certify_ranks(cs, p_, seed_);
  CohomologyResult r = engine_->cohomology(cs);
  if (r.betti.chi() != cs.expected_chi())
    throw ModelError("computed chi disagrees with the declared decomposition");
  cache_->put(key, ser + " @p=" + std::to_string(p_), r);
  return r;
}

CohomologyResult ClaimContext::line(const Weight& w) {
  return coh(line_expr(w));
}

int64_t ClaimContext::chi_of(const ExprPtr& e) const {
  RewriteResult rw = rewrite(e, p_);
  return compile_sheaf(rw.expr).expected_chi();
}

// ---------------------------------------------------------------------------
// Claim bodies.

namespace {

std::string wfmt(const Weight& w) {
  std::ostringstream os;
  os << "(" << w.a << "," << w.b << ")";
  return os.str();
}

std::string vfmt(const BettiVector& v) {
  std::ostringstream os;
  os << "[" << v.h[0];
  for (int i = 1; i < 5; ++i) os << " " << v.h[i];
  os << "]";
  return os.str();
}

void note(ClaimOutcome& out, std::string s) {
  out.checks.push_back(std::move(s));
}

// Dominant line bundle: the engine vector must equal (chi, 0, 0, 0, 0).
BettiVector kempf_line(ClaimContext& ctx, ClaimOutcome& out, const Weight& w) {
  require(is_dominant(w), "kempf_line: weight " + wfmt(w) + " not dominant");
  const CohomologyResult r = ctx.line(w);
  const int64_t chi = euler_characteristic(w);
  for (int i = 1; i < 5; ++i)
    require(r.betti.h[i] == 0, "dominant weight " + wfmt(w) + ": h^" +
                                   std::to_string(i) + " != 0");
  require(r.betti.h[0] == chi,
          "dominant weight " + wfmt(w) + ": h^0 != chi");
  note(out, "Kempf leaf " + wfmt(w) + ": h = " + vfmt(r.betti));
  return r.betti;
}

// Vanishing pattern of F^n U2 (x) O(q,0) forced by the two declared
// sequences, using only line-bundle inputs: first the middle of
// sym-product, then the tensor term through univ-frob (x) O(q,0).
ZeroPattern spinor_product_replay(const ZeroPattern& z0q,
                                  const ZeroPattern& z2q,
                                  const ZeroPattern& zq0) {
  SESImplication push{{z0q, {}, z2q}};
  const ZeroPattern mid = push.infer(1);  // F^n U2^ (x) O(q,0)
  SESImplication univ{{{}, zq0, mid}};    // 0 -> target -> 4 O(q,0) -> mid -> 0
  return univ.infer(0);
}

// Vanishing pattern of F^n Psi2 (x) O(q,0) forced by the declared chain
// of sequences; zq0/zqq/z0q/z2q are the engine patterns of the four line
// leaves O(q,0), O(q,-q), O(0,q), O(2q,0).
ZeroPattern two_form_row_replay(const ZeroPattern& zq0, const ZeroPattern& zqq,
                                const ZeroPattern& z0q,
                                const ZeroPattern& z2q) {
  const ZeroPattern prod = spinor_product_replay(z0q, z2q, zq0);
  // Four-term symmetric-square sequence tensored with O(q,0):
  // 0 -> O(q,-q) -> 4 (F U2 (x) O(q,0)) -> 10 O(q,0) -> S^2(F U2^)(q,0) -> 0
  SESImplication four{{zqq, prod, zq0, {}}};
  const ZeroPattern sym2 = four.infer(3);
  // Adjunction row: 0 -> O(q,0) -> F Omega1(2)|(q,0) -> F T(q,0) -> 0,
  // with F T = S^2(F U2^).
  SESImplication adj{{zq0, {}, sym2}};
  const ZeroPattern om1row = adj.infer(1);
  // Koszul row: 0 -> F Omega2(2)|(q,0) -> 10 O(q,0) -> F Omega1(2)|(q,0) -> 0
  SESImplication kos{{{}, zq0, om1row}};
  const ZeroPattern om2row = kos.infer(0);
  // Extension row: 0 -> F Omega2(2)|(q,0) -> F Psi2 (x) O(q,0) -> O(q,0) -> 0
  SESImplication ext{{om2row, {}, zq0}};
  return ext.infer(1);
}

// Vanishing in degree 3 of F^n U2 (x) O(q-2,-2) forced by the Serre-dual
// replay; also marks degree 4.  zm/za/zb are the engine patterns of
// O(-q,0), O(-2q,0), O(0,-q).
ZeroPattern degree3_dual_replay(const ZeroPattern& zm, const ZeroPattern& za,
                                const ZeroPattern& zb) {
  SESImplication tw{{za, {}, zb}};
  const ZeroPattern mid = tw.infer(1);  // F U2 (x) O(-q,0)
  SESImplication univ{{mid, zm, {}}};   // 0 -> mid -> 4 O(-q,0) -> dual -> 0
  const ZeroPattern dual = univ.infer(2);
  ZeroPattern res;
  res.mark(4);
  // Serre duality on the 4-fold: h^3(E) = h^1(E^ (x) omega), and the dual
  // twisted bundle here is exactly E^ (x) omega.
  if (dual.at(1)) res.mark(3);
  return res;
}

const RegisteredSES& find_seq(const std::vector<RegisteredSES>& v,
                              const std::string& id) {
  for (const auto& s : v)
    if (s.id == id) return s;
  throw std::logic_error("unregistered sequence id: " + id);
}

// --- C1 -------------------------------------------------------------------

void run_c1(ClaimContext&, ClaimOutcome& out) {
  for (int m = 1; m <= 3; ++m) {
    require(frobenius_rank_identity(m),
            "rank identity failed at n = " + std::to_string(m));
    note(out, "p^{4n} = p^{3n} + p^{3n}(p^n - 1) coefficientwise at n = " +
                  std::to_string(m) + ", along either ruling");
  }
}

// --- C2 -------------------------------------------------------------------

void run_c2(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const Weight wa{-q, 0}, wc{q, -q};

  const CohomologyResult vb =
      ctx.coh(frob_expr(ctx.n(), atom_expr(AtomId::U2)));
  for (int i : {0, 1, 3, 4})
    require(vb.betti.h[i] == 0,
            "direct: h^" + std::to_string(i) + "(F^n U2) != 0");
  const int64_t chi2 = euler_characteristic(wa) + euler_characteristic(wc);
  require(vb.betti.h[2] == chi2,
          "direct: h^2(F^n U2) != chi(-q,0) + chi(q,-q)");
  note(out, "direct kernel computation: h(F^n U2) = " + vfmt(vb.betti) +
                ", concentrated in degree 2, h^2 = chi" + wfmt(wa) +
                " + chi" + wfmt(wc) + " = " + std::to_string(chi2));

  const CohomologyResult va = ctx.line(wa);
  for (int i : {0, 1, 2, 4})
    require(va.betti.h[i] == 0,
            "O(-q,0) not concentrated in degree 3: h^" + std::to_string(i));
  const CohomologyResult vc = ctx.line(wc);
  require(vc.betti.h[0] == 0 && vc.betti.h[1] == 0,
          "O(q,-q): h^0 or h^1 nonzero");

  SESImplication taut{{zeros_of(va.betti), {}, zeros_of(vc.betti)}};
  ZeroPattern mid = taut.infer(1);

  // Degree 3 via the base: h^3 equals h^0 of the dual bundle twisted by the
  // canonical weight (0,-3) of the 3-fold base (Serre duality there), and
  // that twist sits in the dualized tautological extension.
  const CohomologyResult d1 = ctx.line({-q, q - 3});
  const CohomologyResult d2 = ctx.line({q, -3});
  SESImplication dual{{zeros_of(d1.betti), {}, zeros_of(d2.betti)}};
  if (dual.infer(1).at(0)) mid.mark(3);

  require(mid.all({0, 1, 3, 4}),
          "replay: sequence deduction left a degree undecided");
  note(out,
       "replay: tautological sequence kills degrees 0,1,4; Serre duality on "
       "the base plus the dualized extension kills degree 3; agrees with the "
       "direct vector");
}

// --- C3 -------------------------------------------------------------------

void run_c3(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const CohomologyResult v = ctx.line({q, -q});
  require(v.betti.h[0] == 0, "O_pi(-q): h^0 != 0");
  require(v.betti.h[1] == 0, "O_pi(-q): h^1 != 0");
  note(out, "O_pi(-q) = O" + wfmt({q, -q}) + ": h = " + vfmt(v.betti) +
                ", no sections, no first cohomology");
}

// --- C4 -------------------------------------------------------------------

void run_c4(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const CohomologyResult vb =
      ctx.coh(frob_expr(ctx.n(), atom_expr(AtomId::U2)));
  const CohomologyResult va = ctx.line({-q, 0});
  const CohomologyResult vc = ctx.line({q, -q});
  require(va.betti.h[2] == 0, "connecting sequence: h^2(O(-q,0)) != 0");
  require(vb.betti.h[3] == 0, "connecting sequence: h^3(F^n U2) != 0");
  require(vc.betti.h[3] == 0, "connecting sequence: h^3(O(q,-q)) != 0");
  require(vc.betti.h[2] == vb.betti.h[2] + va.betti.h[3],
          "rank additivity failed in the degree-2 connecting sequence");
  note(out, "0 -> H^2(F^n U2) -> H^2(O_pi(-q)) -> H^3(O(-q,0)) -> 0 is "
            "exact on dimensions: " +
                std::to_string(vc.betti.h[2]) + " = " +
                std::to_string(vb.betti.h[2]) + " + " +
                std::to_string(va.betti.h[3]));
}

// --- C5 -------------------------------------------------------------------

void run_c5(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const Weight l1{q, 0}, l2{q - 2, 2 * q - 2}, l3{q, q}, l4{q - 2, q - 2};

  const BettiVector v1 = kempf_line(ctx, out, l1);
  const BettiVector v2 = kempf_line(ctx, out, l2);
  const BettiVector v3 = kempf_line(ctx, out, l3);
  const BettiVector v4 = kempf_line(ctx, out, l4);

  const auto total = kunneth_combine(v1, v2);
  for (int k = 1; k < 7; ++k)
    require(total[k] == 0,
            "first product row: nonzero in total degree " + std::to_string(k));
  require(total[0] == euler_characteristic(l1) * euler_characteristic(l2),
          "first product row: h^0 != chi * chi");
  note(out, "O" + wfmt(l1) + " (x) O" + wfmt(l2) +
                ": product cohomology concentrated in total degree 0, h^0 = " +
                std::to_string(total[0]));

  // Second row: the left factor O(q,0) (x) U2-twist sits in the Euler-type
  // extension with flanks O(q,0) and O(q,q); only degrees 0,1 survive.
  SESImplication eul{{{}, zeros_of(v1), zeros_of(v3)}};
  const ZeroPattern left = eul.infer(0);
  require(left.all({2, 3, 4}),
          "twisted row: left factor not confined to degrees 0,1");
  const auto mask = kunneth_mask(left, zeros_of(v4));
  for (int k = 2; k < 7; ++k)
    require(!mask[k],
            "twisted row: may be nonzero in total degree " + std::to_string(k));
  note(out, "twisted product row vanishes above total degree 1 (left factor "
            "confined to degrees 0,1 by the extension with flanks O" +
                wfmt(l1) + ", O" + wfmt(l3) + "; right factor O" + wfmt(l4) +
                " dominant)");
}

// --- C6 -------------------------------------------------------------------

void run_c6(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const CohomologyResult vr = ctx.line({q - 2, -2});
  for (int i : {0, 2, 3, 4})
    require(vr.betti.h[i] == 0,
            "right factor O(q-2,-2) not concentrated in degree 1");

  const ZeroPattern zq0 = zeros_of(ctx.line({q, 0}).betti);
  const ZeroPattern zqq = zeros_of(ctx.line({q, -q}).betti);
  const ZeroPattern z0q = zeros_of(ctx.line({0, q}).betti);
  const ZeroPattern z2q = zeros_of(ctx.line({2 * q, 0}).betti);
  const ZeroPattern left = two_form_row_replay(zq0, zqq, z0q, z2q);
  require(left.all({2, 3, 4}),
          "left factor: 2-form row bound not established");

  const auto mask = kunneth_mask(left, zeros_of(vr.betti));
  for (int k = 3; k < 7; ++k)
    require(!mask[k],
            "second product row: may be nonzero in total degree " +
                std::to_string(k));
  note(out, "2-form row (left, degrees <= 1) (x) O" + wfmt({q - 2, -2}) +
                " (right, degree 1 only): product vanishes above total "
                "degree 2");
}

// --- C7 -------------------------------------------------------------------

void run_c7(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const ZeroPattern zq0 = zeros_of(ctx.line({q, 0}).betti);
  const ZeroPattern z0q = zeros_of(ctx.line({0, q}).betti);
  const ZeroPattern z2q = zeros_of(ctx.line({2 * q, 0}).betti);
  const ZeroPattern left = spinor_product_replay(z0q, z2q, zq0);
  require(left.all({2, 3, 4}),
          "left factor: spinor product bound not established");

  const ZeroPattern zm = zeros_of(ctx.line({-q, 0}).betti);
  const ZeroPattern za = zeros_of(ctx.line({-2 * q, 0}).betti);
  const ZeroPattern zb = zeros_of(ctx.line({0, -q}).betti);
  const ZeroPattern right = degree3_dual_replay(zm, za, zb);
  require(right.all({3, 4}), "right factor: degrees 3,4 not killed");

  const auto mask = kunneth_mask(left, right);
  for (int k = 4; k < 7; ++k)
    require(!mask[k],
            "third product row: may be nonzero in total degree " +
                std::to_string(k));
  note(out, "spinor product row (left, degrees <= 1) (x) twisted spinor row "
            "(right, degrees <= 2): product vanishes above total degree 3");
}

// --- C8 -------------------------------------------------------------------

void run_c8(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const Weight w{q - 2, -2};
  const CohomologyResult v = ctx.line(w);
  for (int i : {0, 2, 3, 4})
    require(v.betti.h[i] == 0,
            "O(q-2,-2): h^" + std::to_string(i) + " != 0");
  require(v.betti.h[1] == -euler_characteristic(w),
          "O(q-2,-2): h^1 != -chi");
  const CohomologyResult d = ctx.line(serre_dual(w));
  for (int i = 0; i < 5; ++i)
    require(v.betti.h[i] == d.betti.h[4 - i],
            "Serre-dual cross-check failed in degree " + std::to_string(i));
  note(out, "O" + wfmt(w) + ": h = " + vfmt(v.betti) +
                ", concentrated in degree 1 with h^1 = -chi = " +
                std::to_string(v.betti.h[1]) +
                "; matches the reversed vector of O" + wfmt(serre_dual(w)));
}

// --- C9 -------------------------------------------------------------------

void run_c9(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  kempf_line(ctx, out, {q, 0});

  const auto seqs = standard_sequences(ctx.p(), ctx.n());
  for (const char* id : {"psi1-euler", "psi2-koszul",
                         "omega-tangent-adjunction", "univ-frob-sym2"}) {
    require(ses_chi_defect(find_seq(seqs, id), ctx.p()) == 0,
            std::string("chi additivity fails for sequence ") + id);
    note(out, std::string("chi additivity holds for sequence ") + id);
  }

  const CohomologyResult vqq = ctx.line({q, -q});
  require(vqq.betti.h[3] == 0, "O_pi(-q): h^3 != 0");

  const ZeroPattern zq0 = zeros_of(ctx.line({q, 0}).betti);
  const ZeroPattern z0q = zeros_of(ctx.line({0, q}).betti);
  const ZeroPattern z2q = zeros_of(ctx.line({2 * q, 0}).betti);
  const ZeroPattern row =
      two_form_row_replay(zq0, zeros_of(vqq.betti), z0q, z2q);
  require(row.all({2, 3, 4}), "2-form row: H^i = 0 for i > 1 not established");
  note(out,
       "declared chain (four-term symmetric square, adjunction, Koszul, "
       "extension) forces H^i = 0 for i > 1 on the 2-form row; the spinor "
       "product bound used en route is the replay form whose direct-kernel "
       "agreement is checked separately");
}

// Direct kernel computations on Frobenius objects can need truncation
// exponent 3 before the Betti vectors plateau.  Refuse grid points whose
// worst-case graded pieces dwarf the cell budget up front, instead of hours
// into a computation the engine's own guard would eventually abort.
void preflight_direct(ClaimContext& ctx, const ExprPtr& e, const char* what) {
  const RewriteResult rw = rewrite(e, ctx.p());
  const CompiledSheaf sh = compile_sheaf(rw.expr);
  int64_t cells = 0;
  for (const auto& sm : sh.src)
    cells = std::max(cells,
                     euler_characteristic({sm.deg.a + 18, sm.deg.b + 18}));
  const int64_t budget = ctx.engine().config().max_piece_cells / 4;
  if (cells > budget)
    throw ResourceLimit(
        std::string(what) + ": the stabilization loop can reach graded "
                            "pieces of dimension " +
        std::to_string(cells) + ", beyond the budget " +
        std::to_string(budget) + " for a direct kernel computation");
}

// --- C10 ------------------------------------------------------------------

void run_c10(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const ExprPtr direct =
      tensor_expr(frob_expr(ctx.n(), atom_expr(AtomId::U2)), L(q, 0));
  preflight_direct(ctx, direct, "F^n U2 (x) O(q,0)");
  const CohomologyResult dl = ctx.coh(direct);
  for (int i : {2, 3, 4})
    require(dl.betti.h[i] == 0,
            "direct: h^" + std::to_string(i) + "(F^n U2 (x) O(q,0)) != 0");
  note(out, "direct kernel computation: h(F^n U2 (x) O(q,0)) = " +
                vfmt(dl.betti));

  const BettiVector v0q = kempf_line(ctx, out, {0, q});
  const BettiVector v2q = kempf_line(ctx, out, {2 * q, 0});
  const BettiVector vq0 = kempf_line(ctx, out, {q, 0});
  const ZeroPattern rep =
      spinor_product_replay(zeros_of(v0q), zeros_of(v2q), zeros_of(vq0));
  require(rep.all({2, 3, 4}), "replay: H^i = 0 for i > 1 not established");
  note(out, "replay through the pushforward and universal sequences forces "
            "h^i = 0 for i > 1; agrees with the direct vector");
}

// --- C11 ------------------------------------------------------------------

void run_c11(ClaimContext& ctx, ClaimOutcome& out) {
  const int64_t q = ctx.q();
  const ExprPtr fu2 = frob_expr(ctx.n(), atom_expr(AtomId::U2));
  const ExprPtr direct = tensor_expr(fu2, L(q - 2, -2));
  preflight_direct(ctx, direct, "F^n U2 (x) O(q-2,-2)");
  const CohomologyResult dl = ctx.coh(direct);
  require(dl.betti.h[3] == 0, "direct: h^3(F^n U2 (x) O(q-2,-2)) != 0");
  note(out, "direct kernel computation: h(F^n U2 (x) O(q-2,-2)) = " +
                vfmt(dl.betti));

  const ZeroPattern zm = zeros_of(ctx.line({-q, 0}).betti);
  const ZeroPattern za = zeros_of(ctx.line({-2 * q, 0}).betti);
  const ZeroPattern zb = zeros_of(ctx.line({0, -q}).betti);
  const ZeroPattern rep = degree3_dual_replay(zm, za, zb);
  require(rep.at(3), "replay: h^3 = 0 not established");

  // The Serre pairing partner is F^n U2^ (x) O(-q,0); chi is preserved.
  const ExprPtr dual = tensor_expr(
      frob_expr(ctx.n(), atom_expr(AtomId::U2Dual)), L(-q, 0));
  require(ctx.chi_of(direct) == ctx.chi_of(dual),
          "Serre pairing: chi(E) != chi(E^ (x) omega)");
  note(out, "replay: h^1 of the Serre-dual bundle vanishes by the twisted "
            "tautological and universal sequences, so h^3 = 0; chi of the "
            "dual pair agrees (" +
                std::to_string(ctx.chi_of(direct)) + ")");
}

// --- C12 ------------------------------------------------------------------

void run_c12(ClaimContext& ctx, ClaimOutcome& out) {
  // Eight rows of the characteristic-zero table must be reproduced in
  // characteristic p.  Rows whose twist keeps the truncated complexes small
  // are computed directly.  The remaining rows are forced by tensoring the
  // Euler or Koszul presentation with a line or spinor twist: when both
  // flanking terms of the twisted sequence vanish in the right degrees the
  // long exact sequence kills the row, and when the middle term has no
  // cohomology at all the connecting map is an isomorphism in every degree,
  // which pins the row's exact values.  Every input is Frobenius-free, so
  // the whole table is independent of n.
  const ExprPtr om1 = atom_expr(AtomId::Omega1);
  const ExprPtr om2 = atom_expr(AtomId::Omega2);
  const ExprPtr u2 = atom_expr(AtomId::U2);
  auto bv = [](int64_t h0, int64_t h1, int64_t h2, int64_t h3, int64_t h4) {
    BettiVector v;
    v.h = {h0, h1, h2, h3, h4};
    return v;
  };
  const BettiVector vzero = bv(0, 0, 0, 0, 0);

  auto direct = [&](const char* name, const ExprPtr& e,
                    const BettiVector& want) -> BettiVector {
    const CohomologyResult v = ctx.coh(e);
    require(v.betti == want,
            std::string("characteristic-zero table mismatch for ") + name +
                ": got " + vfmt(v.betti) + ", want " + vfmt(want));
    note(out, std::string(name) + ": h = " + vfmt(v.betti) +
                  " by direct computation, matching the characteristic-zero "
                  "value");
    return v.betti;
  };

  // Direct rows and direct leaves feeding the replayed rows.
  const BettiVector v_om1 = direct("Omega1(1)|", om1, vzero);
  const BettiVector v_om1m1 =
      direct("Omega1(1)|(0,-1)", twist_expr(om1, Weight{0, -1}),
             bv(0, 1, 0, 0, 0));
  direct("Omega2(2)|", om2, bv(0, 1, 0, 0, 0));
  const BettiVector v_l0m1 = direct("O(0,-1)", L(0, -1), vzero);
  const BettiVector v_l0m2 = direct("O(0,-2)", L(0, -2), vzero);
  const BettiVector v_u2 = direct("U2", u2, vzero);
  const BettiVector v_u2m1 =
      direct("U2(0,-1)", twist_expr(u2, Weight{0, -1}), vzero);
  const BettiVector v_u2m2 =
      direct("U2(0,-2)", twist_expr(u2, Weight{0, -2}), vzero);

  // Tensoring a short exact sequence of locally free sheaves with a locally
  // free sheaf is again exact; the chi bookkeeping of each instance is
  // checked before its long exact sequence is used.
  auto check_chi = [&](const char* name, const ExprPtr& sub, int64_t mult,
                       const ExprPtr& mid, const ExprPtr& quot) {
    const int64_t defect =
        ctx.chi_of(sub) - mult * ctx.chi_of(mid) + ctx.chi_of(quot);
    require(defect == 0, std::string("twisted presentation of ") + name +
                             ": alternating chi sum is " +
                             std::to_string(defect));
  };
  // Vanishing by the sub rule: h^i(sub) = 0 once h^i(mid) = 0 and
  // h^{i-1}(quot) = 0.
  auto replay_zero = [&](const char* name, const ExprPtr& sub, int64_t mult,
                         const ExprPtr& mid, const ExprPtr& quot,
                         const BettiVector& vmid, const BettiVector& vquot) {
    check_chi(name, sub, mult, mid, quot);
    SESImplication ses{{ZeroPattern{}, zeros_of(vmid), zeros_of(vquot)}};
    const ZeroPattern got = ses.infer(0);
    require(got.all({0, 1, 2, 3, 4}),
            std::string(name) + ": vanishing not forced by the twisted "
                                "presentation");
    note(out, std::string(name) + ": h = (0,0,0,0,0) forced by the long "
                                  "exact sequence of its twisted "
                                  "presentation, matching the "
                                  "characteristic-zero value");
  };

  // Omega1(1)|(0,-2): Euler presentation twisted by (0,-2); both flanks are
  // singular-chamber line bundles with no cohomology.
  replay_zero("Omega1(1)|(0,-2)", twist_expr(om1, Weight{0, -2}), 5,
              L(0, -2), L(0, -1), v_l0m2, v_l0m1);

  // Omega2(2)|(0,-1): Koszul presentation twisted by (0,-1); flanks are
  // O(0,-1) and the untwisted Omega1 row, both zero.
  replay_zero("Omega2(2)|(0,-1)", twist_expr(om2, Weight{0, -1}), 10,
              L(0, -1), om1, v_l0m1, v_om1);

  // Omega2(2)|(0,-2): Koszul presentation twisted by (0,-2).  The middle
  // term O(0,-2)^10 has no cohomology, so the connecting map is an
  // isomorphism h^{i-1}(Omega1(1)|(0,-1)) = h^i(Omega2(2)|(0,-2)) in every
  // degree, which determines the row's values, not just its support.
  {
    const ExprPtr sub = twist_expr(om2, Weight{0, -2});
    check_chi("Omega2(2)|(0,-2)", sub, 10, L(0, -2),
              twist_expr(om1, Weight{0, -1}));
    require(v_l0m2 == vzero,
            "Omega2(2)|(0,-2): middle term of the twisted presentation is "
            "not cohomology-free");
    BettiVector shifted;
    for (int i = 1; i < 5; ++i) shifted.h[i] = v_om1m1.h[i - 1];
    require(shifted == bv(0, 0, 1, 0, 0),
            "Omega2(2)|(0,-2): connecting isomorphism gives " + vfmt(shifted) +
                ", want (0,0,1,0,0)");
    note(out, "Omega2(2)|(0,-2): h = " + vfmt(shifted) +
                  " via the connecting isomorphism of its twisted "
                  "presentation (cohomology-free middle term), matching the "
                  "characteristic-zero value");
  }

  // Omega1(1)| (x) U2(0,-1) is an intermediate row: Euler presentation
  // tensored with U2(0,-1), flanks U2(0,-1) and U2, both zero.
  const ExprPtr u2m1e = twist_expr(u2, Weight{0, -1});
  const ExprPtr u2m2e = twist_expr(u2, Weight{0, -2});
  const ExprPtr om1_u2m1 = tensor_expr(om1, u2m1e);
  replay_zero("Omega1(1)| (x) U2(0,-1)", om1_u2m1, 5, u2m1e, u2, v_u2m1,
              v_u2);

  // Omega1(1)| (x) U2(0,-2): Euler presentation tensored with U2(0,-2).
  replay_zero("Omega1(1)| (x) U2(0,-2)", tensor_expr(om1, u2m2e), 5, u2m2e,
              u2m1e, v_u2m2, v_u2m1);

  // Omega2(2)| (x) U2(0,-2): Koszul presentation tensored with U2(0,-2);
  // the quotient flank is the intermediate row established above.
  replay_zero("Omega2(2)| (x) U2(0,-2)", tensor_expr(om2, u2m2e), 10, u2m2e,
              om1_u2m1, v_u2m2, vzero);

  note(out, "all eight twisted tables match the characteristic-zero values; "
            "inputs involve no Frobenius twist, so the check is independent "
            "of n");
  out.trusted.push_back(
      {"spectral-sequence assembly",
       "the row-by-row cohomology tables computed above feed a "
       "Beilinson-type spectral sequence that assembles the diagonal "
       "resolution; the assembly step itself is taken on trust"});
}

// --- C13 ------------------------------------------------------------------

void run_c13(ClaimContext& ctx, ClaimOutcome& out) {
  for (int k = 1; k <= 12; ++k) {
    const std::string id = "C" + std::to_string(k);
    auto it = ctx.resolved.find(id);
    require(it != ctx.resolved.end(),
            "assembly: prerequisite " + id + " was not evaluated");
    require(it->second == ClaimStatus::kVerified ||
                it->second == ClaimStatus::kVerifiedTrusted,
            "assembly: prerequisite " + id + " is " + to_string(it->second));
  }
  note(out, "all twelve constituent claims verified at this grid point");
  out.trusted.push_back(
      {"fibration adjunction",
       "the endomorphism Ext groups of the Frobenius pushforward are "
       "identified with Ext groups over the 3-fold base by adjunction along "
       "the second ruling; the identification is taken on trust"});
  out.trusted.push_back(
      {"diagonal pullback identification",
       "the pullback of the diagonal's structure sheaf under the Frobenius "
       "square is resolved by the pulled-back diagonal resolution; the "
       "identification is taken on trust"});
  out.trusted.push_back(
      {"endomorphism-to-spinor reduction",
       "the reduction of endomorphism-Ext vanishing over the base to the "
       "degree-2 concentration of the Frobenius-pulled spinor bundle, via "
       "the diagonal resolution on the product, is taken on trust"});
  out.trusted.push_back(
      {"quasi-D-affinity",
       "flag varieties are quasi-D-affine, so vanishing of the higher "
       "cohomology of the sheaf of differential operators implies "
       "D-affinity; this external theorem is taken on trust"});
}

}  // namespace

// ---------------------------------------------------------------------------
// Registry and drivers.

const std::vector<Claim>& standard_claims() {
  static const std::vector<Claim> reg = {
      {"C1",
       "rank bookkeeping of the Frobenius pushforward along either ruling: "
       "p^{4n} = p^{3n} + p^{3n}(p^n - 1) as polynomials, n = 1,2,3",
       run_c1},
      {"C2",
       "the Frobenius-pulled spinor bundle has cohomology concentrated in "
       "degree 2, of dimension chi(-q,0) + chi(q,-q); direct kernel "
       "computation and sequence replay agree",
       run_c2},
      {"C3",
       "O_pi(-q) = O(q,-q) has no sections and no first cohomology",
       run_c3},
      {"C4",
       "the degree-2 connecting sequence is exact on dimensions: "
       "h^2(O_pi(-q)) = h^2(F^n U2) + h^3(O(-q,0))",
       run_c4},
      {"C5",
       "first product rows: all line-bundle leaves are dominant and the "
       "products vanish in positive total degree (resp. above degree 1)",
       run_c5},
      {"C6",
       "second product row vanishes above total degree 2",
       run_c6},
      {"C7",
       "third product row vanishes above total degree 3",
       run_c7},
      {"C8",
       "O(q-2,-2) is concentrated in degree 1 with h^1 = -chi; the full "
       "vector is the reverse of the Serre-dual vector",
       run_c8},
      {"C9",
       "the 2-form row is killed above degree 1 by the declared chain of "
       "sequences, with chi additivity for every sequence used",
       run_c9},
      {"C10",
       "F^n U2 (x) O(q,0) has H^i = 0 for i > 1; direct kernel computation "
       "and sequence replay agree",
       run_c10},
      {"C11",
       "F^n U2 (x) O(q-2,-2) has H^3 = 0; direct kernel computation and the "
       "Serre-dual replay agree",
       run_c11},
      {"C12",
       "the two diagonal-resolution bundles have the characteristic-zero "
       "twisted cohomology tables (eight table rows, n-independent)",
       run_c12},
      {"C13",
       "assembly: higher endomorphism-Ext vanishing for the Frobenius "
       "pushforward, hence D-affinity, modulo the declared trusted steps",
       run_c13},
  };
  return reg;
}

ClaimOutcome verify_claim(const Claim& c, ClaimContext& ctx) {
  ClaimOutcome out;
  out.claim = c.id;
  out.p = ctx.p();
  out.n = ctx.n();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.run(ctx, out);
    out.status = out.trusted.empty() ? ClaimStatus::kVerified
                                     : ClaimStatus::kVerifiedTrusted;
  } catch (const CheckFailed& e) {
    out.status = ClaimStatus::kFailed;
    out.diagnostic = e.what();
  } catch (const ResourceLimit& e) {
    out.status = ClaimStatus::kSkipped;
    out.diagnostic = std::string("resource limit: ") + e.what();
  } catch (const NotStabilized& e) {
    out.status = ClaimStatus::kSkipped;
    out.diagnostic = std::string("not stabilized within schedule: ") + e.what();
  } catch (const ModelError& e) {
    out.status = ClaimStatus::kFailed;
    out.diagnostic = std::string("model inconsistency: ") + e.what();
  } catch (const UnsupportedExpression& e) {
    out.status = ClaimStatus::kFailed;
    out.diagnostic = std::string("unsupported expression: ") + e.what();
  } catch (const std::exception& e) {
    out.status = ClaimStatus::kFailed;
    out.diagnostic = std::string("error: ") + e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

std::vector<ClaimOutcome> verify_claims(const std::vector<std::string>& ids,
                                        ClaimContext& ctx) {
  const auto& reg = standard_claims();
  std::set<std::string> want(ids.begin(), ids.end());
  if (want.empty())
    for (const auto& c : reg) want.insert(c.id);
  for (const auto& id : want) {
    bool known = false;
    for (const auto& c : reg) known = known || c.id == id;
    if (!known) throw std::invalid_argument("unknown claim id: " + id);
  }
  if (want.count("C13"))
    for (int k = 1; k <= 12; ++k) want.insert("C" + std::to_string(k));

  std::vector<ClaimOutcome> res;
  for (const auto& c : reg) {
    if (!want.count(c.id)) continue;
    ClaimOutcome out = verify_claim(c, ctx);
    ctx.resolved[c.id] = out.status;
    res.push_back(std::move(out));
  }
  return res;
}

}  // namespace flagcoh
