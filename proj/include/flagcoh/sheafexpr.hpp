#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flagcoh/cech.hpp"
#include "flagcoh/rootdata.hpp"

namespace flagcoh {

// Named bundles that the rewrite rules resolve into line bundles and kernel
// presentations on the incidence variety.  All of them live on the quadric
// threefold; their cohomology is computed through the pullback along the
// second projection, which preserves cohomology for a P^1-bundle with
// R q_* O = O.
enum class AtomId {
  U2,        // tautological rank-2 subbundle (spinor bundle), pulled back
  U2Dual,    // its dual
  TangentQ,  // tangent bundle of the quadric (p odd: equals S^2 of the dual)
  Omega1,    // Omega^1_{P^4}(1) restricted to the quadric
  Omega2,    // Omega^2_{P^4}(2) restricted to the quadric
};

// Immutable expression tree over line bundles: sums, twists by line weights,
// tensor products, symmetric powers, Frobenius pullbacks, named atoms, and
// explicit kernel presentations.  Trees are built through the constructor
// functions below, which fold twists into lines, flatten sums, and absorb
// line factors of tensor products, keeping the tree in a normal form.
struct SheafExpr {
  enum class Kind { Line, Sum, Twist, Tensor, Kernel, Sym, Frob, Atom };
  Kind kind = Kind::Line;
  Weight w{};     // Line value, or Twist shift
  int k = 0;      // Sym degree, or Frobenius exponent n
  AtomId atom = AtomId::U2;
  std::vector<std::shared_ptr<const SheafExpr>> args;
  CompiledSheaf ker;  // Kernel payload
};
using ExprPtr = std::shared_ptr<const SheafExpr>;

ExprPtr line_expr(const Weight& w);
ExprPtr sum_expr(std::vector<ExprPtr> parts);
ExprPtr twist_expr(ExprPtr e, const Weight& w);
ExprPtr tensor_expr(ExprPtr a, ExprPtr b);
ExprPtr sym_expr(int k, ExprPtr e);
ExprPtr frob_expr(int n, ExprPtr e);
ExprPtr atom_expr(AtomId id);
ExprPtr kernel_expr(CompiledSheaf presentation);

// The rank-2 subbundle cut out fiberwise by wedging with the tautological
// plane: kernel of the 4x4 matrix of v -> v ^ pi, four copies of O(0,0)
// mapping to four copies of O(0,1), generic matrix rank 2.
ExprPtr spinor_pullback();

// Scales line weights by p^n and raises kernel matrix entries to the p^n-th
// power (degrees and character offsets scale along).  n = 0 is the identity.
// Requires a rewritten tree (Line/Sum/Twist/Tensor/Kernel only).
ExprPtr frobenius_pull(const ExprPtr& e, int n, uint32_t p);

// Resolves every named atom and symmetric power into Line/Sum/Twist/Tensor/
// Kernel form.  The markers record each pushforward or determinant identity
// used, so reports can list which cohomology groups on the factors the
// computed groups equal.  Throws UnsupportedExpression for symmetric or
// divided powers of kernel-presented bundles.
struct RewriteResult {
  ExprPtr expr;
  std::vector<std::string> markers;
};
RewriteResult rewrite(const ExprPtr& e, uint32_t p);

// Flattens a rewritten tree into a single kernel presentation: twists shift
// degrees, sums stack block-diagonally, tensor products of kernels stack the
// two maps [A (x) 1; 1 (x) B].  The result is validated for degree/character
// consistency.  Throws UnsupportedExpression on non-rewritten trees.
CompiledSheaf compile_sheaf(const ExprPtr& e);

// Canonical serialized form: deterministic ordering of sum and tensor
// operands, twists folded.  Equal strings identify equal computations; used
// as the cache key.
std::string serialize(const ExprPtr& e);

// Evaluates the presenting matrix at `points` random rational points of the
// incidence variety (seeded, reproducible) and requires the rank to equal
// the declared generic rank at every one of them; a single deviation is a
// hard model error.  Constant rank certifies that the kernel is a bundle.
void certify_ranks(const CompiledSheaf& s, uint32_t p, uint64_t seed, int points = 20);

// Mini-grammar for the command line and tests:
//   expr   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := primary twist*          twist := '(' int ',' int ')'
//   primary:= 'O' '(' int ',' int ')' | 'SU2*' '(' int ')' | 'FU2' '(' int ')'
//           | 'F' '(' int ')' '[' expr ']' | 'S' '(' int ')' '[' expr ']'
//           | 'U2*' | 'U2' | 'TQ' | 'OM1' | 'OM2' | '(' expr ')'
// FU2(n) is the Frobenius pullback of the spinor subbundle; OM1/OM2 are the
// restricted cotangent powers above.  Throws UnsupportedExpression on
// malformed input.
ExprPtr parse_expr(const std::string& text);

}  // namespace flagcoh
