#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "flagcoh/geom.hpp"
#include "flagcoh/groebner.hpp"
#include "flagcoh/linalg.hpp"
#include "flagcoh/sheafexpr.hpp"

using namespace flagcoh;

namespace {

int64_t chi(const Weight& w) { return euler_characteristic(w); }

int64_t rank_at_point(const CompiledSheaf& s, const XPoint& pt, const PrimeField& F) {
  std::vector<std::vector<uint32_t>> dense(s.tgt.size(),
                                           std::vector<uint32_t>(s.src.size(), 0));
  for (const auto& e : s.entries) {
    uint32_t val = F.reduce(e.coef);
    for (int v = 0; v < kNumVars; ++v)
      if (e.mono[v]) {
        const uint32_t c = v < kNumX ? pt.x[v] : pt.pl[v - kNumX];
        val = F.mul(val, F.pow(c, static_cast<uint64_t>(e.mono[v])));
      }
    dense[e.l][e.j] = F.add(dense[e.l][e.j], val);
  }
  std::vector<SparseRow> rows;
  for (const auto& d : dense) {
    SparseRow r;
    for (int32_t j = 0; j < static_cast<int32_t>(d.size()); ++j)
      if (d[j]) r.push_back({j, d[j]});
    rows.push_back(std::move(r));
  }
  return rank_of(F, static_cast<int32_t>(s.src.size()), std::move(rows));
}

void compositions(int total, int vars, std::vector<int16_t>& acc,
                  std::vector<std::vector<int16_t>>& out) {
  if (static_cast<int>(acc.size()) == vars - 1) {
    acc.push_back(static_cast<int16_t>(total));
    out.push_back(acc);
    acc.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    acc.push_back(static_cast<int16_t>(v));
    compositions(total - v, vars, acc, out);
    acc.pop_back();
  }
}

// Every standard monomial of the given bidegree, by brute enumeration.
std::vector<Monomial> brute_standard(const GroebnerBasis& gb, int dx, int dp) {
  std::vector<std::vector<int16_t>> xs, ps;
  std::vector<int16_t> acc;
  compositions(dx, kNumX, acc, xs);
  compositions(dp, kNumP, acc, ps);
  std::vector<Monomial> out;
  for (const auto& xv : xs)
    for (const auto& pv : ps) {
      Monomial m{};
      for (int v = 0; v < kNumX; ++v) m[v] = xv[v];
      for (int v = 0; v < kNumP; ++v) m[kNumX + v] = pv[v];
      if (gb.is_standard(m)) out.push_back(m);
    }
  return out;
}

struct EpsLess {
  bool operator()(const EpsPair& a, const EpsPair& b) const {
    return a.e1 != b.e1 ? a.e1 < b.e1 : a.e2 < b.e2;
  }
};

// Sections of a kernel presentation at denominator exponent K, two ways:
// one global nullspace over all standard monomials at once (raw normal-form
// reduction), and once split into torus-character blocks through the cached
// graded pieces.  Both dimensions must agree, and the matrix must be exactly
// block-diagonal for the splitting.
void splitting_check(const CompiledSheaf& s, uint32_t p, int K) {
  QuotientRing& ring = QuotientRing::for_prime(p);
  const GroebnerBasis& gb = ring.gb();
  const PrimeField& F = gb.field();

  struct Col {
    int j;
    Monomial m;
    EpsPair mu;
  };
  std::vector<Col> cols;
  std::map<int, std::map<uint64_t, int>> row_index;
  int nrows = 0;
  std::vector<EpsPair> row_mu;
  for (int l = 0; l < static_cast<int>(s.tgt.size()); ++l) {
    const auto& t = s.tgt[l];
    for (const auto& m : brute_standard(gb, K + static_cast<int>(t.deg.a),
                                        K + static_cast<int>(t.deg.b))) {
      row_index[l][monomial_key(m)] = nrows;
      row_mu.push_back(monomial_character(m) - t.off);
      ++nrows;
    }
  }
  for (int j = 0; j < static_cast<int>(s.src.size()); ++j) {
    const auto& sc = s.src[j];
    for (const auto& m : brute_standard(gb, K + static_cast<int>(sc.deg.a),
                                        K + static_cast<int>(sc.deg.b)))
      cols.push_back({j, m, monomial_character(m) - sc.off});
  }

  // global matrix, one sparse column vector per source basis element
  std::vector<SparseRow> colvecs(cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    std::map<int32_t, uint32_t> accum;
    for (const auto& e : s.entries) {
      if (e.j != cols[c].j) continue;
      const uint32_t lead = F.reduce(e.coef);
      if (!lead) continue;
      Poly prod = gb.normal_form({{monomial_mul(cols[c].m, e.mono), lead}});
      for (const auto& [m, cf] : prod) {
        const auto it = row_index.find(e.l);
        REQUIRE(it != row_index.end());
        const auto mit = it->second.find(monomial_key(m));
        REQUIRE(mit != it->second.end());
        const int32_t r = mit->second;
        accum[r] = F.add(accum[r], cf);
        CHECK(row_mu[r] == cols[c].mu);  // block-diagonal in the character
      }
    }
    for (const auto& [r, cf] : accum)
      if (cf) colvecs[c].push_back({r, cf});
  }
  const int64_t global_rank = rank_of(F, nrows, colvecs);
  const int64_t global_null = static_cast<int64_t>(cols.size()) - global_rank;

  // per-character blocks through the graded-piece cache
  std::map<EpsPair, std::vector<int>, EpsLess> by_mu;
  for (size_t c = 0; c < cols.size(); ++c) by_mu[cols[c].mu].push_back(static_cast<int>(c));
  int64_t split_null = 0;
  for (const auto& [mu, members] : by_mu) {
    std::vector<SparseRow> block;
    for (int c : members) block.push_back(colvecs[c]);
    split_null += static_cast<int64_t>(members.size()) - rank_of(F, nrows, block);
    // the piece dimensions agree with brute enumeration, summand by summand
    std::map<int, int> per_summand;
    for (int c : members) per_summand[cols[c].j]++;
    for (const auto& [j, cnt] : per_summand) {
      const auto& sc = s.src[j];
      CHECK(ring.piece(K + static_cast<int>(sc.deg.a), K + static_cast<int>(sc.deg.b),
                       mu + sc.off)
                .dim() == cnt);
    }
  }
  CHECK(split_null == global_null);
}

}  // namespace

TEST_CASE("spinor presentation declares rank two and zero Euler characteristic") {
  ExprPtr sp = spinor_pullback();
  REQUIRE(sp->kind == SheafExpr::Kind::Kernel);
  CHECK(sp->ker.fiber_rank == 2);
  CHECK(sp->ker.map_rank == 2);
  CHECK(sp->ker.src.size() == 4);
  CHECK(sp->ker.tgt.size() == 4);
  CHECK(sp->ker.expected_chi() == chi({-1, 0}) + chi({1, -1}));
  CHECK(sp->ker.expected_chi() == 0);
}

TEST_CASE("spinor matrix has rank two at the distinguished fixed point") {
  const PrimeField F(3);
  XPoint pt{};
  pt.x = {1, 0, 0, 0};
  pt.pl = {1, 0, 0, 0, 0, 0};
  CHECK(rank_at_point(spinor_pullback()->ker, pt, F) == 2);
}

TEST_CASE("Frobenius pullback scales lines and folds repeated application") {
  ExprPtr l = frobenius_pull(line_expr({1, -1}), 1, 3);
  REQUIRE(l->kind == SheafExpr::Kind::Line);
  CHECK(l->w == Weight{3, -3});
  ExprPtr id = frobenius_pull(line_expr({1, -1}), 0, 3);
  CHECK(id->w == Weight{1, -1});
  ExprPtr nested = frob_expr(2, frob_expr(1, atom_expr(AtomId::U2)));
  CHECK(nested->k == 3);
  CHECK(serialize(nested) == "frob<3>{U2}");
}

TEST_CASE("Frobenius pullback of the spinor keeps the declared ranks") {
  for (uint32_t p : {3u, 5u})
    for (int n : {1, 2}) {
      ExprPtr f = frobenius_pull(spinor_pullback(), n, p);
      REQUIRE(f->kind == SheafExpr::Kind::Kernel);
      int64_t q = 1;
      for (int i = 0; i < n; ++i) q *= p;
      CHECK(f->ker.tgt.front().deg == Weight{0, q});
      for (const auto& e : f->ker.entries) {
        int total = 0;
        for (int v = 0; v < kNumVars; ++v) total += e.mono[v];
        CHECK(total == q);
      }
      certify_ranks(f->ker, p, /*seed=*/0x5eed + n, 20);
    }
}

TEST_CASE("constant-rank certificates accept the atoms and reject a lie") {
  for (uint32_t p : {3u, 5u}) {
    certify_ranks(spinor_pullback()->ker, p, 11, 20);
    certify_ranks(compile_sheaf(rewrite(atom_expr(AtomId::Omega1), p).expr), p, 12, 20);
    certify_ranks(compile_sheaf(rewrite(atom_expr(AtomId::Omega2), p).expr), p, 13, 20);
  }
  CompiledSheaf bad = spinor_pullback()->ker;
  bad.map_rank = 3;
  CHECK_THROWS_AS(certify_ranks(bad, 3, 14, 20), ModelError);
}

TEST_CASE("symmetric powers of the dual spinor push forward to lines") {
  for (uint32_t p : {3u, 5u})
    for (int n : {1, 2}) {
      int64_t q = 1;
      for (int i = 0; i < n; ++i) q *= p;
      RewriteResult r = rewrite(sym_expr(static_cast<int>(q), atom_expr(AtomId::U2Dual)), p);
      REQUIRE(r.expr->kind == SheafExpr::Kind::Line);
      CHECK(r.expr->w == Weight{q, 0});
      CHECK(!r.markers.empty());
    }
  // twisted variant: S^(q-2) of the dual, twisted by the second factor
  RewriteResult r5 = rewrite(twist_expr(sym_expr(3, atom_expr(AtomId::U2Dual)), {0, -2}), 5);
  REQUIRE(r5.expr->kind == SheafExpr::Kind::Line);
  CHECK(r5.expr->w == Weight{3, -2});
  RewriteResult r9 = rewrite(twist_expr(sym_expr(7, atom_expr(AtomId::U2Dual)), {0, -2}), 3);
  CHECK(r9.expr->w == Weight{7, -2});
}

TEST_CASE("chi neutrality of the pushforward rule across the working grid") {
  for (int64_t q : {3, 5, 9, 25})
    for (int k = 0; k <= 2 * q; ++k)
      for (int64_t m : {-2, 0, 1}) {
        int64_t pieces = 0;
        for (int i = 0; i <= k; ++i) pieces += chi({2 * i - k, k - i + m});
        CHECK(pieces == chi({k, m}));
      }
}

TEST_CASE("dual spinor rewrites through the determinant twist") {
  RewriteResult r = rewrite(atom_expr(AtomId::U2Dual), 3);
  CompiledSheaf c = compile_sheaf(r.expr);
  CHECK(c.fiber_rank == 2);
  CHECK(c.src.front().deg == Weight{0, 1});
  CHECK(c.expected_chi() == 4);
}

TEST_CASE("quadric tangent bundle rewrites to the degree-two line") {
  RewriteResult r = rewrite(atom_expr(AtomId::TangentQ), 5);
  REQUIRE(r.expr->kind == SheafExpr::Kind::Line);
  CHECK(r.expr->w == Weight{2, 0});
}

TEST_CASE("the mixed Frobenius leaf compiles to a twisted kernel") {
  ExprPtr e = parse_expr("F(1)[U2*] * SU2*(3)");
  RewriteResult r = rewrite(e, 3);
  CompiledSheaf c = compile_sheaf(r.expr);
  REQUIRE(c.src.size() == 4);
  CHECK(c.fiber_rank == 2);
  for (const auto& x : c.src) CHECK(x.deg == Weight{3, 3});
  for (const auto& x : c.tgt) CHECK(x.deg == Weight{3, 6});
  CHECK(c.expected_chi() == chi({0, 3}) + chi({6, 0}));
  certify_ranks(c, 3, 15, 20);
}

TEST_CASE("sums and tensor products compile blockwise") {
  CompiledSheaf s =
      compile_sheaf(sum_expr({line_expr({1, 0}), line_expr({0, 1})}));
  CHECK(s.src.size() == 2);
  CHECK(s.expected_chi() == chi({1, 0}) + chi({0, 1}));

  ExprPtr a = spinor_pullback();
  ExprPtr b = rewrite(atom_expr(AtomId::Omega1), 3).expr;
  CompiledSheaf t = compile_sheaf(tensor_expr(a, b));
  CHECK(t.src.size() == 20);
  CHECK(t.tgt.size() == 24);
  CHECK(t.fiber_rank == 8);
  CHECK(t.map_rank == 12);
  // product of the two filtrations: 5 chi(-1,0) - chi(-1,1) + 5 chi(1,-1) - chi(1,0)
  CHECK(t.expected_chi() == 5 * chi({-1, 0}) - chi({-1, 1}) + 5 * chi({1, -1}) - chi({1, 0}));
  CHECK(t.expected_chi() == -4);
  certify_ranks(t, 3, 16, 20);
}

TEST_CASE("serialization is canonical") {
  ExprPtr a = line_expr({1, 0});
  ExprPtr b = atom_expr(AtomId::U2);
  CHECK(serialize(sum_expr({a, b})) == serialize(sum_expr({b, a})));
  CHECK(serialize(twist_expr(twist_expr(b, {0, 1}), {1, 0})) ==
        serialize(twist_expr(b, {1, 1})));
  CHECK(serialize(twist_expr(a, {2, 2})) == "O(3,2)");
  CHECK(serialize(spinor_pullback()) == serialize(spinor_pullback()));
  CHECK(serialize(frob_expr(1, b)) != serialize(frob_expr(2, b)));
}

TEST_CASE("parser round trips the documented grammar") {
  CHECK(parse_expr("O(3,-3)")->w == Weight{3, -3});
  CHECK(serialize(parse_expr("FU2(1)")) == "frob<1>{U2}");
  CHECK(serialize(parse_expr("SU2*(3)(0,-2)")) == "tw(0,-2){sym<3>{U2^}}");
  CHECK(serialize(parse_expr("U2*(0,1)")) == "tw(0,1){U2^}");
  CHECK(serialize(parse_expr("U2 * O(0,1)")) == "tw(0,1){U2}");
  CHECK(serialize(parse_expr("U2*O(0,1)")) == "tw(0,1){U2}");
  CHECK(serialize(parse_expr("O(1,0) + O(0,1)")) == "sum[O(0,1);O(1,0);]");
  CHECK(parse_expr(" TQ ")->atom == AtomId::TangentQ);
  CHECK_THROWS_AS(parse_expr("O(1,"), UnsupportedExpression);
  CHECK_THROWS_AS(parse_expr("O(1,0) junk"), UnsupportedExpression);
  CHECK_THROWS_AS(parse_expr("Q3"), UnsupportedExpression);
}

TEST_CASE("symmetric powers of kernel-presented bundles are rejected") {
  ExprPtr e = parse_expr("S(2)[FU2(1)]");
  CHECK_THROWS_AS(rewrite(e, 3), UnsupportedExpression);
  CHECK_THROWS_AS(compile_sheaf(atom_expr(AtomId::U2)), UnsupportedExpression);
}

TEST_CASE("kernel sections split by torus character") {
  for (int K : {1, 2}) {
    splitting_check(spinor_pullback()->ker, 3, K);
    splitting_check(compile_sheaf(rewrite(atom_expr(AtomId::Omega1), 3).expr), 3, K);
  }
}
