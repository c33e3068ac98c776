#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "flagcoh/claims.hpp"

using namespace flagcoh;

namespace {

BettiVector bv(int64_t h0, int64_t h1, int64_t h2, int64_t h3, int64_t h4) {
  BettiVector v;
  v.h = {h0, h1, h2, h3, h4};
  return v;
}

// A realizable long-exact-sequence triple: random h(A), h(C) and connecting
// ranks r[i] = rank(H^i(C) -> H^{i+1}(A)) determine h(B) uniquely.
struct Triple {
  std::array<int64_t, 5> a{}, b{}, c{};
};

Triple random_triple(std::mt19937_64& rng) {
  std::uniform_int_distribution<int64_t> dim(0, 3);
  Triple t;
  std::array<int64_t, 5> r{};  // r[i]: rank of delta from degree i
  for (int i = 0; i < 5; ++i) {
    t.a[i] = dim(rng);
    t.c[i] = dim(rng);
  }
  for (int i = 0; i < 4; ++i) {
    const int64_t cap = std::min(t.c[i], t.a[i + 1]);
    r[i] = cap == 0 ? 0 : std::uniform_int_distribution<int64_t>(0, cap)(rng);
  }
  for (int i = 0; i < 5; ++i) {
    const int64_t prev = i > 0 ? r[i - 1] : 0;
    t.b[i] = (t.a[i] - prev) + (t.c[i] - r[i]);
  }
  return t;
}

ZeroPattern partial_knowledge(const std::array<int64_t, 5>& h,
                              std::mt19937_64& rng) {
  ZeroPattern z;
  for (int i = 0; i < 5; ++i)
    if (h[i] == 0 && (rng() & 1)) z.mark(i);
  return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Deduction primitives

TEST_CASE("zero patterns treat out-of-range degrees as vanishing") {
  ZeroPattern z;
  CHECK(z.at(-1));
  CHECK(z.at(5));
  CHECK(!z.at(2));
  z.mark(2);
  CHECK(z.at(2));
  CHECK(z.all({-1, 2, 5}));
  CHECK(!z.all({2, 3}));
  CHECK(zeros_of(bv(1, 0, 12, 0, 0)).at(1));
  CHECK(!zeros_of(bv(1, 0, 12, 0, 0)).at(2));
}

TEST_CASE("three-term inference reproduces hand oracles") {
  // 0 -> A -> B -> C -> 0 with A concentrated in degree 3, C in degree 2.
  ZeroPattern a, c;
  for (int i : {0, 1, 2, 4}) a.mark(i);
  for (int i : {0, 1, 3, 4}) c.mark(i);
  SESImplication s{{a, {}, c}};
  const ZeroPattern mid = s.infer(1);
  CHECK(mid.all({0, 1, 4}));
  CHECK(!mid.at(2));
  CHECK(!mid.at(3));

  // Middle known zero everywhere: sub vanishes where the shifted quotient
  // does, quotient vanishes where the shifted sub does.
  ZeroPattern all;
  for (int i = 0; i < 5; ++i) all.mark(i);
  SESImplication t{{{}, all, {}}};
  CHECK(t.infer(0).at(0));   // h^{-1}(C) = 0 off the edge
  CHECK(!t.infer(0).at(2));  // connecting from H^1(C) unknown
  CHECK(t.infer(2).at(4));   // h^5(A) = 0 off the edge
  CHECK(!t.infer(2).at(1));
}

TEST_CASE("inference is sound on random realizable sequences") {
  std::mt19937_64 rng(271828);
  for (int trial = 0; trial < 10000; ++trial) {
    const Triple t = random_triple(rng);
    const ZeroPattern ka = partial_knowledge(t.a, rng);
    const ZeroPattern kb = partial_knowledge(t.b, rng);
    const ZeroPattern kc = partial_knowledge(t.c, rng);
    SESImplication s{{ka, kb, kc}};
    const std::array<const std::array<int64_t, 5>*, 3> truth = {&t.a, &t.b,
                                                                &t.c};
    for (size_t target = 0; target < 3; ++target) {
      const ZeroPattern inf = s.infer(target);
      for (int d = 0; d < 5; ++d)
        if (inf.at(d)) REQUIRE((*truth[target])[d] == 0);
    }
    // chi additivity of the construction
    const int64_t chiA = chi_alternating({t.a.begin(), t.a.end()});
    const int64_t chiB = chi_alternating({t.b.begin(), t.b.end()});
    const int64_t chiC = chi_alternating({t.c.begin(), t.c.end()});
    REQUIRE(chiB == chiA + chiC);
  }
}

TEST_CASE("four-term inference is sound on chained realizable sequences") {
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int64_t> dim(0, 3);
  for (int trial = 0; trial < 10000; ++trial) {
    // 0 -> T0 -> T1 -> E -> 0 and 0 -> E -> T2 -> T3 -> 0.
    const Triple first = random_triple(rng);
    std::array<int64_t, 5> t3{}, r{}, t2{};
    for (int i = 0; i < 5; ++i) t3[i] = dim(rng);
    for (int i = 0; i < 4; ++i) {
      const int64_t cap = std::min(t3[i], first.c[i + 1]);
      r[i] = cap == 0 ? 0 : std::uniform_int_distribution<int64_t>(0, cap)(rng);
    }
    for (int i = 0; i < 5; ++i) {
      const int64_t prev = i > 0 ? r[i - 1] : 0;
      t2[i] = (first.c[i] - prev) + (t3[i] - r[i]);
    }
    const std::array<const std::array<int64_t, 5>*, 4> truth = {
        &first.a, &first.b, &t2, &t3};
    SESImplication s{{partial_knowledge(first.a, rng),
                      partial_knowledge(first.b, rng),
                      partial_knowledge(t2, rng),
                      partial_knowledge(t3, rng)}};
    for (size_t target = 0; target < 4; ++target) {
      const ZeroPattern inf = s.infer(target);
      for (int d = 0; d < 5; ++d)
        if (inf.at(d)) REQUIRE((*truth[target])[d] == 0);
    }
  }
}

TEST_CASE("alternating chi helper") {
  CHECK(chi_alternating({}) == 0);
  CHECK(chi_alternating({5}) == 5);
  CHECK(chi_alternating({1, 2, 3, 4}) == -2);
}

// ---------------------------------------------------------------------------
// Kunneth

TEST_CASE("kunneth with the structure-sheaf factor is the identity") {
  const auto out = kunneth_combine(bv(1, 0, 0, 0, 0), bv(2, 3, 5, 7, 0));
  CHECK(out == std::array<int64_t, 7>{2, 3, 5, 7, 0, 0, 0});
}

TEST_CASE("kunneth convolves degree-concentrated factors") {
  const auto out = kunneth_combine(bv(0, 0, 12, 0, 0), bv(0, 4, 0, 0, 0));
  CHECK(out == std::array<int64_t, 7>{0, 0, 0, 48, 0, 0, 0});
}

TEST_CASE("kunneth checks chi multiplicativity on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int64_t> dim(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    BettiVector l = bv(dim(rng), dim(rng), dim(rng), dim(rng), 0);
    BettiVector r = bv(dim(rng), dim(rng), dim(rng), dim(rng), 0);
    const auto out = kunneth_combine(l, r);
    int64_t chi = 0;
    for (int k = 0; k < 7; ++k) chi += (k % 2 ? -1 : 1) * out[k];
    REQUIRE(chi == l.chi() * r.chi());
    int64_t total = 0, expect = 0;
    for (int k = 0; k < 7; ++k) total += out[k];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) expect += l.h[i] * r.h[j];
    REQUIRE(total == expect);
  }
}

TEST_CASE("kunneth rejects 4-fold vectors and unstabilized results") {
  CHECK_THROWS_AS(kunneth_combine(bv(1, 0, 0, 0, 1), bv(1, 0, 0, 0, 0)),
                  ModelError);
  CohomologyResult l, r;
  l.betti = bv(1, 0, 0, 0, 0);
  l.stabilized = true;
  r.betti = bv(1, 0, 0, 0, 0);
  r.stabilized = false;
  CHECK_THROWS_AS(kunneth_combine(l, r), NotStabilized);
}

TEST_CASE("kunneth masks combine vanishing patterns") {
  ZeroPattern l, r;
  for (int i : {2, 3, 4}) l.mark(i);     // left may live in 0,1
  for (int i : {0, 2, 3, 4}) r.mark(i);  // right lives in degree 1 only
  const auto mask = kunneth_mask(l, r);
  CHECK(mask == std::array<bool, 7>{false, true, true, false, false, false,
                                    false});
  ZeroPattern unknown;  // neither factor constrained: mask must refuse
  CHECK_THROWS_AS(kunneth_mask(unknown, unknown), ModelError);
}

// ---------------------------------------------------------------------------
// Rank bookkeeping

TEST_CASE("integer polynomial arithmetic") {
  const IntPoly x = IntPoly::x_pow(1);
  const IntPoly one = IntPoly::constant(1);
  const IntPoly sq = (x + one) * (x + one);
  CHECK(sq.c == std::vector<int64_t>{1, 2, 1});
  CHECK((sq - x * x - x - x - one) == IntPoly{});
  CHECK(IntPoly::constant(0) == IntPoly{});
  CHECK(IntPoly::x_pow(3).c == std::vector<int64_t>{0, 0, 0, 1});
}

TEST_CASE("Frobenius pushforward rank identity holds for n = 1, 2, 3") {
  for (int n = 1; n <= 3; ++n) CHECK(frobenius_rank_identity(n));
}

// ---------------------------------------------------------------------------
// Registered sequences

TEST_CASE("registered sequences: inventory and chi additivity across grid") {
  const std::vector<std::pair<uint32_t, int>> grid = {
      {3, 1}, {5, 1}, {7, 1}, {3, 2}, {5, 2}};
  const std::set<std::string> expected = {
      "taut",          "taut-frob",      "taut-frob-dual",
      "taut-frob-dual-omega", "taut-frob-pitwist", "psi1-euler",
      "psi2-koszul",   "omega-tangent-adjunction", "univ",
      "univ-frob",     "univ-frob-sym2", "sym-product"};
  for (const auto& [p, n] : grid) {
    const auto seqs = standard_sequences(p, n);
    std::set<std::string> ids;
    for (const auto& s : seqs) ids.insert(s.id);
    CHECK(ids == expected);
    for (const auto& s : seqs) {
      INFO("sequence " << s.id << " at p=" << p << " n=" << n);
      CHECK(ses_chi_defect(s, p) == 0);
      CHECK((s.terms.size() == 3 || s.terms.size() == 4));
    }
  }
}

TEST_CASE("term chi spot values") {
  const auto seqs = standard_sequences(5, 1);
  for (const auto& s : seqs) {
    if (s.id != "taut-frob") continue;
    CHECK(term_chi(s.terms[0], 5) == -4);  // chi(-5,0)
    CHECK(term_chi(s.terms[1], 5) == 12);  // chi of the pulled spinor
    CHECK(term_chi(s.terms[2], 5) == 16);  // chi(5,-5)
  }
}

// ---------------------------------------------------------------------------
// Claim registry and engine-backed verification (p = 3, n = 1)

TEST_CASE("registry lists the thirteen claims in order") {
  const auto& reg = standard_claims();
  REQUIRE(reg.size() == 13);
  for (int k = 0; k < 13; ++k) {
    CHECK(reg[k].id == "C" + std::to_string(k + 1));
    CHECK(!reg[k].statement.empty());
  }
  CHECK(to_string(ClaimStatus::kVerified) == "VERIFIED");
  CHECK(to_string(ClaimStatus::kVerifiedTrusted) == "VERIFIED*");
  CHECK(to_string(ClaimStatus::kFailed) == "FAILED");
  CHECK(to_string(ClaimStatus::kSkipped) == "SKIPPED");
}

TEST_CASE("unknown claim ids are rejected") {
  EngineConfig cfg;
  ClaimContext ctx(3, 1, cfg, nullptr, 1);
  CHECK_THROWS_AS(verify_claims({"C99"}, ctx), std::invalid_argument);
}

TEST_CASE("the assembly claim demands its prerequisites") {
  EngineConfig cfg;
  ClaimContext ctx(3, 1, cfg, nullptr, 1);
  const auto& reg = standard_claims();
  const ClaimOutcome out = verify_claim(reg.back(), ctx);
  CHECK(out.status == ClaimStatus::kFailed);
  CHECK(out.diagnostic.find("prerequisite") != std::string::npos);
}

TEST_CASE("line-bundle claims verify end to end at p = 3, n = 1") {
  // The kernel-backed claims (C2, C4, C10..C12) take minutes each and are
  // exercised by the acceptance binary; this keeps the unit suite fast.
  EngineConfig cfg;
  LeafCache cache;
  ClaimContext ctx(3, 1, cfg, &cache, 20260819);
  const std::vector<std::string> ids = {"C1", "C3", "C5", "C8", "C9"};
  const auto outcomes = verify_claims(ids, ctx);
  REQUIRE(outcomes.size() == ids.size());
  for (const auto& out : outcomes) {
    INFO(out.claim << ": " << out.diagnostic);
    CHECK(out.status == ClaimStatus::kVerified);
    CHECK(out.trusted.empty());
    CHECK(out.p == 3);
    CHECK(out.n == 1);
    CHECK(!out.checks.empty());
    CHECK(out.seconds >= 0.0);
    CHECK(ctx.resolved.at(out.claim) == out.status);
  }
}
