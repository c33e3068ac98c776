#include "flagcoh/sheafexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <utility>

#include "flagcoh/fp.hpp"
#include "flagcoh/geom.hpp"
#include "flagcoh/linalg.hpp"

namespace flagcoh {

namespace {

using Kind = SheafExpr::Kind;

std::shared_ptr<SheafExpr> make(Kind k) {
  auto e = std::make_shared<SheafExpr>();
  e->kind = k;
  return e;
}

int64_t int_pow(int64_t base, int exp) {
  int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

ExprPtr line_expr(const Weight& w) {
  auto e = make(Kind::Line);
  e->w = w;
  return e;
}

ExprPtr sum_expr(std::vector<ExprPtr> parts) {
  if (parts.empty()) throw UnsupportedExpression("empty sum");
  if (parts.size() == 1) return parts.front();
  auto e = make(Kind::Sum);
  for (auto& p : parts) {
    if (!p) throw UnsupportedExpression("null summand");
    if (p->kind == Kind::Sum)
      e->args.insert(e->args.end(), p->args.begin(), p->args.end());
    else
      e->args.push_back(std::move(p));
  }
  return e;
}

ExprPtr twist_expr(ExprPtr e, const Weight& w) {
  if (!e) throw UnsupportedExpression("null expression");
  if (w == Weight{0, 0}) return e;
  if (e->kind == Kind::Line) return line_expr(e->w + w);
  if (e->kind == Kind::Twist) return twist_expr(e->args.front(), e->w + w);
  auto t = make(Kind::Twist);
  t->w = w;
  t->args.push_back(std::move(e));
  return t;
}

ExprPtr tensor_expr(ExprPtr a, ExprPtr b) {
  if (!a || !b) throw UnsupportedExpression("null tensor factor");
  if (a->kind == Kind::Line) return twist_expr(std::move(b), a->w);
  if (b->kind == Kind::Line) return twist_expr(std::move(a), b->w);
  auto t = make(Kind::Tensor);
  t->args.push_back(std::move(a));
  t->args.push_back(std::move(b));
  return t;
}

ExprPtr sym_expr(int k, ExprPtr e) {
  if (!e) throw UnsupportedExpression("null expression");
  if (k < 0) throw UnsupportedExpression("negative symmetric power");
  if (k == 0) return line_expr({0, 0});
  if (e->kind == Kind::Line) return line_expr(e->w * k);
  auto s = make(Kind::Sym);
  s->k = k;
  s->args.push_back(std::move(e));
  return s;
}

ExprPtr frob_expr(int n, ExprPtr e) {
  if (!e) throw UnsupportedExpression("null expression");
  if (n < 0) throw UnsupportedExpression("negative Frobenius exponent");
  if (n == 0) return e;
  auto f = make(Kind::Frob);
  if (e->kind == Kind::Frob) {
    f->k = n + e->k;
    f->args.push_back(e->args.front());
  } else {
    f->k = n;
    f->args.push_back(std::move(e));
  }
  return f;
}

ExprPtr atom_expr(AtomId id) {
  auto e = make(Kind::Atom);
  e->atom = id;
  return e;
}

ExprPtr kernel_expr(CompiledSheaf presentation) {
  presentation.validate();
  auto e = make(Kind::Kernel);
  e->ker = std::move(presentation);
  return e;
}

ExprPtr spinor_pullback() {
  const auto chi_x = [](int i) { return variable_character(i); };
  CompiledSheaf s;
  for (int j = 0; j < 4; ++j) s.src.push_back({Weight{0, 0}, chi_x(j)});
  const int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : triples)
    s.tgt.push_back({Weight{0, 1}, chi_x(t[0]) + chi_x(t[1]) + chi_x(t[2])});
  // coefficient of e_{abc} in (sum_j f_j e_j) ^ (sum p_{uv} e_{uv})
  const int pvar[4][4] = {{-1, 4, 5, 6}, {4, -1, 7, 8}, {5, 7, -1, 9}, {6, 8, 9, -1}};
  for (int l = 0; l < 4; ++l) {
    const int* abc = triples[l];
    for (int k = 0; k < 3; ++k) {
      const int j = abc[k];
      const int u = std::min(abc[(k + 1) % 3], abc[(k + 2) % 3]);
      const int v = std::max(abc[(k + 1) % 3], abc[(k + 2) % 3]);
      Monomial m = monomial_one();
      m[pvar[u][v]] = 1;
      s.entries.push_back(
          {static_cast<int32_t>(l), static_cast<int32_t>(j), k == 1 ? -1 : 1, m});
    }
  }
  s.fiber_rank = 2;
  s.map_rank = 2;
  // filtration by the first-factor line: subline of weight (-1,0), quotient (1,-1)
  s.chi_dec = {{Weight{-1, 0}, 1}, {Weight{1, -1}, 1}};
  return kernel_expr(std::move(s));
}

namespace {

// Basis of linear forms on the hyperplane section P^4 containing the quadric:
// the six plucker coordinates modulo the isotropy relation; p24 is dropped as
// the negative of p13.
constexpr int kP4Basis[5] = {4, 5, 6, 7, 9};

// Evaluation against the tautological point: one row of the five linear
// forms, W* (x) O -> O(0,1).  Kernel = Omega^1_{P^4}(1) restricted, rank 4.
ExprPtr euler_kernel() {
  CompiledSheaf s;
  for (int i = 0; i < 5; ++i)
    s.src.push_back({Weight{0, 0}, EpsPair{0, 0} - variable_character(kP4Basis[i])});
  s.tgt.push_back({Weight{0, 1}, EpsPair{0, 0}});
  for (int i = 0; i < 5; ++i) {
    Monomial m = monomial_one();
    m[kP4Basis[i]] = 1;
    s.entries.push_back({0, static_cast<int32_t>(i), 1, m});
  }
  s.fiber_rank = 4;
  s.map_rank = 1;
  s.chi_dec = {{Weight{0, 0}, 5}, {Weight{0, 1}, -1}};
  return kernel_expr(std::move(s));
}

// Contraction with the tautological point on the second wedge power:
// /\^2 W* (x) O -> W* (x) O(0,1), f^g -> f(q) g - g(q) f.  Kernel =
// Omega^2_{P^4}(2) restricted, rank 6; matrix rank 10 - 6 = 4.
ExprPtr koszul2_kernel() {
  CompiledSheaf s;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) pairs.emplace_back(i, j);
  for (const auto& [i, j] : pairs)
    s.src.push_back({Weight{0, 0}, EpsPair{0, 0} - variable_character(kP4Basis[i]) -
                                       variable_character(kP4Basis[j])});
  for (int k = 0; k < 5; ++k)
    s.tgt.push_back({Weight{0, 1}, EpsPair{0, 0} - variable_character(kP4Basis[k])});
  for (int c = 0; c < static_cast<int>(pairs.size()); ++c) {
    const auto [i, j] = pairs[c];
    Monomial mi = monomial_one();
    mi[kP4Basis[i]] = 1;
    Monomial mj = monomial_one();
    mj[kP4Basis[j]] = 1;
    s.entries.push_back({static_cast<int32_t>(j), static_cast<int32_t>(c), 1, mi});
    s.entries.push_back({static_cast<int32_t>(i), static_cast<int32_t>(c), -1, mj});
  }
  s.fiber_rank = 6;
  s.map_rank = 4;
  s.chi_dec = {{Weight{0, 0}, 10}, {Weight{0, 1}, -5}, {Weight{0, 2}, 1}};
  return kernel_expr(std::move(s));
}

int64_t chi_of_dec(const std::vector<std::pair<Weight, int64_t>>& dec, const Weight& tw) {
  int64_t out = 0;
  for (const auto& [w, m] : dec) out += m * euler_characteristic(w + tw);
  return out;
}

// Graded pieces of S^k applied to the rank-2 bundle with filtration pieces
// lo, hi (splitting principle): i copies of hi plus (k-i) of lo, i = 0..k.
std::vector<std::pair<Weight, int64_t>> sym_pieces(int k, const Weight& lo,
                                                   const Weight& hi) {
  std::vector<std::pair<Weight, int64_t>> out;
  for (int i = 0; i <= k; ++i) out.emplace_back(hi * i + lo * (k - i), 1);
  return out;
}

void require_chi(int64_t got, int64_t want, const char* rule) {
  if (got != want)
    throw ModelError(std::string("rewrite rule ") + rule +
                     " changed the Euler characteristic: " + std::to_string(got) +
                     " vs " + std::to_string(want));
}

}  // namespace

ExprPtr frobenius_pull(const ExprPtr& e, int n, uint32_t p) {
  if (!e) throw UnsupportedExpression("null expression");
  if (n < 0) throw UnsupportedExpression("negative Frobenius exponent");
  if (n == 0) return e;
  const int64_t q = int_pow(static_cast<int64_t>(p), n);
  switch (e->kind) {
    case Kind::Line:
      return line_expr(e->w * q);
    case Kind::Twist:
      return twist_expr(frobenius_pull(e->args.front(), n, p), e->w * q);
    case Kind::Sum: {
      std::vector<ExprPtr> parts;
      for (const auto& a : e->args) parts.push_back(frobenius_pull(a, n, p));
      return sum_expr(std::move(parts));
    }
    case Kind::Tensor:
      return tensor_expr(frobenius_pull(e->args[0], n, p),
                         frobenius_pull(e->args[1], n, p));
    case Kind::Kernel: {
      CompiledSheaf s = e->ker;
      for (auto& x : s.src) {
        x.deg = x.deg * q;
        x.off = x.off * q;
      }
      for (auto& x : s.tgt) {
        x.deg = x.deg * q;
        x.off = x.off * q;
      }
      // Raising a monomial entry to the q-th power multiplies exponents by q;
      // the coefficient is fixed by Fermat (c^p = c in F_p).
      for (auto& en : s.entries) en.mono = monomial_pow(en.mono, static_cast<int>(q));
      for (auto& [w, m] : s.chi_dec) w = w * q;
      return kernel_expr(std::move(s));
    }
    default:
      throw UnsupportedExpression(
          "Frobenius pullback requires a rewritten expression");
  }
}

namespace {

ExprPtr rewrite_node(const ExprPtr& e, uint32_t p, std::vector<std::string>& markers);

ExprPtr rewrite_atom(AtomId id, uint32_t p, std::vector<std::string>& markers) {
  switch (id) {
    case AtomId::U2:
      markers.push_back(
          "U2: computed on the incidence variety through the second projection "
          "(cohomology preserved, R q_* O = O)");
      return spinor_pullback();
    case AtomId::U2Dual: {
      // det U2 = O(0,-1), so the dual is U2 twisted by (0,1).  The defining
      // sequence 0 -> U2 -> V (x) O -> U2^ -> 0 forces chi = 4 - chi(U2).
      markers.push_back("U2^: determinant twist U2 (x) O(0,1)");
      const std::vector<std::pair<Weight, int64_t>> u2 = {{Weight{-1, 0}, 1},
                                                          {Weight{1, -1}, 1}};
      require_chi(chi_of_dec(u2, {0, 1}),
                  4 * euler_characteristic({0, 0}) - chi_of_dec(u2, {0, 0}),
                  "determinant-twist");
      return twist_expr(spinor_pullback(), {0, 1});
    }
    case AtomId::TangentQ: {
      // p odd: the tangent bundle is S^2 of the dual spinor bundle.
      markers.push_back("TQ: S^2 U2^ (odd characteristic)");
      return rewrite_node(sym_expr(2, atom_expr(AtomId::U2Dual)), p, markers);
    }
    case AtomId::Omega1:
      markers.push_back("OM1: Euler kernel W* (x) O -> O(0,1)");
      return euler_kernel();
    case AtomId::Omega2:
      markers.push_back("OM2: Koszul kernel /\\^2 W* (x) O -> W* (x) O(0,1)");
      return koszul2_kernel();
  }
  throw UnsupportedExpression("unknown atom");
}

ExprPtr rewrite_node(const ExprPtr& e, uint32_t p, std::vector<std::string>& markers) {
  switch (e->kind) {
    case Kind::Line:
    case Kind::Kernel:
      return e;
    case Kind::Sum: {
      std::vector<ExprPtr> parts;
      for (const auto& a : e->args) parts.push_back(rewrite_node(a, p, markers));
      return sum_expr(std::move(parts));
    }
    case Kind::Twist:
      return twist_expr(rewrite_node(e->args.front(), p, markers), e->w);
    case Kind::Tensor:
      return tensor_expr(rewrite_node(e->args[0], p, markers),
                         rewrite_node(e->args[1], p, markers));
    case Kind::Frob:
      return frobenius_pull(rewrite_node(e->args.front(), p, markers), e->k, p);
    case Kind::Atom:
      return rewrite_atom(e->atom, p, markers);
    case Kind::Sym: {
      const ExprPtr& inner = e->args.front();
      const int k = e->k;
      if (inner->kind == Kind::Atom && inner->atom == AtomId::U2Dual) {
        // Pushforward identity: S^k U2^ = R q_* O(k,0), so its cohomology on
        // the quadric equals that of the line bundle O(k, 0).
        markers.push_back("S^" + std::to_string(k) +
                          " U2^: pushforward of O(" + std::to_string(k) + ",0)");
        require_chi(chi_of_dec(sym_pieces(k, {1, 0}, {-1, 1}), {0, 0}),
                    euler_characteristic({k, 0}), "sym-dual-pushforward");
        return line_expr({k, 0});
      }
      if (inner->kind == Kind::Atom && inner->atom == AtomId::U2) {
        // S^k U2 = S^k U2^ (x) (det U2)^k.
        markers.push_back("S^" + std::to_string(k) +
                          " U2: dualize against the determinant");
        require_chi(chi_of_dec(sym_pieces(k, {-1, 0}, {1, -1}), {0, 0}),
                    euler_characteristic({k, -k}), "sym-det-dualize");
        return line_expr({k, -k});
      }
      ExprPtr in = rewrite_node(inner, p, markers);
      if (in->kind == Kind::Line) return line_expr(in->w * k);
      if (k == 1) return in;
      throw UnsupportedExpression(
          "symmetric power of a kernel-presented bundle is not supported");
    }
  }
  throw UnsupportedExpression("unknown expression node");
}

}  // namespace

RewriteResult rewrite(const ExprPtr& e, uint32_t p) {
  if (!e) throw UnsupportedExpression("null expression");
  RewriteResult out;
  out.expr = rewrite_node(e, p, out.markers);
  return out;
}

namespace {

CompiledSheaf compile_twist(CompiledSheaf s, const Weight& w) {
  for (auto& x : s.src) x.deg = x.deg + w;
  for (auto& x : s.tgt) x.deg = x.deg + w;
  for (auto& [pw, m] : s.chi_dec) pw = pw + w;
  return s;
}

CompiledSheaf compile_sum(std::vector<CompiledSheaf> parts) {
  CompiledSheaf out;
  for (auto& p : parts) {
    const auto src_base = static_cast<int32_t>(out.src.size());
    const auto tgt_base = static_cast<int32_t>(out.tgt.size());
    out.src.insert(out.src.end(), p.src.begin(), p.src.end());
    out.tgt.insert(out.tgt.end(), p.tgt.begin(), p.tgt.end());
    for (const auto& e : p.entries)
      out.entries.push_back({e.l + tgt_base, e.j + src_base, e.coef, e.mono});
    out.fiber_rank += p.fiber_rank;
    out.map_rank += p.map_rank;
    out.chi_dec.insert(out.chi_dec.end(), p.chi_dec.begin(), p.chi_dec.end());
  }
  return out;
}

// ker(A) (x) ker(B) inside srcA (x) srcB is the kernel of the stacked map
// [A (x) 1 ; 1 (x) B] into (tgtA (x) srcB) + (srcA (x) tgtB); the stack has
// constant rank sA*sB - fA*fB wherever both factors have constant rank.
CompiledSheaf compile_tensor(const CompiledSheaf& A, const CompiledSheaf& B) {
  CompiledSheaf out;
  const auto sA = static_cast<int32_t>(A.src.size());
  const auto sB = static_cast<int32_t>(B.src.size());
  const auto tA = static_cast<int32_t>(A.tgt.size());
  const auto tB = static_cast<int32_t>(B.tgt.size());
  for (int32_t ia = 0; ia < sA; ++ia)
    for (int32_t ib = 0; ib < sB; ++ib)
      out.src.push_back(
          {A.src[ia].deg + B.src[ib].deg, A.src[ia].off + B.src[ib].off});
  for (int32_t l = 0; l < tA; ++l)
    for (int32_t ib = 0; ib < sB; ++ib)
      out.tgt.push_back(
          {A.tgt[l].deg + B.src[ib].deg, A.tgt[l].off + B.src[ib].off});
  for (int32_t ia = 0; ia < sA; ++ia)
    for (int32_t l = 0; l < tB; ++l)
      out.tgt.push_back(
          {A.src[ia].deg + B.tgt[l].deg, A.src[ia].off + B.tgt[l].off});
  for (const auto& e : A.entries)
    for (int32_t ib = 0; ib < sB; ++ib)
      out.entries.push_back({e.l * sB + ib, e.j * sB + ib, e.coef, e.mono});
  for (const auto& e : B.entries)
    for (int32_t ia = 0; ia < sA; ++ia)
      out.entries.push_back(
          {tA * sB + ia * tB + e.l, ia * sB + e.j, e.coef, e.mono});
  out.fiber_rank = A.fiber_rank * B.fiber_rank;
  out.map_rank = static_cast<int64_t>(sA) * sB - out.fiber_rank;
  for (const auto& [wa, ma] : A.chi_dec)
    for (const auto& [wb, mb] : B.chi_dec) out.chi_dec.emplace_back(wa + wb, ma * mb);
  return out;
}

}  // namespace

CompiledSheaf compile_sheaf(const ExprPtr& e) {
  if (!e) throw UnsupportedExpression("null expression");
  CompiledSheaf out;
  switch (e->kind) {
    case Kind::Line:
      out = CompiledSheaf::line(e->w);
      break;
    case Kind::Kernel:
      out = e->ker;
      break;
    case Kind::Twist:
      out = compile_twist(compile_sheaf(e->args.front()), e->w);
      break;
    case Kind::Sum: {
      std::vector<CompiledSheaf> parts;
      for (const auto& a : e->args) parts.push_back(compile_sheaf(a));
      out = compile_sum(std::move(parts));
      break;
    }
    case Kind::Tensor:
      out = compile_tensor(compile_sheaf(e->args[0]), compile_sheaf(e->args[1]));
      break;
    default:
      throw UnsupportedExpression("expression must be rewritten before compilation");
  }
  out.validate();
  return out;
}

namespace {

std::string weight_str(const Weight& w) {
  return std::to_string(w.a) + "," + std::to_string(w.b);
}

std::string kernel_str(const CompiledSheaf& s) {
  std::string out = "ker{src=";
  for (const auto& x : s.src)
    out += weight_str(x.deg) + "|" + std::to_string(x.off.e1) + "," +
           std::to_string(x.off.e2) + ";";
  out += "tgt=";
  for (const auto& x : s.tgt)
    out += weight_str(x.deg) + "|" + std::to_string(x.off.e1) + "," +
           std::to_string(x.off.e2) + ";";
  out += "ent=";
  for (const auto& e : s.entries) {
    out += std::to_string(e.l) + "," + std::to_string(e.j) + "," +
           std::to_string(e.coef) + ":";
    for (int v = 0; v < kNumVars; ++v)
      if (e.mono[v]) out += std::to_string(v) + "^" + std::to_string(e.mono[v]) + ".";
    out += ";";
  }
  out += "r=" + std::to_string(s.map_rank) + ";chi=";
  for (const auto& [w, m] : s.chi_dec)
    out += weight_str(w) + "*" + std::to_string(m) + ";";
  out += "}";
  return out;
}

}  // namespace

std::string serialize(const ExprPtr& e) {
  if (!e) throw UnsupportedExpression("null expression");
  switch (e->kind) {
    case Kind::Line:
      return "O(" + weight_str(e->w) + ")";
    case Kind::Twist:
      return "tw(" + weight_str(e->w) + "){" + serialize(e->args.front()) + "}";
    case Kind::Sum:
    case Kind::Tensor: {
      std::vector<std::string> parts;
      for (const auto& a : e->args) parts.push_back(serialize(a));
      std::sort(parts.begin(), parts.end());
      std::string out = e->kind == Kind::Sum ? "sum[" : "ten[";
      for (const auto& p : parts) out += p + ";";
      return out + "]";
    }
    case Kind::Sym:
      return "sym<" + std::to_string(e->k) + ">{" + serialize(e->args.front()) + "}";
    case Kind::Frob:
      return "frob<" + std::to_string(e->k) + ">{" + serialize(e->args.front()) + "}";
    case Kind::Atom:
      switch (e->atom) {
        case AtomId::U2: return "U2";
        case AtomId::U2Dual: return "U2^";
        case AtomId::TangentQ: return "TQ";
        case AtomId::Omega1: return "OM1";
        case AtomId::Omega2: return "OM2";
      }
      throw UnsupportedExpression("unknown atom");
    case Kind::Kernel:
      return kernel_str(e->ker);
  }
  throw UnsupportedExpression("unknown expression node");
}

void certify_ranks(const CompiledSheaf& s, uint32_t p, uint64_t seed, int points) {
  if (s.entries.empty()) {
    if (s.map_rank != 0)
      throw ModelError("empty presentation declares a nonzero matrix rank");
    return;
  }
  const PrimeField F(p);
  const std::vector<XPoint> all = enumerate_points(p);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, all.size() - 1);
  for (int it = 0; it < points; ++it) {
    const XPoint& pt = all[pick(rng)];
    // accumulate per cell: several entries may address the same (row, column)
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
    Rref reducer(F, static_cast<int32_t>(s.src.size()));
    int64_t rank = 0;
    for (const auto& d : dense) {
      SparseRow r;
      for (int32_t j = 0; j < static_cast<int32_t>(d.size()); ++j)
        if (d[j]) r.push_back({j, d[j]});
      if (reducer.add_row(std::move(r))) ++rank;
    }
    if (rank != s.map_rank)
      throw ModelError("constant-rank certificate failed at sample " +
                       std::to_string(it) + ": rank " + std::to_string(rank) +
                       ", declared " + std::to_string(s.map_rank));
  }
}

namespace {

struct Parser {
  const std::string& s;
  size_t i = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(const char* kw) {
    skip();
    const size_t n = std::char_traits<char>::length(kw);
    if (s.compare(i, n, kw) != 0) return false;
    i += n;
    return true;
  }
  void expect(char c) {
    skip();
    if (i >= s.size() || s[i] != c)
      throw UnsupportedExpression(std::string("expected '") + c + "' at offset " +
                                  std::to_string(i) + " in expression");
    ++i;
  }
  int64_t integer() {
    skip();
    const size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
      throw UnsupportedExpression("expected an integer at offset " +
                                  std::to_string(start));
    return std::strtoll(s.c_str() + start, nullptr, 10);
  }
  Weight weight_args() {
    expect('(');
    const int64_t a = integer();
    expect(',');
    const int64_t b = integer();
    expect(')');
    return {a, b};
  }
  int int_arg() {
    expect('(');
    const int64_t k = integer();
    expect(')');
    return static_cast<int>(k);
  }

  ExprPtr expr() {
    ExprPtr out = term();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '+') {
        ++i;
        out = sum_expr({out, term()});
      } else {
        return out;
      }
    }
  }
  ExprPtr term() {
    ExprPtr out = factor();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        out = tensor_expr(out, factor());
      } else {
        return out;
      }
    }
  }
  ExprPtr factor() {
    ExprPtr out = primary();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '(')
        out = twist_expr(out, weight_args());
      else
        return out;
    }
  }
  ExprPtr primary() {
    skip();
    if (eat("SU2*")) return sym_expr(int_arg(), atom_expr(AtomId::U2Dual));
    if (eat("FU2")) return frob_expr(int_arg(), atom_expr(AtomId::U2));
    // 'U2*' is the dual atom only when the star cannot open a tensor factor
    if (s.compare(i, 3, "U2*") == 0 &&
        !(i + 3 < s.size() && std::isalpha(static_cast<unsigned char>(s[i + 3])))) {
      i += 3;
      return atom_expr(AtomId::U2Dual);
    }
    if (eat("U2")) return atom_expr(AtomId::U2);
    if (eat("TQ")) return atom_expr(AtomId::TangentQ);
    if (eat("OM1")) return atom_expr(AtomId::Omega1);
    if (eat("OM2")) return atom_expr(AtomId::Omega2);
    if (eat("O")) return line_expr(weight_args());
    if (eat("F")) {
      const int n = int_arg();
      expect('[');
      ExprPtr inner = expr();
      expect(']');
      return frob_expr(n, inner);
    }
    if (eat("S")) {
      const int k = int_arg();
      expect('[');
      ExprPtr inner = expr();
      expect(']');
      return sym_expr(k, inner);
    }
    if (eat("(")) {
      ExprPtr inner = expr();
      expect(')');
      return inner;
    }
    throw UnsupportedExpression("unrecognized expression at offset " +
                                std::to_string(i));
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& text) {
  Parser p(text);
  ExprPtr out = p.expr();
  p.skip();
  if (p.i != text.size())
    throw UnsupportedExpression("trailing input at offset " + std::to_string(p.i));
  return out;
}

}  // namespace flagcoh
