#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "flagcoh/linalg.hpp"

using namespace flagcoh;

namespace {

SparseRow make_row(const std::vector<int64_t>& dense, const PrimeField& F) {
  SparseRow r;
  for (size_t i = 0; i < dense.size(); ++i) {
    uint32_t v = F.reduce(dense[i]);
    if (v) r.emplace_back(static_cast<int32_t>(i), v);
  }
  return r;
}

std::vector<SparseRow> make_rows(const std::vector<std::vector<int64_t>>& m,
                                 const PrimeField& F) {
  std::vector<SparseRow> rows;
  for (const auto& d : m) rows.push_back(make_row(d, F));
  return rows;
}

}  // namespace

TEST_CASE("prime field arithmetic") {
  for (uint32_t p : {3u, 5u, 7u, 101u}) {
    PrimeField F(p);
    CHECK(F.reduce(-3) == p - 3);
    CHECK(F.reduce(p) == 0);
    CHECK(F.reduce(2 * static_cast<int64_t>(p) + 1) == 1);
    for (uint32_t x = 1; x < p; ++x) {
      CHECK(F.mul(x, F.inv(x)) == 1);
      CHECK(F.add(x, F.neg(x)) == 0);
      CHECK(F.sub(0, x) == F.neg(x));
    }
    CHECK(F.pow(2, 0) == 1);
    uint32_t acc = 1;
    for (int e = 1; e < 12; ++e) {
      acc = F.mul(acc, 2);
      CHECK(F.pow(2, e) == acc);
    }
  }
}

TEST_CASE("row axpy merges and cancels") {
  PrimeField F(5);
  SparseRow a = {{0, 1}, {2, 3}};
  SparseRow b = {{0, 2}, {1, 1}, {2, 1}};
  // a + 2*b = (1+4, 2, 3+2) = (0, 2, 0) mod 5
  SparseRow r = row_axpy(F, a, 2, b);
  REQUIRE(r.size() == 1);
  CHECK(r[0].first == 1);
  CHECK(r[0].second == 2);
  CHECK(row_is_normalized(r, F));
}

TEST_CASE("rank of known matrices") {
  PrimeField F5(5), F7(7);
  CHECK(rank_of(F5, 3, make_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, F5)) == 3);
  CHECK(rank_of(F5, 2, make_rows({{1, 2}, {2, 4}}, F5)) == 1);
  CHECK(rank_of(F5, 4, make_rows({{1, 2, 3, 4}, {2, 4, 6, 8}, {1, 1, 1, 1}}, F5)) == 2);
  // det = 2*3 - 1*1 = 5: drops rank exactly at p = 5.
  CHECK(rank_of(F5, 2, make_rows({{2, 1}, {1, 3}}, F5)) == 1);
  CHECK(rank_of(F7, 2, make_rows({{2, 1}, {1, 3}}, F7)) == 2);
  CHECK(rank_of(F5, 3, {}) == 0);
  CHECK(rank_of(F5, 3, make_rows({{0, 0, 0}}, F5)) == 0);
}

TEST_CASE("rref is canonical under insertion order") {
  PrimeField F(7);
  std::vector<std::vector<int64_t>> m = {
      {1, 2, 0, 3}, {2, 4, 1, 0}, {0, 0, 3, 1}, {1, 2, 1, 4}};
  auto rows = make_rows(m, F);

  Rref a(F, 4);
  for (const auto& r : rows) a.add_row(r);
  a.finalize();

  Rref b(F, 4);
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) b.add_row(*it);
  b.finalize();

  CHECK(a.rank() == b.rank());
  REQUIRE(a.pivot_cols() == b.pivot_cols());
  for (int32_t c : a.pivot_cols()) CHECK(a.row_with_pivot(c) == b.row_with_pivot(c));
  // Residues agree on arbitrary vectors.
  SparseRow v = make_row({1, 1, 1, 1}, F);
  CHECK(a.reduce(v) == b.reduce(v));
}

TEST_CASE("reduce yields zero exactly on the span") {
  PrimeField F(5);
  Rref rr(F, 4);
  rr.add_row(make_row({1, 2, 0, 3}, F));
  rr.add_row(make_row({0, 0, 1, 1}, F));
  rr.finalize();

  // In span: 2*(first) + 1*(second).
  CHECK(rr.reduce(make_row({2, 4, 1, 2}, F)).empty());
  // Not in span: residue supported on free columns only.
  SparseRow res = rr.reduce(make_row({0, 1, 0, 0}, F));
  REQUIRE(!res.empty());
  for (const auto& [col, val] : res) {
    (void)val;
    bool is_pivot = false;
    for (int32_t pc : rr.pivot_cols()) is_pivot |= (pc == col);
    CHECK(!is_pivot);
  }
}

TEST_CASE("kernel basis of a small matrix") {
  PrimeField F(5);
  auto kb = kernel_basis(F, 3, make_rows({{1, 0, 1}, {0, 1, 1}}, F));
  REQUIRE(kb.vectors.size() == 1);
  REQUIRE(kb.free_cols == std::vector<int32_t>{2});
  // Kernel vector: (-1, -1, 1).
  SparseRow expected = {{0, 4}, {1, 4}, {2, 1}};
  CHECK(kb.vectors[0] == expected);
}

TEST_CASE("kernel vectors are annihilated and independent") {
  std::mt19937 rng(12345);
  for (uint32_t p : {3u, 5u, 7u}) {
    PrimeField F(p);
    for (int trial = 0; trial < 20; ++trial) {
      int32_t nrows = 1 + static_cast<int32_t>(rng() % 6);
      int32_t ncols = 1 + static_cast<int32_t>(rng() % 8);
      std::vector<SparseRow> rows(nrows);
      for (auto& r : rows) {
        for (int32_t c = 0; c < ncols; ++c) {
          uint32_t v = rng() % p;
          if (v) r.emplace_back(c, v);
        }
      }
      int64_t rank = rank_of(F, ncols, rows);
      auto kb = kernel_basis(F, ncols, rows);
      CHECK(static_cast<int64_t>(kb.vectors.size()) == ncols - rank);
      for (const auto& v : kb.vectors) {
        CHECK(row_is_normalized(v, F));
        CHECK(matrix_apply(F, rows, v).empty());
      }
      CHECK(rank_of(F, ncols, kb.vectors) ==
            static_cast<int64_t>(kb.vectors.size()));
    }
  }
}

TEST_CASE("matrix apply") {
  PrimeField F(7);
  auto rows = make_rows({{1, 2, 3}, {0, 1, 0}}, F);
  SparseRow v = {{0, 1}, {1, 1}};  // (1, 1, 0)
  SparseRow out = matrix_apply(F, rows, v);
  SparseRow expected = {{0, 3}, {1, 1}};
  CHECK(out == expected);
  // (1, 0, 2) is annihilated by row 0 mod 7 and by row 1 exactly.
  SparseRow w = {{0, 1}, {2, 2}};
  CHECK(matrix_apply(F, rows, w).empty());
}
