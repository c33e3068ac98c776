#pragma once

#include <cassert>
#include <cstdint>

namespace flagcoh {

// Arithmetic in the prime field F_p for a runtime modulus p.
// Elements are canonical representatives in [0, p).
struct PrimeField {
  uint32_t p;

  explicit PrimeField(uint32_t p_) : p(p_) { assert(p >= 2); }

  uint32_t reduce(int64_t x) const {
    int64_t r = x % static_cast<int64_t>(p);
    if (r < 0) r += static_cast<int64_t>(p);
    return static_cast<uint32_t>(r);
  }
  uint32_t add(uint32_t x, uint32_t y) const {
    uint32_t s = x + y;
    return s >= p ? s - p : s;
  }
  uint32_t sub(uint32_t x, uint32_t y) const { return x >= y ? x - y : x + p - y; }
  uint32_t neg(uint32_t x) const { return x == 0 ? 0 : p - x; }
  uint32_t mul(uint32_t x, uint32_t y) const {
    return static_cast<uint32_t>(static_cast<uint64_t>(x) * y % p);
  }
  uint32_t pow(uint32_t x, uint64_t e) const {
    uint64_t base = x % p;
    uint64_t acc = 1;
    while (e) {
      if (e & 1) acc = acc * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return static_cast<uint32_t>(acc);
  }
  uint32_t inv(uint32_t x) const {
    assert(x % p != 0);
    return pow(x, p - 2);
  }
};

}  // namespace flagcoh
