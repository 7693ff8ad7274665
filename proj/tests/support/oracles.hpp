#pragma once

// Reference computations for tests. Nothing here calls into the order
// engine: orders come from plain repeated multiplication.

#include <cstdint>
#include <optional>
#include <vector>

#include "uol/quad_field.hpp"

namespace uol::testing {

struct PlainMatrix {
  std::uint64_t a, b, c, d;
};

inline std::uint64_t plain_reduce(std::int64_t v, std::uint64_t m) {
  const std::int64_t sm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((v % sm) + sm) % sm);
}

inline PlainMatrix plain_mul(const PlainMatrix& x, const PlainMatrix& y,
                             std::uint64_t m) {
  auto mm = [m](std::uint64_t u, std::uint64_t v) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(u) * v % m);
  };
  return {(mm(x.a, y.a) + mm(x.b, y.c)) % m, (mm(x.a, y.b) + mm(x.b, y.d)) % m,
          (mm(x.c, y.a) + mm(x.d, y.c)) % m, (mm(x.c, y.b) + mm(x.d, y.d)) % m};
}

/// Smallest k >= 1 with A^k = I mod m, by walking powers one at a time.
inline std::optional<std::uint64_t> naive_matrix_order(const Matrix2& a,
                                                       std::uint64_t m,
                                                       std::uint64_t cap) {
  if (m == 1) return 1;
  const PlainMatrix base{plain_reduce(a.a, m), plain_reduce(a.b, m),
                         plain_reduce(a.c, m), plain_reduce(a.d, m)};
  PlainMatrix cur = base;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (cur.a == 1 && cur.b == 0 && cur.c == 0 && cur.d == 1) return k;
    cur = plain_mul(cur, base, m);
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> naive_integer_order(std::int64_t b,
                                                        std::uint64_t m) {
  if (m == 1) return 1;
  const std::uint64_t g = plain_reduce(b, m);
  std::uint64_t x = g;
  for (std::uint64_t k = 1; k <= m; ++k) {
    if (x == 1) return k;
    x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * g % m);
  }
  return std::nullopt;
}

inline bool naive_is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

/// 'S', 'I' or 'R' by counting roots of x^2 - t x + 1 mod p.
inline char naive_class(std::int64_t trace, std::uint64_t p) {
  const std::uint64_t t = plain_reduce(trace, p);
  int roots = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    if ((x * x + p * p - t * x + 1) % p == 0) ++roots;
  }
  return roots == 2 ? 'S' : roots == 0 ? 'I' : 'R';
}

struct NaivePrimeRecord {
  std::uint64_t p;
  char cls;
  std::uint64_t ord;
};

/// Brute-force records for every prime p <= limit.
inline std::vector<NaivePrimeRecord> naive_prime_records(const Matrix2& a,
                                                         std::uint64_t limit) {
  std::vector<NaivePrimeRecord> out;
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (!naive_is_prime(p)) continue;
    out.push_back({p, naive_class(a.a + a.d, p), *naive_matrix_order(a, p, 2 * p * p)});
  }
  return out;
}

/// Twenty hyperbolic SL2(Z) matrices with |trace| <= 50.
inline std::vector<Matrix2> fixed_hyperbolic_matrices() {
  return {
      {2, 1, 1, 1},   {1, 1, 1, 2},    {3, 2, 1, 1},   {5, 2, 2, 1},
      {4, 1, 3, 1},   {7, 4, 5, 3},    {-2, 1, 1, -1}, {2, 3, 1, 2},
      {1, 2, 1, 3},   {9, 2, 4, 1},    {25, -1, 1, 0}, {0, -1, 1, 50},
      {11, 30, 4, 11}, {-5, -2, -2, -1}, {3, 1, 2, 1}, {8, 3, 5, 2},
      {6, -1, 1, 0},  {18, -1, 1, 0},  {7, -1, 1, 0},  {-49, -1, 1, 0},
  };
}

}  // namespace uol::testing
