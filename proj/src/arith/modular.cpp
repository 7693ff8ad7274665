#include <string>
#include <utility>

#include "uol/arith.hpp"

namespace uol {

u64 gcd(u64 a, u64 b) {
  while (b != 0) a = std::exchange(b, a % b);
  return a;
}

u128 gcd(u128 a, u128 b) {
  while (b != 0) a = std::exchange(b, a % b);
  return a;
}

u64 pow_mod(u64 base, u64 exponent, u64 modulus) {
  if (modulus == 0) throw InvalidInput("pow_mod: modulus must be >= 1");
  if (modulus == 1) return 0;
  u64 result = 1;
  base %= modulus;
  while (exponent != 0) {
    if (exponent & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exponent >>= 1;
  }
  return result;
}

std::optional<u64> inv_mod(u64 a, u64 m) {
  if (m == 0) return std::nullopt;
  if (m == 1) return 0;
  i128 old_r = static_cast<i128>(a % m), r = static_cast<i128>(m);
  i128 old_s = 1, s = 0;
  while (r != 0) {
    const i128 q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
  }
  if (old_r != 1) return std::nullopt;
  return reduce_mod(old_s, m);
}

u64 reduce_mod(i128 a, u64 m) {
  i128 r = a % static_cast<i128>(m);
  if (r < 0) r += static_cast<i128>(m);
  return static_cast<u64>(r);
}

int jacobi(i128 a_in, u64 n) {
  if (n == 0 || (n & 1) == 0) {
    throw InvalidInput("jacobi: modulus must be odd and positive, got " +
                       std::to_string(n));
  }
  u64 a = reduce_mod(a_in, n);
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const u64 r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

int kronecker(i128 d, u64 p) {
  if (p == 2) {
    const u64 r = reduce_mod(d, 8);
    if ((r & 1) == 0) return 0;
    return (r == 1 || r == 7) ? 1 : -1;
  }
  return jacobi(d, p);
}

std::optional<u64> sqrt_mod(u64 a, u64 p) {
  if (p < 3 || (p & 1) == 0) {
    throw InvalidInput("sqrt_mod: modulus must be an odd prime");
  }
  a %= p;
  if (a == 0) return 0;
  if (jacobi(a, p) != 1) return std::nullopt;

  u64 root;
  if ((p & 3) == 3) {
    root = pow_mod(a, (p + 1) / 4, p);
  } else {
    u64 q = p - 1;
    unsigned s = 0;
    while ((q & 1) == 0) {
      q >>= 1;
      ++s;
    }
    u64 z = 2;
    while (jacobi(z, p) != -1) ++z;  // smallest non-residue
    u64 c = pow_mod(z, q, p);
    u64 t = pow_mod(a, q, p);
    root = pow_mod(a, (q + 1) / 2, p);
    unsigned m = s;
    while (t != 1) {
      unsigned i = 0;
      u64 t2 = t;
      while (t2 != 1) {
        t2 = mul_mod(t2, t2, p);
        ++i;
      }
      u64 b = c;
      for (unsigned j = 0; j + 1 < m - i; ++j) b = mul_mod(b, b, p);
      root = mul_mod(root, b, p);
      c = mul_mod(b, b, p);
      t = mul_mod(t, c, p);
      m = i;
    }
  }
  return std::min(root, p - root);
}

u128 checked_lcm(u128 a, u128 b) {
  if (a == 0 || b == 0) return 0;
  const u128 g = gcd(a, b);
  const u128 a_red = a / g;
  if (a_red > kU128Max / b) {
    throw RangeError("lcm overflows 128 bits: lcm(" + to_string(a) + ", " +
                     to_string(b) + ")");
  }
  return a_red * b;
}

u128 crt_lcm_combine(std::span<const OrderModulus> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (gcd(values[i].modulus, values[j].modulus) != 1) {
        throw InvalidInput("crt_lcm_combine: moduli " +
                           to_string(values[i].modulus) + " and " +
                           to_string(values[j].modulus) +
                           " are not coprime");
      }
    }
  }
  u128 acc = 1;
  for (const auto& v : values) acc = checked_lcm(acc, v.order);
  return acc;
}

u64 element_order(u64 g, u64 modulus, const FactoredInteger& group_exponent) {
  if (modulus == 0) throw InvalidInput("element_order: modulus must be >= 1");
  if (modulus == 1) return 1;
  g %= modulus;
  if (gcd(g, modulus) != 1) {
    throw InvalidInput("element_order: " + std::to_string(g) +
                       " is not coprime to modulus " +
                       std::to_string(modulus));
  }
  const u64 e = checked_u64(group_exponent.value(), "group exponent");
  if (pow_mod(g, e, modulus) != 1) {
    throw InvalidInput("element_order: " + std::to_string(g) + "^" +
                       std::to_string(e) + " is not 1 mod " +
                       std::to_string(modulus) +
                       " (exponent is not a multiple of the order)");
  }
  return order_from_exponent(
      g, group_exponent,
      [modulus](u64 x, u64 k) { return pow_mod(x, k, modulus); },
      [](u64 x) { return x == 1; });
}

}  // namespace uol
