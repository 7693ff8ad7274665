#pragma once

// Exact integer primitives: sieving, primality, factorization, modular
// arithmetic and orders in cyclic groups.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uol/error.hpp"
#include "uol/types.hpp"

namespace uol {

struct PrimePower {
  u128 prime = 0;
  u32 exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// An integer together with its complete factorization. Factors are sorted
/// by prime and every prime is proven prime.
class FactoredInteger {
 public:
  FactoredInteger() = default;

  /// Builds from factors and checks every invariant (ordering, primality,
  /// product). Throws InvalidInput on violation.
  static FactoredInteger from_factors(std::vector<PrimePower> factors);

  /// Skips the primality check; callers guarantee the factors are prime.
  static FactoredInteger from_trusted(u128 value,
                                      std::vector<PrimePower> factors);

  u128 value() const noexcept { return value_; }
  const std::vector<PrimePower>& factors() const& noexcept { return factors_; }
  std::vector<PrimePower> factors() && noexcept { return std::move(factors_); }
  bool is_one() const noexcept { return factors_.empty(); }

  friend bool operator==(const FactoredInteger&,
                         const FactoredInteger&) = default;

 private:
  u128 value_ = 1;
  std::vector<PrimePower> factors_;
};

class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(u64 limit, std::vector<u32> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  u64 limit() const noexcept { return limit_; }
  std::span<const u32> primes() const& noexcept { return primes_; }
  // Safe in range-for over a temporary table.
  std::vector<u32> primes() && noexcept { return std::move(primes_); }
  std::size_t size() const noexcept { return primes_.size(); }

  /// Binary search; only meaningful for n <= limit().
  bool contains(u64 n) const;

  /// Primes in the closed interval [lo, hi].
  std::span<const u32> range(u64 lo, u64 hi) const;

 private:
  u64 limit_ = 0;
  std::vector<u32> primes_;
};

inline constexpr u64 kSieveMaxLimit = 100'000'000;

/// Sieve of Eratosthenes over odd numbers, segmented to stay in cache.
/// Throws ResourceLimit unless 2 <= limit <= 10^8.
PrimeTable sieve_primes(u64 limit);

/// Deterministic Miller-Rabin over the full 64-bit range.
bool is_prime(u64 n);

struct FactorBudget {
  /// Total Pollard-rho iterations allowed across one factorize() call.
  u64 rho_iterations = u64{1} << 26;
};

/// Trial division by primes up to 10^5, then Miller-Rabin and Brent's
/// variant of Pollard rho with a fixed parameter schedule. Cofactors above
/// 64 bits are proven prime with a Lucas n-1 certificate. Throws
/// IncompleteFactorization when the budget runs out and InvalidInput for 0.
FactoredInteger factorize(u128 n, const FactorBudget& budget = {});

/// Complete factorization of n by trial division with the table's primes.
/// Requires table.limit()^2 >= n; throws InvalidInput otherwise.
FactoredInteger factorize_with_table(u64 n, const PrimeTable& table);

u64 gcd(u64 a, u64 b);
u128 gcd(u128 a, u128 b);

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  if ((m >> 32) == 0) return (a % m) * (b % m) % m;
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

/// base^exponent mod modulus with exact 128-bit intermediate products.
u64 pow_mod(u64 base, u64 exponent, u64 modulus);

/// Modular inverse; nullopt when gcd(a, m) != 1.
std::optional<u64> inv_mod(u64 a, u64 m);

/// Reduces a signed value into [0, m).
u64 reduce_mod(i128 a, u64 m);

/// Jacobi symbol (a/n) for odd positive n. Throws InvalidInput on even n.
int jacobi(i128 a, u64 n);

/// Kronecker symbol (D/p) for a prime p; p = 2 uses the D mod 8 rule.
int kronecker(i128 d, u64 p);

/// Tonelli-Shanks. Returns the smaller of the two roots, or nullopt for a
/// non-residue. Requires p an odd prime and a < p.
std::optional<u64> sqrt_mod(u64 a, u64 p);

struct OrderModulus {
  u128 order = 0;
  u128 modulus = 0;
};

/// lcm of the orders; the moduli must be pairwise coprime.
/// Throws InvalidInput for shared factors and RangeError on overflow.
u128 crt_lcm_combine(std::span<const OrderModulus> values);

/// lcm with overflow detection (RangeError).
u128 checked_lcm(u128 a, u128 b);

/// Minimal d >= 1 with g^d == identity, given a multiple of the order and
/// its factorization. `pow(x, e)` returns x^e in the group.
template <class Elem, class Pow, class IsIdentity>
u64 order_from_exponent(const Elem& g, const FactoredInteger& exponent,
                        Pow&& pow, IsIdentity&& is_identity) {
  const u64 e = checked_u64(exponent.value(), "group exponent");
  u64 order = 1;
  for (const auto& [prime128, mult] : exponent.factors()) {
    const u64 q = static_cast<u64>(prime128);
    u64 q_part = 1;
    for (u32 i = 0; i < mult; ++i) q_part *= q;
    Elem h = pow(g, e / q_part);
    u32 steps = 0;
    while (!is_identity(h)) {
      if (steps == mult) {
        throw InvalidInput("element is not killed by the group exponent");
      }
      h = pow(h, q);
      ++steps;
    }
    for (u32 i = 0; i < steps; ++i) order *= q;
  }
  return order;
}

/// Order of g modulo `modulus` given a multiple of it (usually the group
/// exponent). Throws InvalidInput naming the failed precondition.
u64 element_order(u64 g, u64 modulus, const FactoredInteger& group_exponent);

}  // namespace uol
