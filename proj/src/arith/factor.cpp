#include <algorithm>
#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "uol/arith.hpp"

namespace uol {

namespace {

using boost::multiprecision::uint256_t;

constexpr u64 kTrialLimit = 100'000;

const PrimeTable& trial_primes() {
  static const PrimeTable table = sieve_primes(kTrialLimit);
  return table;
}

u128 mul_mod128(u128 a, u128 b, u128 m) {
  if (m <= kU64Max) {
    return static_cast<u64>(a % m) * static_cast<u128>(static_cast<u64>(b % m)) % m;
  }
  const uint256_t prod = uint256_t(a) * uint256_t(b) % uint256_t(m);
  return static_cast<u128>(prod);
}

u128 pow_mod128(u128 base, u128 exponent, u128 m) {
  u128 result = 1 % m;
  base %= m;
  while (exponent != 0) {
    if (exponent & 1) result = mul_mod128(result, base, m);
    base = mul_mod128(base, base, m);
    exponent >>= 1;
  }
  return result;
}

class Budget {
 public:
  explicit Budget(u64 iterations) : left_(iterations) {}
  void spend(u64 n, u128 target) {
    if (n > left_) {
      throw IncompleteFactorization(
          "factorization of " + to_string(target) +
          " did not complete within the Pollard-rho effort budget");
    }
    left_ -= n;
  }

 private:
  u64 left_;
};

// Brent's cycle detection with f(x) = x^2 + c and a fixed start of 2.
template <class T, class MulMod>
T brent_rho(T n, T c, Budget& budget, MulMod mul) {
  auto f = [&](T x) {
    const T y = mul(x, x, n);
    return y >= n - c ? y - (n - c) : y + c;
  };
  auto absdiff = [](T a, T b) { return a > b ? a - b : b - a; };
  constexpr u64 kBatch = 128;
  T y = 2, x = 2, ys = 2, q = 1, g = 1;
  u64 r = 1;
  while (g == 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    budget.spend(r, n);
    u64 k = 0;
    while (k < r && g == 1) {
      ys = y;
      const u64 steps = std::min(kBatch, r - k);
      for (u64 i = 0; i < steps; ++i) {
        y = f(y);
        q = mul(q, absdiff(x, y), n);
      }
      budget.spend(steps, n);
      g = gcd(q, n);
      k += steps;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = f(ys);
      budget.spend(1, n);
      g = gcd(absdiff(x, ys), n);
    } while (g == 1);
  }
  return g;
}

u128 find_divisor(u128 n, Budget& budget) {
  for (u64 c = 1;; ++c) {
    u128 d;
    if (n <= kU64Max) {
      d = brent_rho<u64>(static_cast<u64>(n), c, budget,
                         [](u64 a, u64 b, u64 m) { return mul_mod(a, b, m); });
    } else {
      d = brent_rho<u128>(n, c, budget, mul_mod128);
    }
    if (d != 1 && d != n) return d;
  }
}

bool probable_prime128(u128 n) {
  u128 d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
    u128 x = pow_mod128(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mul_mod128(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

void split(u128 n, std::map<u128, u32>& out, Budget& budget);

// Lucas n-1 certificate: for every prime q | n-1 some base a has
// a^(n-1) = 1 and a^((n-1)/q) != 1.
bool prove_prime128(u128 n, Budget& budget) {
  std::map<u128, u32> parts;
  u128 m = n - 1;
  for (u32 p : trial_primes().primes()) {
    if (m % p == 0) {
      u32 e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      parts[p] = e;
    }
  }
  split(m, parts, budget);
  for (const auto& [q, e] : parts) {
    bool witnessed = false;
    for (u64 a = 2; a < 1000 && !witnessed; ++a) {
      if (pow_mod128(a, n - 1, n) != 1) return false;
      if (pow_mod128(a, (n - 1) / q, n) != 1) witnessed = true;
    }
    if (!witnessed) return false;
  }
  return true;
}

void split(u128 n, std::map<u128, u32>& out, Budget& budget) {
  if (n == 1) return;
  if (n <= kU64Max) {
    if (is_prime(static_cast<u64>(n))) {
      ++out[n];
      return;
    }
  } else if (probable_prime128(n)) {
    if (!prove_prime128(n, budget)) {
      throw IncompleteFactorization("could not certify primality of " +
                                    to_string(n));
    }
    ++out[n];
    return;
  }
  const u128 d = find_divisor(n, budget);
  split(d, out, budget);
  split(n / d, out, budget);
}

}  // namespace

FactoredInteger FactoredInteger::from_trusted(u128 value,
                                              std::vector<PrimePower> factors) {
  FactoredInteger f;
  f.value_ = value;
  f.factors_ = std::move(factors);
  return f;
}

FactoredInteger FactoredInteger::from_factors(std::vector<PrimePower> factors) {
  u128 value = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& pp = factors[i];
    if (pp.exponent == 0) throw InvalidInput("factor with zero exponent");
    if (i > 0 && factors[i - 1].prime >= pp.prime) {
      throw InvalidInput("factors must be strictly increasing by prime");
    }
    if (pp.prime > kU64Max) {
      if (!probable_prime128(pp.prime)) {
        throw InvalidInput(to_string(pp.prime) + " is not prime");
      }
    } else if (!is_prime(static_cast<u64>(pp.prime))) {
      throw InvalidInput(to_string(pp.prime) + " is not prime");
    }
    for (u32 k = 0; k < pp.exponent; ++k) {
      if (value > kU128Max / pp.prime) {
        throw RangeError("factored value exceeds 128 bits");
      }
      value *= pp.prime;
    }
  }
  return from_trusted(value, std::move(factors));
}

FactoredInteger factorize(u128 n, const FactorBudget& budget_cfg) {
  if (n == 0) throw InvalidInput("factorize: n must be >= 1");
  std::map<u128, u32> found;
  u128 rest = n;
  for (u32 p : trial_primes().primes()) {
    if (static_cast<u128>(p) * p > rest) break;
    if (rest % p == 0) {
      u32 e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      found[p] = e;
    }
  }
  if (rest != 1) {
    if (rest < static_cast<u128>(kTrialLimit) * kTrialLimit) {
      ++found[rest];
    } else {
      Budget budget(budget_cfg.rho_iterations);
      split(rest, found, budget);
    }
  }
  std::vector<PrimePower> factors;
  factors.reserve(found.size());
  for (const auto& [p, e] : found) factors.push_back({p, e});
  return FactoredInteger::from_trusted(n, std::move(factors));
}

FactoredInteger factorize_with_table(u64 n, const PrimeTable& table) {
  if (n == 0) throw InvalidInput("factorize: n must be >= 1");
  const u128 reach = static_cast<u128>(table.limit()) * table.limit();
  if (reach < n) {
    throw InvalidInput("prime table up to " + std::to_string(table.limit()) +
                       " cannot factor " + std::to_string(n));
  }
  std::vector<PrimePower> factors;
  u64 rest = n;
  for (u32 p : table.primes()) {
    if (static_cast<u64>(p) * p > rest) break;
    if (rest % p == 0) {
      u32 e = 0;
      do {
        rest /= p;
        ++e;
      } while (rest % p == 0);
      factors.push_back({p, e});
    }
  }
  if (rest != 1) factors.push_back({rest, 1});
  return FactoredInteger::from_trusted(n, std::move(factors));
}

}  // namespace uol
