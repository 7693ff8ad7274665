#include <cmath>

#include "runner.hpp"
#include "uol/density_lab.hpp"

namespace uol {

namespace {

// ln|v| for v != 0, good to double precision for any size.
double log_abs(const BigInt& v) {
  BigInt a = boost::multiprecision::abs(v);
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(a));
  if (bits < 60) return std::log(a.convert_to<double>());
  const unsigned shift = bits - 60;
  const double top = static_cast<double>(static_cast<u64>(a >> shift));
  return std::log(top) + shift * std::log(2.0);
}

}  // namespace

LemmaSimpleCensus lemma_simple_census(const Matrix2& m, u64 y, u64 prime_limit) {
  if (y < 2 || y > 60) throw InvalidInput("lemma-simple census needs 2 <= y <= 60");
  const SL2Matrix a = classify_matrix(m);
  if (!a.hyperbolic()) {
    throw InvalidInput(std::string("matrix is ") + to_string(a.kind()) +
                       "; the census needs |trace| > 2");
  }

  LemmaSimpleCensus out;
  out.y = y;
  out.prime_limit = prime_limit;

  // det(A^n - I) = 2 - tr(A^n) when det A = 1, with tr(A^n) from the
  // recurrence T_n = t T_{n-1} - T_{n-2}.
  const BigInt t = static_cast<long long>(a.trace());
  BigInt prev = 2, cur = t;
  out.M = 1;
  for (u64 n = 1; n <= y; ++n) {
    out.M *= 2 - cur;
    const BigInt nxt = t * cur - prev;
    prev = cur;
    cur = nxt;
  }

  // Direct powering: every p whose A^n = I for some n <= y.
  for (u32 p : sieve_primes(prime_limit).primes()) {
    const ModMatrix base = reduce(a.entries(), p);
    ModMatrix power = base;
    for (u64 n = 1; n <= y; ++n) {
      if (power.is_identity()) {
        out.low_order_primes.push_back(p);
        break;
      }
      power = mat_mul(power, base, p);
    }
  }
  out.divisor_check = true;
  for (u64 p : out.low_order_primes) {
    if (out.M % p != 0) out.divisor_check = false;
  }
  out.logM_over_y2 = log_abs(out.M) / static_cast<double>(y * y);
  return out;
}

}  // namespace uol
