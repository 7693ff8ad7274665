#pragma once

// Orders of SL2(Z) matrices and of integers modulo primes, prime powers and
// composites; torus index i_p; Carmichael lambda.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "uol/arith.hpp"
#include "uol/quad_field.hpp"

namespace uol {

/// Supplies complete factorizations of p - 1 and p + 1. Defaults to
/// factorize(); scans pass a table-backed one.
using FactorFn = std::function<FactoredInteger(u64)>;

struct PrimeOrderRecord {
  u64 p = 0;
  /// kRamified also covers primes dividing the conductor of Z[eps]: every
  /// prime with a repeated eigenvalue mod p.
  PrimeClass cls = PrimeClass::kRamified;
  std::optional<u64> torus_order;  ///< p - 1 split, p + 1 inert
  u64 ord = 0;
  std::optional<u64> index;  ///< i_p = torus_order / ord
  bool is_bad = false;

  friend bool operator==(const PrimeOrderRecord&,
                         const PrimeOrderRecord&) = default;
};

/// ord <= p / ln p (natural log).
bool low_order_by_log(u64 ord, u64 p);

/// A^e mod m for a matrix with residues in [0, m).
struct ModMatrix {
  u64 a = 1, b = 0, c = 0, d = 1;
  friend bool operator==(const ModMatrix&, const ModMatrix&) = default;
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
};
ModMatrix reduce(const Matrix2& m, u64 modulus);
ModMatrix mat_mul(const ModMatrix& x, const ModMatrix& y, u64 modulus);
ModMatrix mat_pow(const ModMatrix& x, u64 e, u64 modulus);

/// Order of A mod p. Split primes use the eigenvalue in F_p, inert primes
/// the class of x in F_p[x]/(x^2 - t x + 1), repeated-eigenvalue primes the
/// scalar +-1 times an exact unipotency test; p = 2, 3 are brute-forced.
PrimeOrderRecord matrix_order_mod_p(const SL2Matrix& a, const QuadFieldData& fd,
                                    u64 p, const FactorFn& factor = {});

/// Minimal m with A^m = I mod p^e by lifting the order mod p.
/// Throws RangeError if p^e does not fit in 64 bits.
u128 matrix_order_mod_prime_power(const SL2Matrix& a, u64 p, u32 exponent,
                                  u64 base_ord);

struct LocalOrder {
  u64 p = 0;
  u32 exponent = 0;
  u64 ord_p = 0;
  u128 ord_pe = 0;
  bool is_bad = false;
  bool ramified = false;
};

struct CompositeOrderRecord {
  u64 N = 0;
  u128 ord = 0;
  u64 lambda = 0;  ///< Carmichael lambda(N)
  u64 s = 1;       ///< N = s^2 N_G N_B
  u64 N_G = 1;
  u64 N_B = 1;
  u64 d0 = 1;      ///< d = N_G N_B = d0 gcd(d, D_A)
  std::vector<LocalOrder> local;
};

/// Fills s, N_G, N_B, d0 from `local` (which must already carry exponents
/// and badness). `disc_a` is D_A; pass 0 to take d0 = d.
void decompose(CompositeOrderRecord& rec, i128 disc_a);

/// Exact ord_N(A) = lcm of prime-power orders, with the square/good/bad
/// decomposition. Requires N >= 2.
CompositeOrderRecord matrix_order_mod_N(const SL2Matrix& a, u64 N,
                                        const QuadFieldData& fd);

/// Same, reusing a factorization of N and per-prime records.
CompositeOrderRecord matrix_order_mod_N(
    const SL2Matrix& a, const FactoredInteger& n_factored,
    const QuadFieldData& fd,
    const std::function<PrimeOrderRecord(u64)>& prime_record);

struct IntegerOrderRecord {
  u64 p = 0;
  u64 ord = 0;
  u64 index = 0;  ///< (p - 1) / ord
  bool is_bad = false;

  u64 torus_order() const { return p - 1; }
  friend bool operator==(const IntegerOrderRecord&,
                         const IntegerOrderRecord&) = default;
};

/// Throws InvalidInput when p is not prime or p | b.
IntegerOrderRecord integer_order_mod_p(i64 b, u64 p,
                                       const FactorFn& factor = {});

/// Throws InvalidInput when gcd(b, N) > 1. N = 1 gives 1.
u64 integer_order_mod_N(i64 b, u64 N);

/// Minimal m with b^m = 1 mod p^e, lifted from the order mod p.
u64 integer_order_mod_prime_power(i64 b, u64 p, u32 exponent, u64 base_ord);

/// Composite record for an integer base (d0 = d since gcd(N, b) = 1).
CompositeOrderRecord integer_order_composite(
    i64 b, const FactoredInteger& n_factored,
    const std::function<IntegerOrderRecord(u64)>& prime_record);

u128 carmichael_lambda(const FactoredInteger& n);

/// prod_{p | d0} ord_p / exp(3 (ln ln x)^4). Requires x >= 16.
double prop11_bound(const CompositeOrderRecord& record,
                    const std::map<u64, u64>& per_prime_orders, u64 x);

/// Brute-force order of A mod m by repeated multiplication; nullopt if it
/// exceeds `cap`. Reference path for tests and tiny moduli.
std::optional<u64> brute_force_matrix_order(const Matrix2& a, u64 modulus,
                                            u64 cap);

}  // namespace uol
