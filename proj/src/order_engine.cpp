#include "uol/order_engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uol/error.hpp"

namespace uol {

namespace {

u64 add_mod(u64 a, u64 b, u64 m) {
  return a >= m - b ? a - (m - b) : a + b;
}

u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

u64 checked_power(u64 p, u32 exponent) {
  u128 pe = 1;
  for (u32 i = 0; i < exponent; ++i) {
    pe *= p;
    if (pe > kU64Max) {
      throw RangeError(std::to_string(p) + "^" + std::to_string(exponent) +
                       " exceeds 64 bits");
    }
  }
  return static_cast<u64>(pe);
}

// Element u + v x of F_p[x]/(x^2 - t x + 1).
struct QuadResidue {
  u64 u = 1;
  u64 v = 0;
};

QuadResidue quad_mul(const QuadResidue& l, const QuadResidue& r, u64 t, u64 p) {
  // (a + b x)(c + d x) = (ac - bd) + (ad + bc + t bd) x
  const u64 ac = mul_mod(l.u, r.u, p);
  const u64 bd = mul_mod(l.v, r.v, p);
  const u64 cross = add_mod(mul_mod(l.u, r.v, p), mul_mod(l.v, r.u, p), p);
  return {sub_mod(ac, bd, p), add_mod(cross, mul_mod(t, bd, p), p)};
}

QuadResidue quad_pow(QuadResidue base, u64 e, u64 t, u64 p) {
  QuadResidue result;
  while (e != 0) {
    if (e & 1) result = quad_mul(result, base, t, p);
    base = quad_mul(base, base, t, p);
    e >>= 1;
  }
  return result;
}

u64 brute_force_small(const Matrix2& a, u64 p) {
  // |SL2(F_p)| = p (p^2 - 1) bounds the order.
  const auto ord = brute_force_matrix_order(a, p, p * (p * p - 1));
  if (!ord) throw std::logic_error("matrix order exceeds |SL2(F_p)|");
  return *ord;
}

}  // namespace

bool low_order_by_log(u64 ord, u64 p) {
  const double pd = static_cast<double>(p);
  return static_cast<double>(ord) <= pd / std::log(pd);
}

ModMatrix reduce(const Matrix2& m, u64 modulus) {
  return {reduce_mod(m.a, modulus), reduce_mod(m.b, modulus),
          reduce_mod(m.c, modulus), reduce_mod(m.d, modulus)};
}

ModMatrix mat_mul(const ModMatrix& x, const ModMatrix& y, u64 m) {
  return {add_mod(mul_mod(x.a, y.a, m), mul_mod(x.b, y.c, m), m),
          add_mod(mul_mod(x.a, y.b, m), mul_mod(x.b, y.d, m), m),
          add_mod(mul_mod(x.c, y.a, m), mul_mod(x.d, y.c, m), m),
          add_mod(mul_mod(x.c, y.b, m), mul_mod(x.d, y.d, m), m)};
}

ModMatrix mat_pow(const ModMatrix& x, u64 e, u64 m) {
  ModMatrix result{1 % m, 0, 0, 1 % m};
  ModMatrix base = x;
  while (e != 0) {
    if (e & 1) result = mat_mul(result, base, m);
    base = mat_mul(base, base, m);
    e >>= 1;
  }
  return result;
}

std::optional<u64> brute_force_matrix_order(const Matrix2& a, u64 modulus,
                                            u64 cap) {
  if (modulus == 0) throw InvalidInput("modulus must be >= 1");
  if (modulus == 1) return 1;
  const ModMatrix m = reduce(a, modulus);
  ModMatrix cur = m;
  for (u64 k = 1; k <= cap; ++k) {
    if (cur.is_identity()) return k;
    cur = mat_mul(cur, m, modulus);
  }
  return std::nullopt;
}

PrimeOrderRecord matrix_order_mod_p(const SL2Matrix& a, const QuadFieldData& fd,
                                    u64 p, const FactorFn& factor_in) {
  if (!is_prime(p)) {
    throw InvalidInput("modulus " + std::to_string(p) + " is not prime");
  }
  const i128 t_signed = a.trace();
  if (static_cast<i128>(fd.trace) != (t_signed < 0 ? -t_signed : t_signed)) {
    throw InvalidInput("field data does not belong to this matrix");
  }
  auto factor = [&factor_in](u64 n) {
    return factor_in ? factor_in(n) : factorize(n);
  };

  PrimeOrderRecord rec;
  rec.p = p;
  const u64 t = reduce_mod(t_signed, p);
  const u64 disc = reduce_mod(fd.disc, p);
  int symbol = 0;
  if (disc != 0) symbol = p == 2 ? kronecker(fd.disc, 2) : jacobi(disc, p);
  rec.cls = symbol == 1    ? PrimeClass::kSplit
            : symbol == -1 ? PrimeClass::kInert
                           : PrimeClass::kRamified;

  if (p <= 3) {
    rec.ord = brute_force_small(a.entries(), p);
  } else if (rec.cls == PrimeClass::kRamified) {
    // Repeated eigenvalue r = t/2 = +-1; A = r (I + N) with N nilpotent.
    const u64 r = mul_mod(t, (p + 1) / 2, p);
    const u64 ord_r = r == 1 ? 1 : 2;
    const ModMatrix m = mat_pow(reduce(a.entries(), p), ord_r, p);
    rec.ord = m.is_identity() ? ord_r : ord_r * p;
  } else if (rec.cls == PrimeClass::kSplit) {
    const u64 s = *sqrt_mod(disc, p);
    const u64 eigen = mul_mod(add_mod(t, s, p), (p + 1) / 2, p);
    rec.ord = element_order(eigen, p, factor(p - 1));
  } else {
    rec.ord = order_from_exponent(
        QuadResidue{0, 1}, factor(p + 1),
        [t, p](const QuadResidue& x, u64 e) { return quad_pow(x, e, t, p); },
        [](const QuadResidue& x) { return x.u == 1 && x.v == 0; });
  }

  if (rec.cls != PrimeClass::kRamified) {
    const u64 torus = rec.cls == PrimeClass::kSplit ? p - 1 : p + 1;
    if (torus % rec.ord != 0) {
      throw std::logic_error("order does not divide the torus order");
    }
    rec.torus_order = torus;
    rec.index = torus / rec.ord;
  }
  rec.is_bad = rec.cls == PrimeClass::kRamified || low_order_by_log(rec.ord, p);
  return rec;
}

u128 matrix_order_mod_prime_power(const SL2Matrix& a, u64 p, u32 exponent,
                                  u64 base_ord) {
  if (exponent == 0) throw InvalidInput("prime-power exponent must be >= 1");
  const u64 pe = checked_power(p, exponent);
  ModMatrix m = mat_pow(reduce(a.entries(), pe), base_ord, pe);
  const ModMatrix mod_p{m.a % p, m.b % p, m.c % p, m.d % p};
  if (!mod_p.is_identity()) {
    throw InvalidInput("base order " + std::to_string(base_ord) +
                       " does not kill the matrix mod " + std::to_string(p));
  }
  u128 ord = base_ord;
  for (u32 lifts = 0; !m.is_identity(); ++lifts) {
    if (lifts + 1 >= exponent + (p == 2 ? 1u : 0u)) {
      throw std::logic_error("prime-power lifting did not terminate");
    }
    m = mat_pow(m, p, pe);
    ord *= p;
  }
  return ord;
}

void decompose(CompositeOrderRecord& rec, i128 disc_a) {
  rec.s = rec.N_G = rec.N_B = 1;
  for (const auto& lo : rec.local) {
    for (u32 i = 0; i < lo.exponent / 2; ++i) rec.s *= lo.p;
    if (lo.exponent % 2 == 1) {
      if (lo.is_bad) {
        rec.N_B *= lo.p;
      } else {
        rec.N_G *= lo.p;
      }
    }
  }
  const u64 d = rec.N_G * rec.N_B;
  if (disc_a == 0) {
    rec.d0 = d;
    return;
  }
  const u64 common = gcd(d, reduce_mod(disc_a < 0 ? -disc_a : disc_a, d));
  rec.d0 = d / common;
}

CompositeOrderRecord matrix_order_mod_N(
    const SL2Matrix& a, const FactoredInteger& n_factored,
    const QuadFieldData& fd,
    const std::function<PrimeOrderRecord(u64)>& prime_record) {
  CompositeOrderRecord rec;
  rec.N = checked_u64(n_factored.value(), "modulus");
  if (rec.N < 2) throw InvalidInput("composite order needs N >= 2");
  rec.ord = 1;
  for (const auto& [p128, e] : n_factored.factors()) {
    const u64 p = static_cast<u64>(p128);
    const PrimeOrderRecord pr = prime_record(p);
    LocalOrder lo{p,     e,         pr.ord,
                  0,     pr.is_bad, pr.cls == PrimeClass::kRamified};
    lo.ord_pe = e == 1 ? pr.ord
                       : matrix_order_mod_prime_power(a, p, e, pr.ord);
    rec.ord = checked_lcm(rec.ord, lo.ord_pe);
    rec.local.push_back(lo);
  }
  rec.lambda = static_cast<u64>(carmichael_lambda(n_factored));
  decompose(rec, fd.matrix_disc);
  return rec;
}

CompositeOrderRecord matrix_order_mod_N(const SL2Matrix& a, u64 N,
                                        const QuadFieldData& fd) {
  if (N < 2) throw InvalidInput("composite order needs N >= 2");
  return matrix_order_mod_N(a, factorize(N), fd, [&](u64 p) {
    return matrix_order_mod_p(a, fd, p);
  });
}

IntegerOrderRecord integer_order_mod_p(i64 b, u64 p, const FactorFn& factor) {
  if (!is_prime(p)) {
    throw InvalidInput("modulus " + std::to_string(p) + " is not prime");
  }
  const u64 residue = reduce_mod(b, p);
  if (residue == 0) {
    throw InvalidInput("order undefined: " + std::to_string(p) + " divides " +
                       std::to_string(b));
  }
  IntegerOrderRecord rec;
  rec.p = p;
  rec.ord = element_order(residue, p, factor ? factor(p - 1) : factorize(p - 1));
  rec.index = (p - 1) / rec.ord;
  rec.is_bad = low_order_by_log(rec.ord, p);
  return rec;
}

u64 integer_order_mod_prime_power(i64 b, u64 p, u32 exponent, u64 base_ord) {
  if (exponent == 0) throw InvalidInput("prime-power exponent must be >= 1");
  const u64 pe = checked_power(p, exponent);
  u64 x = pow_mod(reduce_mod(b, pe), base_ord, pe);
  if (x % p != 1 % p) {
    throw InvalidInput("base order does not kill b mod " + std::to_string(p));
  }
  u64 ord = base_ord;
  for (u32 lifts = 0; x != 1 % pe; ++lifts) {
    if (lifts + 1 >= exponent + (p == 2 ? 1u : 0u)) {
      throw std::logic_error("prime-power lifting did not terminate");
    }
    x = pow_mod(x, p, pe);
    ord *= p;
  }
  return ord;
}

CompositeOrderRecord integer_order_composite(
    i64 b, const FactoredInteger& n_factored,
    const std::function<IntegerOrderRecord(u64)>& prime_record) {
  CompositeOrderRecord rec;
  rec.N = checked_u64(n_factored.value(), "modulus");
  rec.ord = 1;
  for (const auto& [p128, e] : n_factored.factors()) {
    const u64 p = static_cast<u64>(p128);
    const IntegerOrderRecord pr = prime_record(p);
    LocalOrder lo{p, e, pr.ord, 0, pr.is_bad, false};
    lo.ord_pe = e == 1 ? pr.ord : integer_order_mod_prime_power(b, p, e, pr.ord);
    rec.ord = checked_lcm(rec.ord, lo.ord_pe);
    rec.local.push_back(lo);
  }
  rec.lambda = static_cast<u64>(carmichael_lambda(n_factored));
  decompose(rec, 0);
  return rec;
}

u64 integer_order_mod_N(i64 b, u64 N) {
  if (N == 0) throw InvalidInput("modulus must be >= 1");
  if (N == 1) return 1;
  if (gcd(reduce_mod(b, N), N) != 1) {
    throw InvalidInput("gcd(" + std::to_string(b) + ", " + std::to_string(N) +
                       ") > 1: order undefined");
  }
  const CompositeOrderRecord rec = integer_order_composite(
      b, factorize(N), [b](u64 p) { return integer_order_mod_p(b, p); });
  return static_cast<u64>(rec.ord);
}

u128 carmichael_lambda(const FactoredInteger& n) {
  u128 lambda = 1;
  for (const auto& [p, e] : n.factors()) {
    u128 local;
    if (p == 2) {
      local = e == 1 ? 1 : e == 2 ? 2 : static_cast<u128>(1) << (e - 2);
    } else {
      local = p - 1;
      for (u32 i = 1; i < e; ++i) local *= p;
    }
    lambda = checked_lcm(lambda, local);
  }
  return lambda;
}

double prop11_bound(const CompositeOrderRecord& record,
                    const std::map<u64, u64>& per_prime_orders, u64 x) {
  if (x < 16) throw InvalidInput("prop11_bound needs x >= 16");
  double log_product = 0.0;
  for (const auto& lo : record.local) {
    if (lo.exponent % 2 == 0 || record.d0 % lo.p != 0) continue;
    const auto it = per_prime_orders.find(lo.p);
    if (it == per_prime_orders.end()) {
      throw InvalidInput("missing order for prime " + std::to_string(lo.p));
    }
    log_product += std::log(static_cast<double>(it->second));
  }
  const double loglog = std::log(std::log(static_cast<double>(x)));
  return std::exp(log_product - 3.0 * std::pow(loglog, 4));
}

}  // namespace uol
