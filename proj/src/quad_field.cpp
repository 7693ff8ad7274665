#include "uol/quad_field.hpp"

#include <cmath>
#include <string>

#include "uol/arith.hpp"
#include "uol/error.hpp"

namespace uol {

const char* to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::kHyperbolic:
      return "hyperbolic";
    case MatrixKind::kParabolic:
      return "parabolic";
    case MatrixKind::kElliptic:
      return "elliptic";
  }
  return "?";
}

const char* to_string(PrimeClass cls) {
  switch (cls) {
    case PrimeClass::kSplit:
      return "split";
    case PrimeClass::kInert:
      return "inert";
    case PrimeClass::kRamified:
      return "ramified";
  }
  return "?";
}

SL2Matrix classify_matrix(const Matrix2& m) {
  const i128 det = static_cast<i128>(m.a) * m.d - static_cast<i128>(m.b) * m.c;
  if (det != 1) {
    throw InvalidInput("matrix determinant is " + to_string(det) +
                       ", expected 1");
  }
  const i128 t = static_cast<i128>(m.a) + m.d;
  const i128 abs_t = t < 0 ? -t : t;
  MatrixKind kind = MatrixKind::kElliptic;
  if (abs_t > 2) {
    kind = MatrixKind::kHyperbolic;
  } else if (abs_t == 2) {
    kind = MatrixKind::kParabolic;
  }
  return SL2Matrix(m, kind);
}

Matrix2 companion_matrix(i64 trace) { return Matrix2{trace, -1, 1, 0}; }

DiscriminantSplit split_discriminant(i128 disc) {
  if (disc <= 1) throw InvalidInput("discriminant must exceed 1");
  const FactoredInteger f = factorize(static_cast<u128>(disc));
  i128 core = 1;
  i128 square_root = 1;
  for (const auto& [p, e] : f.factors()) {
    if (e % 2 == 1) core *= static_cast<i128>(p);
    for (u32 i = 0; i < e / 2; ++i) square_root *= static_cast<i128>(p);
  }
  if (core == 1) {
    throw InvalidInput("discriminant " + to_string(disc) + " is a square");
  }
  if (core % 4 == 1) return {core, square_root};
  if (square_root % 2 != 0) {
    throw InvalidInput(to_string(disc) + " is not a quadratic discriminant");
  }
  return {4 * core, square_root / 2};
}

QuadUnit multiply_units(const QuadUnit& lhs, const QuadUnit& rhs,
                        i128 field_disc) {
  const BigInt d = BigInt(to_string(field_disc));
  QuadUnit out;
  out.x = (lhs.x * rhs.x + d * lhs.y * rhs.y) / 2;
  out.y = (lhs.x * rhs.y + rhs.x * lhs.y) / 2;
  return out;
}

QuadUnit fundamental_unit(i128 field_disc, int* norm_out) {
  if (field_disc < 5) {
    throw InvalidInput("not a real quadratic discriminant: " +
                       to_string(field_disc));
  }
  const BigInt d(to_string(field_disc));
  const BigInt root = boost::multiprecision::sqrt(d);
  const int sigma = (field_disc % 4 == 1) ? 1 : 0;

  // Expand omega = (sigma + sqrt d) / 2 as (P + sqrt d) / Q.
  BigInt p = sigma, q = 2;
  BigInt h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  constexpr int kMaxSteps = 1'000'000;
  for (int step = 0; step < kMaxSteps; ++step) {
    const BigInt a = (p + root) / q;
    const BigInt h = a * h_prev + h_prev2;
    const BigInt k = a * k_prev + k_prev2;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;

    // h - k omega is small; its conjugate (2h - k sigma + k sqrt d) / 2 is
    // the candidate unit above 1.
    const BigInt x = 2 * h - k * sigma;
    const BigInt norm4 = x * x - d * k * k;
    if (norm4 == 4 || norm4 == -4) {
      if (norm_out != nullptr) *norm_out = norm4 > 0 ? 1 : -1;
      return QuadUnit{x, k};
    }
    p = a * q - p;
    q = (d - p * p) / q;
  }
  throw ResourceLimit("continued fraction for D_K = " + to_string(field_disc) +
                      " did not reach a unit");
}

QuadFieldData field_data(const SL2Matrix& a) {
  if (!a.hyperbolic()) {
    throw InvalidInput(std::string("field data needs a hyperbolic matrix; "
                                   "this one is ") +
                       to_string(a.kind()));
  }
  const i128 t_signed = a.trace();
  const i128 t = t_signed < 0 ? -t_signed : t_signed;
  if (t >= (static_cast<i128>(1) << 62)) {
    throw RangeError("trace too large for field data: " + to_string(t_signed));
  }
  QuadFieldData fd;
  fd.trace = static_cast<i64>(t);
  fd.negative_trace = t_signed < 0;
  fd.disc = t * t - 4;
  const DiscriminantSplit split = split_discriminant(fd.disc);
  fd.field_disc = split.field_disc;
  fd.conductor = split.conductor;
  fd.fundamental_unit = fundamental_unit(fd.field_disc, &fd.unit_norm);
  fd.matrix_disc = 4 * fd.disc;

  const QuadUnit eps{BigInt(to_string(t)), BigInt(to_string(fd.conductor))};
  const QuadUnit base =
      fd.unit_norm == -1
          ? multiply_units(fd.fundamental_unit, fd.fundamental_unit,
                           fd.field_disc)
          : fd.fundamental_unit;
  const u32 step = fd.unit_norm == -1 ? 2 : 1;
  QuadUnit power = base;
  u32 k = step;
  while (power != eps) {
    if (power.x > eps.x) {
      throw std::logic_error("eigenvalue is not a power of the fundamental unit");
    }
    power = multiply_units(power, base, fd.field_disc);
    k += step;
  }
  fd.power_index = k;
  return fd;
}

PrimeClass classify_prime(u64 p, i128 field_disc) {
  switch (kronecker(field_disc, p)) {
    case 1:
      return PrimeClass::kSplit;
    case -1:
      return PrimeClass::kInert;
    default:
      return PrimeClass::kRamified;
  }
}

u64 euler_phi(u64 n) {
  if (n == 0) return 0;
  u64 phi = n;
  for (const auto& [p, e] : factorize(n).factors()) {
    phi = phi / static_cast<u64>(p) * (static_cast<u64>(p) - 1);
  }
  return phi;
}

DegreeInterval kummer_degree_interval(u64 n, const QuadFieldData& fd) {
  if (n < 2) throw InvalidInput("kummer degree needs n >= 2");
  DegreeInterval out;
  out.n = n;
  const u64 phi = euler_phi(n);
  const bool k_in_cyclotomic =
      fd.field_disc <= static_cast<i128>(n) &&
      static_cast<i128>(n) % fd.field_disc == 0;
  out.z_degree = k_in_cyclotomic ? phi / 2 : phi;
  if (n == 2) {
    out.lower = out.upper = 4;
    out.exact = true;
    return out;
  }
  const u64 two_k = 2 * static_cast<u64>(fd.power_index);
  const u64 kummer_lower = std::max<u64>(1, (n + two_k - 1) / two_k);
  out.lower = 2 * out.z_degree * kummer_lower;
  if (out.z_degree > kU64Max / 2 / n) {
    throw RangeError("degree bound for n = " + std::to_string(n) +
                     " exceeds 64 bits");
  }
  out.upper = 2 * out.z_degree * n;
  return out;
}

double discriminant_log_bound(u64 n, const QuadFieldData& fd,
                              u64 degree_upper) {
  if (n < 2) throw InvalidInput("discriminant bound needs n >= 2");
  const double relative = static_cast<double>(degree_upper) / 2.0;
  const double abs_dk = static_cast<double>(
      fd.field_disc < 0 ? -fd.field_disc : fd.field_disc);
  return 4.0 * relative * std::log(static_cast<double>(n)) +
         relative * std::log(abs_dk);
}

bool may_ramify_in_Kn(u64 p, u64 n, i128 field_disc) {
  if (p == 0) return false;
  return n % p == 0 || field_disc % static_cast<i128>(p) == 0;
}

}  // namespace uol
