#pragma once

// Real quadratic field data attached to an SL2(Z) matrix, and the numeric
// degree/discriminant bounds for the Kummer extensions K(zeta_n, eps^(1/n)).

#include <boost/multiprecision/cpp_int.hpp>

#include "uol/types.hpp"

namespace uol {

using BigInt = boost::multiprecision::cpp_int;

struct Matrix2 {
  i64 a = 1, b = 0, c = 0, d = 1;

  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

enum class MatrixKind { kHyperbolic, kParabolic, kElliptic };

const char* to_string(MatrixKind kind);

/// A determinant-one integer matrix with its trace and conjugacy type.
/// Only classify_matrix() constructs one, so det == 1 always holds.
class SL2Matrix {
 public:
  const Matrix2& entries() const noexcept { return m_; }
  i128 trace() const noexcept { return static_cast<i128>(m_.a) + m_.d; }
  MatrixKind kind() const noexcept { return kind_; }
  bool hyperbolic() const noexcept { return kind_ == MatrixKind::kHyperbolic; }

 private:
  friend SL2Matrix classify_matrix(const Matrix2& m);
  SL2Matrix(const Matrix2& m, MatrixKind kind) : m_(m), kind_(kind) {}

  Matrix2 m_;
  MatrixKind kind_;
};

/// Throws InvalidInput when det != 1.
SL2Matrix classify_matrix(const Matrix2& m);

/// Companion matrix [[t, -1], [1, 0]] of x^2 - t x + 1.
Matrix2 companion_matrix(i64 trace);

/// A unit (x + y sqrt(D_K)) / 2 of the maximal order.
struct QuadUnit {
  BigInt x;
  BigInt y;

  friend bool operator==(const QuadUnit&, const QuadUnit&) = default;
};

struct QuadFieldData {
  i64 trace = 0;                ///< |tr A|
  bool negative_trace = false;  ///< tr A < 0; eps is then -(|t| + sqrt D)/2
  i128 disc = 0;                ///< D = t^2 - 4
  i128 field_disc = 0;          ///< D_K, fundamental discriminant
  i128 conductor = 0;           ///< f with D = f^2 D_K
  QuadUnit fundamental_unit;    ///< smallest unit > 1
  int unit_norm = 1;            ///< norm of the fundamental unit
  u32 power_index = 1;          ///< k with eps = u^k (even when norm(u) = -1)
  i128 matrix_disc = 0;         ///< D_A = 4 (t^2 - 4)
};

/// Continued-fraction search for the fundamental unit and exact expansion
/// of its powers up to eps = (|t| + sqrt(D)) / 2. Throws InvalidInput for
/// non-hyperbolic input and RangeError for |t| >= 2^62.
QuadFieldData field_data(const SL2Matrix& a);

/// The smallest unit > 1 of the maximal order of discriminant D_K, and its
/// norm. D_K must be a positive fundamental discriminant.
QuadUnit fundamental_unit(i128 field_disc, int* norm_out = nullptr);

/// Fundamental discriminant and conductor of D > 0 (not a square).
struct DiscriminantSplit {
  i128 field_disc;
  i128 conductor;
};
DiscriminantSplit split_discriminant(i128 disc);

/// Product of units in the (x + y sqrt D)/2 representation.
QuadUnit multiply_units(const QuadUnit& lhs, const QuadUnit& rhs, i128 field_disc);

enum class PrimeClass { kSplit, kInert, kRamified };

const char* to_string(PrimeClass cls);

/// Decided by the Kronecker symbol (D_K / p).
PrimeClass classify_prime(u64 p, i128 field_disc);

struct DegreeInterval {
  u64 n = 0;
  u64 lower = 0;
  u64 upper = 0;
  u64 z_degree = 0;  ///< [K(zeta_n) : K]
  bool exact = false;
};

/// Bounds on [K_n : Q] = 2 [Z_n : K] [K_n : Z_n] with
/// max(1, ceil(n / 2k)) <= [K_n : Z_n] <= n; n = 2 is exactly 4.
DegreeInterval kummer_degree_interval(u64 n, const QuadFieldData& fd);

/// 4 [K_n:K] ln n + [K_n:K] ln |D_K| with [K_n:K] = degree_upper / 2.
double discriminant_log_bound(u64 n, const QuadFieldData& fd, u64 degree_upper);

/// True iff p | n D_K; a necessary condition for p to ramify in K_n.
bool may_ramify_in_Kn(u64 p, u64 n, i128 field_disc);

u64 euler_phi(u64 n);

}  // namespace uol
