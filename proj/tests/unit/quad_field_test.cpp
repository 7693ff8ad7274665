#include <gtest/gtest.h>

#include <cmath>

#include "uol/arith.hpp"
#include "uol/quad_field.hpp"

namespace uol {
namespace {

QuadFieldData field_for_trace(i64 t) {
  return field_data(classify_matrix(companion_matrix(t)));
}

bool is_square(const BigInt& v) {
  if (v < 0) return false;
  const BigInt r = boost::multiprecision::sqrt(v);
  return r * r == v;
}

TEST(ClassifyMatrix, Examples) {
  const auto h = classify_matrix({2, 1, 1, 1});
  EXPECT_EQ(h.kind(), MatrixKind::kHyperbolic);
  EXPECT_EQ(h.trace(), 3);
  const auto e = classify_matrix({0, -1, 1, 0});
  EXPECT_EQ(e.kind(), MatrixKind::kElliptic);
  EXPECT_EQ(e.trace(), 0);
  const auto p = classify_matrix({1, 1, 0, 1});
  EXPECT_EQ(p.kind(), MatrixKind::kParabolic);
  EXPECT_EQ(p.trace(), 2);
  EXPECT_EQ(classify_matrix({-1, 0, 0, -1}).kind(), MatrixKind::kParabolic);
}

TEST(ClassifyMatrix, RejectsDeterminantOtherThanOne) {
  EXPECT_THROW(classify_matrix({2, 0, 0, 2}), InvalidInput);
  EXPECT_THROW(classify_matrix({0, 1, 1, 0}), InvalidInput);
}

TEST(FieldData, GoldenRatioCase) {
  const auto fd = field_for_trace(3);
  EXPECT_EQ(fd.disc, 5);
  EXPECT_EQ(fd.field_disc, 5);
  EXPECT_EQ(fd.conductor, 1);
  EXPECT_EQ(fd.fundamental_unit, (QuadUnit{1, 1}));  // (1 + sqrt 5) / 2
  EXPECT_EQ(fd.unit_norm, -1);
  EXPECT_EQ(fd.power_index, 2u);
  EXPECT_EQ(fd.matrix_disc, 20);
}

TEST(FieldData, SilverRatioCase) {
  const auto fd = field_for_trace(6);
  EXPECT_EQ(fd.disc, 32);
  EXPECT_EQ(fd.field_disc, 8);
  EXPECT_EQ(fd.conductor, 2);
  EXPECT_EQ(fd.fundamental_unit, (QuadUnit{2, 1}));  // 1 + sqrt 2
  EXPECT_EQ(fd.unit_norm, -1);
  EXPECT_EQ(fd.power_index, 2u);
}

TEST(FieldData, NormPlusOneAndHigherPowers) {
  const auto t4 = field_for_trace(4);
  EXPECT_EQ(t4.field_disc, 12);
  EXPECT_EQ(t4.fundamental_unit, (QuadUnit{4, 1}));  // 2 + sqrt 3
  EXPECT_EQ(t4.unit_norm, 1);
  EXPECT_EQ(t4.power_index, 1u);

  const auto t7 = field_for_trace(7);  // (7 + 3 sqrt 5)/2 = phi^4
  EXPECT_EQ(t7.field_disc, 5);
  EXPECT_EQ(t7.conductor, 3);
  EXPECT_EQ(t7.power_index, 4u);

  const auto t18 = field_for_trace(18);  // 9 + 4 sqrt 5 = phi^6
  EXPECT_EQ(t18.field_disc, 5);
  EXPECT_EQ(t18.power_index, 6u);
}

TEST(FieldData, NegativeTraceSharesFieldData) {
  const auto pos = field_for_trace(3);
  const auto neg = field_data(classify_matrix({-2, -1, -1, -1}));
  EXPECT_TRUE(neg.negative_trace);
  EXPECT_FALSE(pos.negative_trace);
  EXPECT_EQ(neg.trace, 3);
  EXPECT_EQ(neg.field_disc, pos.field_disc);
  EXPECT_EQ(neg.fundamental_unit, pos.fundamental_unit);
  EXPECT_EQ(neg.power_index, pos.power_index);
}

TEST(FieldData, RejectsNonHyperbolic) {
  EXPECT_THROW(field_data(classify_matrix({1, 1, 0, 1})), InvalidInput);
  EXPECT_THROW(field_data(classify_matrix({0, -1, 1, 0})), InvalidInput);
}

TEST(FieldData, InvariantsForAllSmallTraces) {
  for (i64 t = 3; t <= 50; ++t) {
    const auto fd = field_for_trace(t);
    SCOPED_TRACE(t);
    // D = f^2 D_K with D_K fundamental.
    EXPECT_EQ(fd.conductor * fd.conductor * fd.field_disc, fd.disc);
    const i128 dk = fd.field_disc;
    if (dk % 4 == 0) {
      const i128 m = dk / 4;
      EXPECT_TRUE(m % 4 == 2 || m % 4 == 3);
    } else {
      EXPECT_EQ(dk % 4, 1);
    }
    for (const auto& [p, e] : factorize(static_cast<u128>(dk % 4 == 0 ? dk / 4 : dk))
                                  .factors()) {
      EXPECT_EQ(e, 1u) << "D_K core not squarefree";
    }

    const BigInt d(to_string(dk));
    const auto& u = fd.fundamental_unit;
    EXPECT_EQ(u.x * u.x - d * u.y * u.y, 4 * fd.unit_norm);

    // u^k reproduces eps = (t + f sqrt D_K) / 2 exactly.
    QuadUnit power = u;
    for (u32 i = 1; i < fd.power_index; ++i) power = multiply_units(power, u, dk);
    EXPECT_EQ(power, (QuadUnit{BigInt(t), BigInt(to_string(fd.conductor))}));

    // Minimality: no unit (x + y sqrt D_K)/2 > 1 with 0 < y < u.y.
    for (BigInt y = 1; y < u.y; ++y) {
      EXPECT_FALSE(is_square(d * y * y + 4) || is_square(d * y * y - 4))
          << "smaller unit with y = " << y;
    }
  }
}

TEST(ClassifyPrime, Examples) {
  EXPECT_EQ(classify_prime(11, 5), PrimeClass::kSplit);
  EXPECT_EQ(classify_prime(5, 5), PrimeClass::kRamified);
  EXPECT_EQ(classify_prime(7, 5), PrimeClass::kInert);
  EXPECT_EQ(classify_prime(2, 5), PrimeClass::kInert);
  EXPECT_EQ(classify_prime(2, 8), PrimeClass::kRamified);
  EXPECT_EQ(classify_prime(7, 8), PrimeClass::kSplit);
}

TEST(ClassifyPrime, SplitIffCharPolyHasTwoRoots) {
  const auto primes = sieve_primes(2000);
  for (i64 t = 3; t <= 50; ++t) {
    const auto fd = field_for_trace(t);
    for (u32 p : primes.primes()) {
      if (fd.field_disc % p == 0 || fd.disc % p == 0) continue;
      u64 roots = 0;
      for (u64 x = 0; x < p; ++x) {
        if ((x * x + p * p - (t % p) * x + 1) % p == 0) ++roots;
      }
      ASSERT_EQ(classify_prime(p, fd.field_disc) == PrimeClass::kSplit,
                roots == 2)
          << "t=" << t << " p=" << p;
    }
  }
}

TEST(KummerDegree, Examples) {
  const auto fd = field_for_trace(3);
  const auto n2 = kummer_degree_interval(2, fd);
  EXPECT_TRUE(n2.exact);
  EXPECT_EQ(n2.lower, 4u);
  EXPECT_EQ(n2.upper, 4u);

  const auto n3 = kummer_degree_interval(3, fd);
  EXPECT_EQ(n3.z_degree, 2u);
  EXPECT_EQ(n3.lower, 4u);
  EXPECT_EQ(n3.upper, 12u);

  const auto n5 = kummer_degree_interval(5, fd);
  EXPECT_EQ(n5.z_degree, 2u);
  EXPECT_EQ(n5.lower, 8u);
  EXPECT_EQ(n5.upper, 20u);

  EXPECT_THROW(kummer_degree_interval(1, fd), InvalidInput);
}

TEST(KummerDegree, IntervalInvariants) {
  for (i64 t = 3; t <= 50; ++t) {
    const auto fd = field_for_trace(t);
    for (u64 n = 2; n <= 1000; ++n) {
      const auto iv = kummer_degree_interval(n, fd);
      const u64 phi = euler_phi(n);
      ASSERT_LE(iv.lower, iv.upper);
      ASSERT_LE(iv.upper, 2 * n * phi);
      ASSERT_GE(iv.lower, 2u);
      ASSERT_TRUE(iv.z_degree == phi || 2 * iv.z_degree == phi);
    }
  }
}

TEST(DiscriminantLogBound, Examples) {
  const auto fd = field_for_trace(3);
  EXPECT_NEAR(discriminant_log_bound(2, fd, 4), 8 * std::log(2.0) + 2 * std::log(5.0),
              1e-12);
  EXPECT_NEAR(discriminant_log_bound(3, fd, 12),
              24 * std::log(3.0) + 6 * std::log(5.0), 1e-12);
  EXPECT_THROW(discriminant_log_bound(1, fd, 4), InvalidInput);
}

TEST(MayRamify, Examples) {
  EXPECT_TRUE(may_ramify_in_Kn(5, 6, 5));
  EXPECT_FALSE(may_ramify_in_Kn(7, 6, 5));
  EXPECT_TRUE(may_ramify_in_Kn(3, 6, 5));
}

TEST(EulerPhi, SmallValues) {
  EXPECT_EQ(euler_phi(1), 1u);
  EXPECT_EQ(euler_phi(12), 4u);
  EXPECT_EQ(euler_phi(97), 96u);
}

}  // namespace
}  // namespace uol
