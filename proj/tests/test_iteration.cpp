#include <gtest/gtest.h>

#include <cmath>

#include "stabcert/iteration.hpp"
#include "stabcert/sampling.hpp"
#include "support/oracles.hpp"

using namespace stabcert;
using R = Rational;

TEST(KInterval, NThreeDeltaOne) {
  const auto iv = k_interval(3, R(1));
  ASSERT_TRUE(iv.nonempty());
  EXPECT_EQ(iv.radicand, R(2, 3));
  EXPECT_EQ(iv.lower->offset(), R(1));
  EXPECT_EQ(iv.upper->surd(), QuadSurd::sqrt_of(R(2, 3)));
  EXPECT_TRUE(iv.contains(R(1)));
  EXPECT_TRUE(iv.contains(R(1, 5)));   // 1 - 0.816 = 0.184
  EXPECT_FALSE(iv.contains(R(1, 6)));  // 0.167
  EXPECT_TRUE(iv.contains(R(18, 10)));
  EXPECT_FALSE(iv.contains(R(182, 100)));
}

TEST(KInterval, DegenerateAndEmpty) {
  const auto deg = k_interval(4, R(1, 2));
  EXPECT_FALSE(deg.nonempty());
  ASSERT_TRUE(deg.lower && deg.upper);
  EXPECT_EQ(deg.lower->as_rational(), R(1, 2));
  EXPECT_EQ(deg.upper->as_rational(), R(1, 2));
  EXPECT_FALSE(deg.contains(R(1, 2)));
  const auto empty = k_interval(4, R(1, 3));
  EXPECT_FALSE(empty.nonempty());
  EXPECT_FALSE(empty.lower.has_value());
  EXPECT_TRUE(k_interval(5, R(21, 22)).nonempty());
  EXPECT_THROW(k_interval(3, R(0)), std::domain_error);
}

TEST(Thm12Coefficient, Examples) {
  for (int n = 3; n <= 8; ++n) {
    const R delta = sobolev_ratio(n) + R(1, 5);
    const R k = delta / 2;
    EXPECT_EQ(thm12_limit_coefficient(n, delta, k), 2 - 2 * R(n - 2) / (R(n) * delta));
    EXPECT_GT(thm12_limit_coefficient(n, delta, k), R(0));
  }
  EXPECT_LT(thm12_coefficient(3, R(1, 100), R(1), R(1)), R(0));
  EXPECT_THROW(thm12_coefficient(3, R(1), R(0), R(1)), std::domain_error);
  // large s approaches the limit
  const R lim = thm12_limit_coefficient(3, R(1), R(1, 2));
  EXPECT_LT(abs(thm12_coefficient(3, R(1), R(1, 2), R(1000000)) - lim), R(1, 100000));
}

TEST(Thm12Coefficient, ZeroAtRationalEndpoint) {
  // n = 4, delta = 2/3: radicand 1/9, endpoints 1/3 and 1
  const auto iv = k_interval(4, R(2, 3));
  EXPECT_EQ(iv.lower->as_rational(), R(1, 3));
  EXPECT_EQ(iv.upper->as_rational(), R(1));
  EXPECT_EQ(thm12_limit_coefficient(4, R(2, 3), R(1, 6)), R(0));
  EXPECT_EQ(thm12_limit_coefficient(4, R(2, 3), R(1, 2)), R(0));
}

TEST(Thm12Coefficient, SignMatchesIntervalMembership) {
  Rng rng = chunk_rng(51, 0);
  for (int i = 0; i < 3000; ++i) {
    const int n = static_cast<int>(uniform_int(rng, 3, 10));
    const R delta = abs(random_rational(rng, 3000, 1000)) + R(1, 1000);
    const R two_k = abs(random_rational(rng, 3000, 1000)) + R(1, 1000);
    const auto iv = k_interval(n, delta);
    const R c = thm12_limit_coefficient(n, delta, two_k / 2);
    if (iv.contains(two_k)) {
      EXPECT_GT(c, R(0));
    } else {
      EXPECT_LE(c, R(0));
    }
  }
}

TEST(Caccioppoli, NThreeDeltaOne) {
  const auto c = caccioppoli_constants(3, R(1), R(1, 2), R(100), R(100));
  EXPECT_TRUE(c.both_branches_positive);
  EXPECT_GT(c.C1, R(0));
  EXPECT_EQ(c.p, R(4));
  ASSERT_TRUE(c.C2.has_value());
  EXPECT_EQ(*c.C2, pow(c.p * c.p * c.C1 / 4, 2));
  EXPECT_GT(c.p, R(3));
  EXPECT_NEAR(std::stod(c.C2_approx), c.C2->to_double(), 1e-9 * c.C2->to_double());
}

TEST(Caccioppoli, PoleAtPositivityBoundary) {
  // as delta shrinks toward the boundary, C1 blows up
  R prev(0);
  for (int j = 2; j <= 6; ++j) {
    const R delta = R(2, 3) + pow(R(1, 10), j);
    const auto c = caccioppoli_constants(4, delta, delta / 2, R(1000000000), R(1000000000));
    EXPECT_GT(c.C1, prev);
    prev = c.C1;
  }
  EXPECT_THROW(caccioppoli_constants(3, R(1, 100), R(1), R(1), R(1)), std::domain_error);
}

TEST(Caccioppoli, OddHalfPOnlyApproximate) {
  const auto c = caccioppoli_constants(3, R(1), R(3, 8), R(100), R(100));
  EXPECT_EQ(c.p, R(7, 2));
  EXPECT_FALSE(c.C2.has_value());
  EXPECT_FALSE(c.C2_approx.empty());
}

TEST(Corollary, CollapseForNThreeToTwelve) {
  for (int n = 3; n <= 12; ++n) {
    const auto c = corollary11_collapse(n);
    EXPECT_TRUE(c.collapses()) << "n = " << n;
    EXPECT_EQ(c.boundary_two_k, R(n - 2, 2));
    EXPECT_EQ(c.boundary_p, R(n));
  }
  EXPECT_EQ(corollary11_collapse(3).radicand, R(1, 64));
  EXPECT_EQ(corollary11_collapse(4).radicand, R(1, 9));
  EXPECT_EQ(corollary11_collapse(5).radicand, R(81, 256));
  EXPECT_EQ(corollary11_collapse(3).delta_c, R(3, 8));
  EXPECT_EQ(*corollary11_collapse(3).root, R(1, 8));
  EXPECT_EQ(corollary11_collapse(5).delta_c, R(15, 16));
}

TEST(Corollary, ExponentJustAboveCritical) {
  for (int n = 3; n <= 12; ++n) {
    const auto e = corollary11_exponent(n, delta_c(n) + R(1, 1000));
    EXPECT_TRUE(e.p_exceeds_n) << "n = " << n;
    EXPECT_TRUE(e.two_k_admissible) << "n = " << n;
    EXPECT_GT(e.p.to_double(), n);
    EXPECT_LT(e.p.to_double(), n + 0.01);
  }
  EXPECT_THROW(corollary11_exponent(3, R(3, 8)), std::domain_error);
}

TEST(Delta1, Table) {
  EXPECT_EQ(delta1_of(3), R(3, 8));
  EXPECT_EQ(delta1_of(4), R(2, 3));
  EXPECT_EQ(delta1_of(5), R(21, 22));
  EXPECT_GT(R(21, 22), R(15, 16));
}

TEST(DeGiorgi, CExponent) {
  int branch = 0;
  EXPECT_EQ(degiorgi_C(3, R(1, 2), &branch).exponent, R(11));
  EXPECT_EQ(branch, 1);
  const auto d = degiorgi_constants(3, R(1), R(1, 2), 1.0, 1e6);
  EXPECT_EQ(d.C.exponent, R(11));
  EXPECT_EQ(d.R_exponent_1, R(2, 3));
  EXPECT_EQ(d.R_exponent_2, R(0));
  EXPECT_EQ(d.hypothesis_exponent, R(0));
  EXPECT_GT(std::stod(d.C0), 0.0);
}

TEST(DeGiorgi, C0PoleAndRadiusMonotonicity) {
  const double near = std::stod(degiorgi_constants(3, R(1), R(1, 3) + R(1, 1000000), 1.0, 1e6).C0);
  const double far = std::stod(degiorgi_constants(3, R(1), R(1, 2), 1.0, 1e6).C0);
  EXPECT_GT(near, 100 * far);
  const auto a = degiorgi_constants(5, R(1), R(7, 10), 1.0, 1e6);
  const auto b = degiorgi_constants(5, R(1), R(7, 10), 1.0, 2e6);
  EXPECT_GT(a.R_exponent_2, R(0));
  EXPECT_GT(std::stod(a.C0), std::stod(b.C0));
  EXPECT_THROW(degiorgi_constants(3, R(1), R(1, 3), 1.0, 1e6), std::domain_error);
  EXPECT_THROW(degiorgi_constants(3, R(1), R(1), 1.0, 1e6), std::domain_error);
}

TEST(Epsilon1, DirectSubstitution) {
  // eps1 = 1/2 / (C^{n^2/2} C_MS {bracket}^{n/2}) with n = 3, q = 1/2, delta = 1
  const long double bracket = (2 * 0.5L / (0.5L - 1.0L / 3) + 1) * 128 + 0.125L * 16 / (0.5L * (0.5L - 1.0L / 3));
  const long double expected = 0.5L / (std::pow(2.0L, 11 * 4.5L) * std::pow(bracket, 1.5L));
  const double got = std::stod(epsilon1_threshold(3, R(1), R(1, 2), 1.0));
  EXPECT_NEAR(got / static_cast<double>(expected), 1.0, 1e-10);
  EXPECT_GT(got, 0.0);
}

TEST(Epsilon1, MonotoneInCmsAndVanishesNearDelta) {
  const double a = std::stod(epsilon1_threshold(4, R(1), R(3, 4), 1.0));
  const double b = std::stod(epsilon1_threshold(4, R(1), R(3, 4), 2.0));
  EXPECT_GT(a, b);
  double prev = a;
  for (int j = 2; j <= 6; ++j) {
    const double v = std::stod(epsilon1_threshold(4, R(1), R(1) - pow(R(1, 10), j), 1.0));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Recursion, AllConstantsOne) {
  const auto r = recursion_simulate(0.5, 1, 1, 3, 8);
  EXPECT_TRUE(r.bound_respected);
  EXPECT_TRUE(r.tends_to_zero);
  // n = 3: S_{2l+1} = (1/2)^{3^l}
  for (std::size_t j = 0; j < r.steps.size(); ++j)
    EXPECT_NEAR(r.steps[j].log_S, std::pow(3.0, double(j)) * std::log(0.5), 1e-9 * std::pow(3.0, double(j)));
  EXPECT_TRUE(r.exponent_sum_check.is_zero());
}

TEST(Recursion, ProductOneStaysAtOne) {
  const auto r = recursion_simulate(1, 1, 1, 4, 10);
  for (const auto& s : r.steps) EXPECT_DOUBLE_EQ(s.log_bound, 0.0);
  EXPECT_FALSE(r.tends_to_zero);
  EXPECT_TRUE(r.bound_respected);
}

TEST(Recursion, MatchesDirectOracle) {
  const auto r = recursion_simulate(1e-6, 2, 1.5, 4, 6);
  const auto o = oracle::recursion(1e-6L, 2, 1.5L, 4, 6);
  ASSERT_EQ(r.steps.size(), o.size());
  for (std::size_t j = 0; j < o.size(); ++j) {
    if (o[j] <= std::numeric_limits<long double>::min()) break;
    EXPECT_NEAR(r.steps[j].log_S, static_cast<double>(std::log(o[j])), 1e-9 * std::fabs(r.steps[j].log_S) + 1e-12);
  }
  EXPECT_TRUE(r.log_direct_agree);
}

TEST(Recursion, DerivedConstantsConverge) {
  const auto d = degiorgi_constants(3, R(1), R(1, 2), 1.0, 1e6);
  const double C0 = std::stod(d.C0), C = std::exp2(d.C.exponent.to_double());
  const double S1 = 0.5 * std::exp(-(1.5 * std::log(C0) + 4.5 * std::log(C)));
  const auto r = recursion_simulate(S1, C0, C, 3, 12);
  EXPECT_TRUE(r.bound_respected);
  EXPECT_TRUE(r.tends_to_zero);
}

TEST(Recursion, ExponentSumIdentity) {
  for (int n = 3; n <= 9; ++n)
    for (std::size_t l : {1u, 5u, 20u}) EXPECT_TRUE(recursion_simulate(0.1, 1, 1, n, l).exponent_sum_check.is_zero());
  EXPECT_THROW(recursion_simulate(0, 1, 1, 3, 2), std::domain_error);
}
