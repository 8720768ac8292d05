#include <gtest/gtest.h>

#include "stabcert/curvature.hpp"
#include "stabcert/published.hpp"
#include "support/oracles.hpp"

using namespace stabcert;
using R = Rational;

namespace {
R from(const oracle::Q& q) { return R::parse(oracle::str(q)); }
}  // namespace

TEST(ParamSet, DerivedQuantities) {
  const auto p3 = ParamSet::published_row(3);
  EXPECT_EQ(p3.delta0(), R(1, 3));
  EXPECT_EQ(ParamSet::published_row(4).delta0(), R(1, 2));
  EXPECT_EQ(ParamSet::published_row(5).delta0(), R(21, 22));
  EXPECT_EQ(p3.q(), R(20, 11));
  EXPECT_EQ(ParamSet::published_row(5).q(), R(5000, 4347));
  EXPECT_EQ(ParamSet::from_delta0(3, R(1, 3), R(30, 11), R(18, 11), R(3, 2)), p3);
}

TEST(ParamSet, RejectsNonpositive) {
  EXPECT_THROW(ParamSet::from_row(3, R(1), R(0), R(1), R(1)), std::invalid_argument);
  EXPECT_THROW(ParamSet::from_row(3, R(1), R(1), R(-1), R(1)), std::invalid_argument);
  EXPECT_THROW(ParamSet::from_row(2, R(1), R(1), R(1), R(1)), std::invalid_argument);
}

TEST(FEval, Examples) {
  const auto p3 = ParamSet::published_row(3);
  EXPECT_EQ(F_eval(p3, R(1)), R(9, 11));
  EXPECT_EQ(F_eval(p3, R(0)), R(909, 176));
  const auto p4 = ParamSet::published_row(4);
  EXPECT_EQ(F_eval(p4, R(1)), R(3, 25));
  EXPECT_EQ(F_eval(p4, R(0)), R(377, 5260));
  EXPECT_THROW(F_eval(p3, R(-1, 10)), std::domain_error);
  EXPECT_THROW(F_eval(p3, R(11, 10)), std::domain_error);
}

TEST(FEval, MaxBranchAtNThree) {
  // beta - alpha = -3/22 < 0 = (n-3) alpha
  EXPECT_EQ(F_t1_terms(ParamSet::published_row(3)).branch, MaxBranch::second);
  const auto tie = ParamSet::from_row(3, R(10, 11), R(30, 11), R(3, 2), R(3, 2));
  EXPECT_EQ(F_t1_terms(tie).branch, MaxBranch::both);
  const auto first = ParamSet::from_row(4, R(1), R(2), R(1), R(2));
  EXPECT_EQ(F_t1_terms(first).branch, MaxBranch::first);
  const auto both = ParamSet::from_row(4, R(1), R(2), R(1), R(1));  // 2 - 1 = 1 = 1
  EXPECT_EQ(F_t1_terms(both).branch, MaxBranch::both);
}

TEST(Epsilon, PublishedRowsReproduce) {
  for (int n : published::kRows) {
    const auto e = epsilon_of(ParamSet::published_row(n));
    EXPECT_EQ(e.epsilon, published::quoted(n).epsilon) << "n = " << n;
    EXPECT_EQ(e.epsilon, from(oracle::epsilon(oracle::row(n))));
    EXPECT_EQ(e.epsilon, min(e.F_at_0, e.F_at_1));
  }
}

TEST(Epsilon, MaxBranchEqualsMaxOverBothChoices) {
  Rng rng = chunk_rng(31, 0);
  for (int i = 0; i < 500; ++i) {
    const int n = static_cast<int>(uniform_int(rng, 3, 8));
    const ParamSet p = ParamSet::from_row(n, abs(random_rational(rng)), abs(random_rational(rng)) + R(1, 9),
                                          abs(random_rational(rng)) + R(1, 9), abs(random_rational(rng)) + R(1, 9));
    const Rational base = Rational(n * n - 4, 4) * p.b - (Rational(n) * p.beta + Rational(n - 1) * p.alpha);
    const Rational b1 = base - (Rational(n - 2) * p.beta - p.alpha);
    const Rational b2 = base - Rational(n - 3) * p.alpha;
    EXPECT_EQ(F_t1_terms(p).value, min(b1, b2));
  }
}

TEST(Linearity, Examples) {
  for (int n : published::kRows) {
    const auto p = ParamSet::published_row(n);
    EXPECT_EQ(F_eval(p, R(1, 2)), (F_eval(p, R(0)) + F_eval(p, R(1))) / 2);
    EXPECT_TRUE(linearity_check(p, 100, 5));
  }
}

TEST(Linearity, EndpointDominance) {
  Rng rng = chunk_rng(32, 0);
  for (int n : published::kRows) {
    const auto p = ParamSet::published_row(n);
    const R eps = epsilon_of(p).epsilon;
    for (int i = 0; i < 200; ++i) EXPECT_GE(F_eval(p, random_unit_rational(rng)), eps);
  }
}

TEST(Lemma32, ZeroSample) {
  const auto p = ParamSet::published_row(3);
  const R Q = f_min_closed_form(3, p.a, p.alpha, p.beta);
  EXPECT_EQ(lemma32_margin(p, Q, {R(0), R(0), R(0)}, R(0)), R(0));
}

TEST(Lemma32, AntisymmetricSampleWithoutLinearTerm) {
  const auto p = ParamSet::published_row(3);
  const R Q = f_min_closed_form(3, p.a, p.alpha, p.beta);
  // aS + BiRic = 2a - beta - alpha(-1 + 1) with E = 0
  const R lhs = 2 * p.a - p.beta;
  EXPECT_EQ(lemma32_margin(p, Q, {R(1), R(-1), R(0)}, R(0)), lhs);
  EXPECT_GE(lhs, Q);
  EXPECT_LT(Q, R(0));
}

TEST(Lemma32, TightSampleHasZeroMargin) {
  for (int n : published::kRows) {
    const auto p = ParamSet::published_row(n);
    const R Q = f_min_closed_form(n, p.a, p.alpha, p.beta);
    for (const R& E : {R(1), R(-3, 7), R(5, 2)}) {
      const auto lambda = lemma32_tight_sample(p, E);
      R sum(0);
      for (const auto& l : lambda) sum += l;
      EXPECT_EQ(sum, R(0));
      EXPECT_EQ(lemma32_margin(p, Q, lambda, E), R(0));
    }
  }
}

TEST(Lemma32, SignOfEDoesNotMatter) {
  const auto p = ParamSet::published_row(4);
  EXPECT_EQ(f_min_closed_form(4, p.a, p.alpha, p.beta), minimize(p.quad_input(R(-1))).f_min_coefficient);
  const auto plus = lemma32_tight_sample(p, R(2));
  const auto minus = lemma32_tight_sample(p, R(-2));
  for (std::size_t i = 0; i < plus.size(); ++i) EXPECT_EQ(plus[i], -minus[i]);
}

TEST(Lemma32, MarginMatchesFloatOracle) {
  Rng rng = chunk_rng(33, 0);
  for (int n : published::kRows) {
    const auto p = ParamSet::published_row(n);
    const R Q = f_min_closed_form(n, p.a, p.alpha, p.beta);
    for (int i = 0; i < 200; ++i) {
      std::vector<R> l(static_cast<std::size_t>(n));
      std::vector<long double> ld(l.size());
      R sum(0);
      for (std::size_t j = 0; j + 1 < l.size(); ++j) {
        l[j] = random_rational(rng);
        sum += l[j];
      }
      l.back() = -sum;
      for (std::size_t j = 0; j < l.size(); ++j) ld[j] = l[j].to_double();
      const R E = random_rational(rng);
      const long double o = oracle::lemma32(oracle::row(n), Q.to_double(), ld, E.to_double());
      EXPECT_NEAR(static_cast<double>(o), lemma32_margin(p, Q, l, E).to_double(), 1e-6 * (1 + std::fabs(double(o))));
    }
  }
}

TEST(Lemma32, SamplingReportsZeroViolations) {
  for (int n : published::kRows) {
    const auto rep = lemma32_sampling_check(ParamSet::published_row(n), 5000, 77, 2);
    ASSERT_EQ(rep.entries().size(), 1u);
    const auto& e = rep.entries().front();
    EXPECT_EQ(e.status, CheckStatus::pass) << e.detail;
    EXPECT_EQ(e.margin, R(0));  // tight samples reach the bound
  }
}

TEST(Lemma32, IndefiniteRowIsRejected) {
  // a too small: the quadratic part is indefinite
  const auto p = ParamSet::from_row(3, R(1, 10), R(30, 11), R(18, 11), R(3, 2));
  const std::vector<R> l{R(1), R(1), R(-2)};
  const R lhs = lemma32_margin(p, R(0), l, R(0));
  EXPECT_LT(lhs, R(0));
  EXPECT_THROW(lemma32_sampling_check(p, 10, 1, 1), std::domain_error);
}

TEST(Lemma32, SamplingDeterministicAcrossThreads) {
  const auto p = ParamSet::published_row(5);
  const auto a = lemma32_sampling_check(p, 20000, 9, 1);
  const auto b = lemma32_sampling_check(p, 20000, 9, 4);
  EXPECT_EQ(a.entries().front().margin, b.entries().front().margin);
  EXPECT_EQ(a.entries().front().value, b.entries().front().value);
}
