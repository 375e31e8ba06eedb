#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "volsos/errors.hpp"
#include "volsos/poly.hpp"

namespace volsos {
namespace {

Polynomial mono(int n, std::vector<Polynomial::Term> terms) {
  return Polynomial::from_terms(n, Basis::Monomial, terms);
}

Polynomial random_poly(int n, int d, Basis basis, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> c(graded_size(n, d));
  for (double& v : c) v = normal(rng);
  return Polynomial(n, basis, c);
}

std::vector<double> random_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

double relative_coeff_error(const Polynomial& p, const Polynomial& q) {
  return max_coeff_difference(p, q) / std::max(1.0, p.max_abs_coeff());
}

TEST(GradedBasis, OrderAndCardinality) {
  const auto b = graded_basis(1, 2);
  ASSERT_EQ(b->size(), 3u);
  EXPECT_EQ((*b)[0], MultiIndex({0}));
  EXPECT_EQ((*b)[1], MultiIndex({1}));
  EXPECT_EQ((*b)[2], MultiIndex({2}));
  EXPECT_EQ(graded_basis(2, 2)->size(), 6u);
  EXPECT_EQ(graded_basis(3, 4)->size(), 35u);

  const auto b2 = graded_basis(2, 2);
  EXPECT_EQ((*b2)[1], MultiIndex({1, 0}));
  EXPECT_EQ((*b2)[2], MultiIndex({0, 1}));
  EXPECT_EQ((*b2)[4], MultiIndex({1, 1}));
}

TEST(GradedBasis, CardinalityAndRankConsistent) {
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 9; ++d) {
      const auto b = graded_basis(n, d);
      ASSERT_EQ(b->size(), binomial(n + d, d)) << n << " " << d;
      for (std::size_t i = 0; i < b->size(); ++i) ASSERT_EQ(graded_rank((*b)[i]), i);
    }
  }
}

TEST(Polynomial, EvaluateExamples) {
  const auto p = mono(2, {{{0, 0}, 1.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}});
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{0.0, 0.0}), 1.0);

  const auto t2 = Polynomial::basis_element({2}, Basis::ChebyshevTensor);
  EXPECT_DOUBLE_EQ(t2.evaluate(std::vector<double>{1.0}), 1.0);
  EXPECT_NEAR(t2.evaluate(std::vector<double>{0.3}), -0.82, 1e-15);
}

TEST(Polynomial, EvaluateDimensionMismatch) {
  const auto p = Polynomial::unit_ball(2);
  EXPECT_THROW(p.evaluate(std::vector<double>{0.1}), DimensionMismatch);
}

TEST(Polynomial, MultiplyExamples) {
  const auto a = mono(1, {{{0}, 1.0}, {{1}, 1.0}});
  const auto b = mono(1, {{{0}, 1.0}, {{1}, -1.0}});
  const auto prod = a * b;
  EXPECT_EQ(prod.degree(), 2);
  EXPECT_DOUBLE_EQ(prod.coeff({0}), 1.0);
  EXPECT_DOUBLE_EQ(prod.coeff({1}), 0.0);
  EXPECT_DOUBLE_EQ(prod.coeff({2}), -1.0);

  const auto t1 = Polynomial::basis_element({1}, Basis::ChebyshevTensor);
  const auto t1sq = t1 * t1;
  EXPECT_DOUBLE_EQ(t1sq.coeff({0}), 0.5);
  EXPECT_DOUBLE_EQ(t1sq.coeff({1}), 0.0);
  EXPECT_DOUBLE_EQ(t1sq.coeff({2}), 0.5);

  EXPECT_TRUE((a * Polynomial(1)).is_zero());
}

TEST(Polynomial, MultiplyBasisMismatch) {
  const auto a = Polynomial::unit_ball(1, Basis::Monomial);
  const auto b = Polynomial::unit_ball(1, Basis::ChebyshevTensor);
  EXPECT_THROW(a * b, BasisMismatch);
}

TEST(Polynomial, CleanupRemovesFloatNoise) {
  const auto p = Polynomial(1, Basis::Monomial, {1.0, 1e-15, 0.0});
  EXPECT_EQ(p.degree(), 0);
  EXPECT_EQ(p.terms().size(), 1u);
}

TEST(Polynomial, RingAxiomsPointwise) {
  std::mt19937_64 rng(11);
  for (Basis basis : {Basis::Monomial, Basis::ChebyshevTensor}) {
    for (int n = 1; n <= 3; ++n) {
      const auto p = random_poly(n, 4, basis, rng);
      const auto q = random_poly(n, 3, basis, rng);
      const auto sum = p + q;
      const auto prod = p * q;
      EXPECT_EQ(prod.degree(), 7);
      for (int i = 0; i < 100; ++i) {
        const auto x = random_point(n, rng);
        EXPECT_NEAR(sum(x), p(x) + q(x), 1e-9);
        EXPECT_NEAR(prod(x), p(x) * q(x), 1e-9);
      }
    }
  }
}

TEST(ToBasis, Examples) {
  const auto x2 = mono(1, {{{2}, 1.0}});
  const auto c = to_basis(x2, Basis::ChebyshevTensor);
  EXPECT_EQ(c.basis(), Basis::ChebyshevTensor);
  EXPECT_DOUBLE_EQ(c.coeff({0}), 0.5);
  EXPECT_DOUBLE_EQ(c.coeff({1}), 0.0);
  EXPECT_DOUBLE_EQ(c.coeff({2}), 0.5);

  const auto one = to_basis(Polynomial::constant(1, 1.0), Basis::ChebyshevTensor);
  EXPECT_EQ(one.degree(), 0);
  EXPECT_DOUBLE_EQ(one.coeff({0}), 1.0);

  // T_3 = 4x^3 - 3x
  const auto t3 = to_basis(Polynomial::basis_element({3}, Basis::ChebyshevTensor), Basis::Monomial);
  EXPECT_DOUBLE_EQ(t3.coeff({3}), 4.0);
  EXPECT_DOUBLE_EQ(t3.coeff({1}), -3.0);
  EXPECT_DOUBLE_EQ(t3.coeff({0}), 0.0);
}

TEST(ToBasis, RoundTripDegreeEightUnivariate) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    for (Basis from : {Basis::Monomial, Basis::ChebyshevTensor}) {
      const Basis other = from == Basis::Monomial ? Basis::ChebyshevTensor : Basis::Monomial;
      const auto p = random_poly(1, 8, from, rng);
      const auto q = to_basis(p, other);
      EXPECT_LE(relative_coeff_error(p, to_basis(q, from)), 1e-12);
      for (int i = 0; i < 20; ++i) {
        const auto x = random_point(1, rng);
        EXPECT_NEAR(p(x), q(x), 1e-10);
      }
    }
  }
}

// Round trips where binary64 storage of the intermediate coefficients admits
// 1e-12: the Chebyshev <-> monomial change of basis has condition ~2^(d-1),
// so degree-100 univariate round trips are out of reach in double.
TEST(ToBasis, RoundTripProperty) {
  std::mt19937_64 rng(5);
  struct Case {
    int n;
    int d;
    Basis from;
  };
  const std::vector<Case> cases{{1, 12, Basis::ChebyshevTensor}, {1, 30, Basis::Monomial},
                                {2, 12, Basis::ChebyshevTensor}, {2, 12, Basis::Monomial},
                                {3, 12, Basis::ChebyshevTensor}, {3, 12, Basis::Monomial}};
  for (const auto& c : cases) {
    const Basis other = c.from == Basis::Monomial ? Basis::ChebyshevTensor : Basis::Monomial;
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = random_poly(c.n, c.d, c.from, rng);
      EXPECT_LE(relative_coeff_error(p, to_basis(to_basis(p, other), c.from)), 1e-12)
          << "n=" << c.n << " d=" << c.d;
    }
  }
}

TEST(ToBasis, EvaluationAgreesMultivariate) {
  std::mt19937_64 rng(8);
  const auto p = random_poly(3, 12, Basis::ChebyshevTensor, rng);
  const auto q = to_basis(p, Basis::Monomial);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(3, rng);
    EXPECT_NEAR(p(x), q(x), 1e-10);
  }
}

}  // namespace
}  // namespace volsos
