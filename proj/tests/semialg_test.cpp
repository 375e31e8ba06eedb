#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "volsos/errors.hpp"
#include "volsos/semialg.hpp"

namespace volsos {
namespace {

using Role = SemialgebraicSet::Role;

// {r^2 - sum x_k^2 >= 0}
SemialgebraicSet ball_set(int n, double r) {
  std::vector<Polynomial::Term> t{{MultiIndex::zero(n), r * r}};
  for (int k = 0; k < n; ++k) {
    MultiIndex a = MultiIndex::zero(n);
    a.exponents[k] = 2;
    t.push_back({a, -1.0});
  }
  return SemialgebraicSet(n, {Polynomial::from_terms(n, Basis::Monomial, t)}, Role::InnerK);
}

SemialgebraicSet interval(double lo, double hi) {
  // (x - lo)(hi - x) >= 0
  return SemialgebraicSet(
      1, {Polynomial::from_terms(1, Basis::Monomial, {{{0}, -lo * hi}, {{1}, lo + hi}, {{2}, -1.0}})}, Role::InnerK);
}

TEST(Membership, Examples) {
  const auto k = ball_set(1, 1.0);
  EXPECT_TRUE(membership(k, std::vector<double>{0.0}));
  EXPECT_FALSE(membership(k, std::vector<double>{1.5}));
  const auto disk = ball_set(2, 0.5);
  EXPECT_TRUE(membership(disk, std::vector<double>{0.3, 0.3}));
  EXPECT_FALSE(membership(disk, std::vector<double>{0.4, 0.4}));
}

TEST(Normalization, AppendsBallOnceAndIsIdempotent) {
  const auto k = ball_set(2, 0.5);
  EXPECT_FALSE(k.has_ball_constraint());
  const auto nk = k.normalized();
  ASSERT_EQ(nk.inequalities().size(), 2u);
  EXPECT_TRUE(nk.has_ball_constraint());
  const auto nnk = nk.normalized();
  ASSERT_EQ(nnk.inequalities().size(), 2u);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_EQ(max_coeff_difference(nk.inequalities()[i], nnk.inequalities()[i]), 0.0);

  // The unit ball already present: nothing appended.
  EXPECT_EQ(ball_set(3, 1.0).normalized().inequalities().size(), 1u);
}

TEST(OuterDomain, Descriptions) {
  const auto x = OuterDomain::box({1.0});
  EXPECT_EQ(x.as_set().inequalities().size(), 1u);  // 1 - x^2 doubles as the ball
  const auto x2 = OuterDomain::box({0.6, 0.6});
  EXPECT_EQ(x2.as_set().inequalities().size(), 3u);
  EXPECT_THROW(OuterDomain::box({0.9, 0.9}), Error);
  EXPECT_THROW(OuterDomain::ball(2, 1.5), Error);
  EXPECT_DOUBLE_EQ(OuterDomain::ball(2).volume(), std::numbers::pi);
  EXPECT_DOUBLE_EQ(x2.volume(), 1.44);
}

TEST(CertifyAssumptions, IntervalInsideBox) {
  const auto k = interval(-0.5, 0.5);
  const auto summary = certify_assumptions(k, OuterDomain::box({1.0}), 20000, 1);
  EXPECT_DOUBLE_EQ(summary.interior_margin, 0.25);
  EXPECT_NEAR(summary.inner_box_half_width, 0.5, 1e-4);
  EXPECT_GT(summary.inclusion_hits, 0);
}

TEST(CertifyAssumptions, OriginOutsideK) {
  EXPECT_THROW(certify_assumptions(interval(1.0, 2.0), OuterDomain::ball(1), 1000, 1), InteriorViolation);
}

TEST(CertifyAssumptions, DiskInUnitDisk) {
  const auto summary = certify_assumptions(ball_set(2, 0.5), OuterDomain::ball(2), 20000, 2);
  EXPECT_DOUBLE_EQ(summary.interior_margin, 0.25);
}

TEST(CertifyAssumptions, InclusionViolationHasWitness) {
  // K = [-0.8, 0.8] is not inside X = [-0.5, 0.5].
  try {
    certify_assumptions(interval(-0.8, 0.8), OuterDomain::box({0.5}), 10000, 3);
    FAIL() << "expected InclusionViolation";
  } catch (const InclusionViolation& e) {
    ASSERT_EQ(e.witness.size(), 1u);
    EXPECT_GT(std::abs(e.witness[0]), 0.5);
    EXPECT_LE(std::abs(e.witness[0]), 0.8);
  }
}

TEST(InnerBox, Examples) {
  EXPECT_NEAR(inner_box_half_width(interval(-0.5, 0.5)), 0.5, 1e-4);
  EXPECT_NEAR(inner_box_half_width(ball_set(2, 0.5)), 0.5 / std::sqrt(2.0), 1e-4);
  const double s3 = inner_box_half_width(ball_set(3, 1.0));
  EXPECT_NEAR(s3, 1.0 / std::sqrt(3.0), 1e-4);
  EXPECT_NEAR(1.0 / s3, std::sqrt(3.0), 1e-3);
}

TEST(InnerBox, BracketProperty) {
  const double tol = 1e-4;
  for (double r : {0.3, 0.55, 0.9}) {
    const auto k = ball_set(2, r);
    const double s = inner_box_half_width(k, tol);
    // corners of the box are the binding points for a disk
    const std::vector<double> inside{s, s};
    const std::vector<double> outside{s + 2 * tol, s + 2 * tol};
    EXPECT_TRUE(k.contains(inside));
    EXPECT_FALSE(k.contains(outside));
  }
}

TEST(InnerBox, NoFeasibleBox) {
  // A set not containing a neighbourhood of the origin.
  const auto k = SemialgebraicSet(
      1, {Polynomial::from_terms(1, Basis::Monomial, {{{1}, 1.0}})}, Role::InnerK);  // x >= 0
  EXPECT_THROW(inner_box_half_width(k), NoFeasibleBox);
}

TEST(Moments, ClosedFormExamples) {
  EXPECT_NEAR(lebesgue_moment(OuterDomain::box({1.0}), {2}), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(lebesgue_moment(OuterDomain::ball(2), {0, 0}), std::numbers::pi, 1e-14);
  EXPECT_NEAR(lebesgue_moment(OuterDomain::ball(2), {2, 0}), std::numbers::pi / 4.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
}

TEST(Moments, OddVanish) {
  for (const auto& x : {OuterDomain::box({0.5, 0.7}), OuterDomain::ball(2, 0.8)})
    for (const auto& a : graded_basis(2, 7)->elements())
      if (a[0] % 2 || a[1] % 2) {
        EXPECT_EQ(lebesgue_moment(x, a), 0.0);
      }
}

// Monte Carlo oracle for the closed forms: plain mt19937 with rejection
// sampling from the bounding cube, independent of the library sampler.
TEST(Moments, AgreeWithMonteCarloOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<MultiIndex> alphas{{0, 0}, {2, 0}, {0, 4}, {2, 2}, {4, 2}};
  for (const auto& x : {OuterDomain::box({0.6, 0.7}), OuterDomain::ball(2, 0.9)}) {
    const int cube_draws = 4'000'000;
    std::vector<double> sum(alphas.size()), sumsq(alphas.size());
    for (int s = 0; s < cube_draws; ++s) {
      const std::vector<double> p{u(rng), u(rng)};
      if (!x.contains(p)) continue;
      for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double v = std::pow(p[0], alphas[i][0]) * std::pow(p[1], alphas[i][1]);
        sum[i] += v;
        sumsq[i] += v * v;
      }
    }
    // integral = 4 * E[f 1_X] over the cube [-1, 1]^2
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double mean = sum[i] / cube_draws;
      const double var = sumsq[i] / cube_draws - mean * mean;
      const double est = 4.0 * mean;
      const double se = 4.0 * std::sqrt(var / cube_draws);
      EXPECT_NEAR(lebesgue_moment(x, alphas[i]), est, 4.0 * se + 1e-12) << "alpha index " << i;
    }
  }
}

TEST(Moments, ChebyshevBasisMatchesMonomialExpansion) {
  for (const auto& x : {OuterDomain::box({0.5}), OuterDomain::box({1.0}), OuterDomain::ball(1, 0.8)}) {
    for (int j = 0; j <= 14; ++j) {
      const auto mono = to_basis(Polynomial::basis_element({j}, Basis::ChebyshevTensor), Basis::Monomial);
      double expected = 0.0;
      for (const auto& t : mono.terms()) expected += t.coefficient * lebesgue_moment(x, t.index);
      EXPECT_NEAR(basis_moment(x, {j}, Basis::ChebyshevTensor), expected, 1e-12) << j;
    }
  }
  // 2/(1 - j^2) on [-1, 1]
  EXPECT_NEAR(basis_moment(OuterDomain::box({1.0}), {100}, Basis::ChebyshevTensor), 2.0 / (1.0 - 100.0 * 100.0),
              1e-15);
}

TEST(Integrate, Examples) {
  const auto x = OuterDomain::box({1.0});
  EXPECT_DOUBLE_EQ(integrate(x, Polynomial::constant(1, 1.0)), 2.0);
  EXPECT_NEAR(integrate(x, Polynomial::unit_ball(1)), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(integrate(OuterDomain::ball(2), Polynomial::from_terms(2, Basis::Monomial, {{{1, 1}, 1.0}})), 0.0);
  EXPECT_NEAR(integrate(x, Polynomial::unit_ball(1, Basis::ChebyshevTensor)), 4.0 / 3.0, 1e-15);
}

TEST(Integrate, AgreesWithMonteCarloOnRandomPolynomials) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const auto x = trial % 2 ? OuterDomain::ball(n, 0.9) : OuterDomain::box(std::vector<double>(n, 0.5));
    std::vector<double> c(graded_size(n, 1 + trial % 6));
    for (double& v : c) v = normal(rng);
    const Polynomial p(n, Basis::Monomial, c);
    const double cube = std::pow(2.0, n);
    const int draws = 40000;
    double s = 0.0, s2 = 0.0;
    std::vector<double> pt(n);
    for (int i = 0; i < draws; ++i) {
      for (double& v : pt) v = u(rng);
      const double f = x.contains(pt) ? p(pt) : 0.0;
      s += f;
      s2 += f * f;
    }
    const double mean = s / draws;
    const double se = cube * std::sqrt((s2 / draws - mean * mean) / draws);
    if (std::abs(integrate(x, p) - cube * mean) > 4.0 * se) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

}  // namespace
}  // namespace volsos
