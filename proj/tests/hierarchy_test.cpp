#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "volsos/errors.hpp"
#include "volsos/hierarchy.hpp"
#include "volsos/montecarlo.hpp"

namespace volsos::hierarchy {
namespace {

using Role = SemialgebraicSet::Role;

// {r^2 - |x|^2 >= 0}
SemialgebraicSet ball_k(int n, double r) {
  std::vector<Polynomial::Term> t{{MultiIndex::zero(n), r * r}};
  for (int i = 0; i < n; ++i) {
    MultiIndex a = MultiIndex::zero(n);
    a.exponents[i] = 2;
    t.push_back({a, -1.0});
  }
  return SemialgebraicSet(n, {Polynomial::from_terms(n, Basis::Monomial, t)}, Role::InnerK);
}

const SemialgebraicSet kInterval = ball_k(1, 0.5);
const OuterDomain kUnitInterval = OuterDomain::box({1.0});

// min over quadratics of 2 c0 + 2 c2 / 3 with p >= 1 on a grid of K and
// p >= 0 on a grid of X, by enumerating vertices of the 3-variable LP.
double grid_lp_oracle() {
  std::vector<std::array<double, 4>> rows;  // a . c >= rhs as {1, x, x^2, rhs}
  for (int i = 0; i <= 20; ++i) {
    const double t = -0.5 + i / 20.0;
    rows.push_back({1.0, t, t * t, 1.0});
  }
  for (int i = 0; i <= 40; ++i) {
    const double t = -1.0 + i / 20.0;
    rows.push_back({1.0, t, t * t, 0.0});
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      for (std::size_t k = j + 1; k < rows.size(); ++k) {
        Eigen::Matrix3d a;
        Eigen::Vector3d rhs;
        for (int c = 0; c < 3; ++c) {
          a(0, c) = rows[i][c];
          a(1, c) = rows[j][c];
          a(2, c) = rows[k][c];
        }
        rhs << rows[i][3], rows[j][3], rows[k][3];
        const auto lu = a.fullPivLu();
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d c = lu.solve(rhs);
        bool feasible = true;
        for (const auto& r : rows)
          if (r[0] * c(0) + r[1] * c(1) + r[2] * c(2) < r[3] - 1e-12) {
            feasible = false;
            break;
          }
        if (feasible) best = std::min(best, 2.0 * c(0) + 2.0 * c(2) / 3.0);
      }
  return best;
}

TEST(Assemble, IntervalBlockPattern) {
  const auto as = assemble(kInterval, kUnitInterval, 2, Basis::Monomial);
  EXPECT_EQ(as.problem.num_constraints(), 3);
  ASSERT_EQ(as.blocks.size(), 5u);
  const std::vector<int> sizes{2, 1, 1, 2, 1};
  for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(as.problem.blocks[b].size, sizes[b]) << b;
  EXPECT_EQ(as.blocks[0].role, Role::InnerK);
  EXPECT_EQ(as.blocks[3].role, Role::OuterX);
}

TEST(Assemble, DegreeTooSmall) {
  EXPECT_THROW(assemble(kInterval, kUnitInterval, 0, Basis::Monomial), DegreeTooSmall);
  EXPECT_THROW(assemble(kInterval, kUnitInterval, 3, Basis::Monomial), Error);
}

TEST(Assemble, ConstantPolynomialIsRepresentable) {
  // p = c: G_0^K = (c - 1) e0 e0', G_0^X = c e0 e0', all others zero.
  for (auto basis : {Basis::Monomial, Basis::ChebyshevTensor})
    for (int d : {2, 4, 6}) {
      const auto as = assemble(ball_k(2, 0.5), OuterDomain::ball(2), d, basis);
      auto z = sdp::BlockMatrix::zeros(as.problem.blocks);
      const double c = 3.0;
      for (std::size_t b = 0; b < as.blocks.size(); ++b)
        if (as.blocks[b].multiplier == 0) z.blocks[b](0, 0) = as.blocks[b].role == Role::InnerK ? c - 1.0 : c;
      const auto r = sdp::residuals(as.problem, Eigen::VectorXd::Zero(as.problem.num_constraints()), z);
      EXPECT_LT(r.dual, 1e-15);
      EXPECT_NEAR(sdp::inner(sdp::BlockMatrix::from_sparse(as.problem.blocks, as.problem.c), z), c * std::numbers::pi,
                  1e-12);
    }
}

TEST(Certify, HandBuiltCertificate) {
  // p = 1 + x^2 = 1 * (1) ... as a member of Q(X): g_0 = 1 with Gram diag(1, 1) on (1, x)
  const auto p = Polynomial::from_terms(1, Basis::Monomial, {{{0}, 1.0}, {{2}, 1.0}});
  QuadraticModuleCertificate cert;
  cert.role = Role::InnerK;  // p - 1 = x^2: Gram diag(0, 1)
  cert.multipliers = {Polynomial::constant(1, 1.0), Polynomial::from_terms(1, Basis::Monomial, {{{0}, 1.0}, {{2}, -1.0}})};
  cert.half_degrees = {1, 0};
  cert.grams = {Eigen::Matrix2d{{0.0, 0.0}, {0.0, 1.0}}, Eigen::MatrixXd::Zero(1, 1)};
  auto check = certify(p, cert);
  EXPECT_EQ(check.residual, 0.0);
  EXPECT_EQ(check.min_eigenvalues[0], 0.0);

  cert.grams[0](0, 1) = cert.grams[0](1, 0) = 1e-3;
  EXPECT_GE(certify(p, cert).residual, 1e-3);

  QuadraticModuleCertificate zero;
  zero.multipliers = {Polynomial::constant(1, 1.0)};
  zero.half_degrees = {2};
  zero.grams = {Eigen::MatrixXd::Zero(3, 3)};
  EXPECT_EQ(certify(Polynomial(1), zero).residual, 0.0);
}

TEST(SolveLevel, KEqualsX) {
  const auto k = ball_k(1, 1.0);
  for (int d : {2, 4, 6}) {
    const auto r = solve_level(k, kUnitInterval, d, Basis::Monomial);
    ASSERT_EQ(r.status, sdp::Status::Optimal);
    EXPECT_NEAR(r.v_d, 2.0, 1e-6) << d;
  }
}

TEST(SolveLevel, IntervalDegreeTwoMatchesOracles) {
  const auto r = solve_level(kInterval, kUnitInterval, 2, Basis::Monomial);
  ASSERT_EQ(r.status, sdp::Status::Optimal);
  EXPECT_NEAR(r.v_d, 16.0 / 9.0, 1e-6);  // p = 4/3 (1 - x^2)
  const double lp = grid_lp_oracle();
  EXPECT_NEAR(lp, 16.0 / 9.0, 1e-9);
  EXPECT_GE(r.v_d, lp - 1e-6);
  EXPECT_NEAR(r.v_d, integrate(kUnitInterval, r.p), 1e-9);
  EXPECT_LE(r.cert_residual, 1e-6);
}

TEST(SolveLevel, ChebyshevAgreesWithMonomial) {
  for (int d : {2, 6, 10}) {
    const auto a = solve_level(kInterval, kUnitInterval, d, Basis::Monomial);
    const auto b = solve_level(kInterval, kUnitInterval, d, Basis::ChebyshevTensor);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_NEAR(a.v_d, b.v_d, 1e-6) << d;
  }
}

TEST(SolveLevel, DiskUpperBound) {
  const auto r = solve_level(ball_k(2, 0.5), OuterDomain::ball(2), 4, Basis::Monomial);
  ASSERT_EQ(r.status, sdp::Status::Optimal);
  EXPECT_GE(r.v_d, std::numbers::pi / 4.0 - 1e-6);
  EXPECT_LE(r.cert_residual, 1e-6);
}

void expect_pointwise_feasible(const LevelResult& r, const SemialgebraicSet& k, const OuterDomain& x) {
  int checked = 0;
  for (const auto& pt : mc::sample(x, 40000, 5)) {
    const double v = r.p(pt);
    EXPECT_GE(v, -1e-6);
    if (k.contains(pt) && checked < 10000) {
      EXPECT_GE(v, 1.0 - 1e-6);
      ++checked;
    }
  }
  EXPECT_GE(checked, 2000);
}

TEST(Run, IntervalSweep) {
  const auto seq = run(kInterval, kUnitInterval, 2, 8, 2, Basis::Monomial, {}, 1.0);
  ASSERT_EQ(seq.levels.size(), 4u);
  EXPECT_TRUE(seq.monotone);
  EXPECT_TRUE(seq.warnings.empty());
  for (std::size_t i = 0; i < seq.levels.size(); ++i) {
    const auto& l = seq.levels[i];
    ASSERT_TRUE(l.ok()) << l.status_text();
    EXPECT_GE(l.v_d, 1.0 - 1e-6);
    EXPECT_LE(l.cert_residual, 1e-6);
    EXPECT_GE(l.min_gram_eigenvalue, -1e-7);
    if (i) EXPECT_LE(l.v_d, seq.levels[i - 1].v_d + 1e-6);
  }
  expect_pointwise_feasible(seq.levels.back(), kInterval, kUnitInterval);
}

TEST(Run, KEqualsXIsConstant) {
  const auto seq = run(ball_k(2, 1.0), OuterDomain::ball(2), 2, 6, 2, Basis::Monomial);
  for (const auto& l : seq.levels) {
    ASSERT_TRUE(l.ok());
    EXPECT_NEAR(l.v_d, std::numbers::pi, 1e-5);
  }
}

TEST(Run, DiskSweep) {
  const auto k = ball_k(2, 0.5);
  const auto x = OuterDomain::ball(2);
  const auto seq = run(k, x, 2, 10, 2, Basis::Monomial, {}, std::numbers::pi / 4.0);
  EXPECT_TRUE(seq.monotone);
  for (const auto& l : seq.levels) {
    ASSERT_TRUE(l.ok()) << l.d << " " << l.status_text();
    EXPECT_GE(l.v_d, std::numbers::pi / 4.0 - 1e-6);
    EXPECT_LE(l.cert_residual, 1e-6);
  }
  expect_pointwise_feasible(seq.levels.back(), k, x);
}

TEST(Run, RejectsOddSteps) { EXPECT_THROW(run(kInterval, kUnitInterval, 2, 8, 3, Basis::Monomial), Error); }

}  // namespace
}  // namespace volsos::hierarchy
