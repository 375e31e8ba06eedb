#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "volsos/poly.hpp"

namespace volsos {

// {x : g_i(x) >= 0 for all i}. Inequalities are stored in the monomial basis.
class SemialgebraicSet {
 public:
  enum class Role { InnerK, OuterX };

  SemialgebraicSet(int dimension, std::vector<Polynomial> inequalities, Role role);

  int dimension() const { return n_; }
  Role role() const { return role_; }
  const std::vector<Polynomial>& inequalities() const { return g_; }
  int max_degree() const;

  // Copy with the ball polynomial 1 - sum x_k^2 appended when absent.
  SemialgebraicSet normalized() const;
  bool has_ball_constraint() const;

  bool contains(std::span<const double> x) const;

 private:
  int n_;
  std::vector<Polynomial> g_;
  Role role_;
};

// Outer set X: a centred box or ball inside the unit ball, with analytic moments.
class OuterDomain {
 public:
  enum class Shape { Box, Ball };

  static OuterDomain box(std::vector<double> half_widths);
  static OuterDomain ball(int dimension, double radius = 1.0);

  Shape shape() const { return shape_; }
  int dimension() const { return n_; }
  const std::vector<double>& half_widths() const { return half_widths_; }
  double radius() const { return radius_; }

  double volume() const;
  bool contains(std::span<const double> x) const;
  // Normalised description: box a_k^2 - x_k^2 >= 0 or ball R^2 - |x|^2 >= 0, plus the unit ball.
  const SemialgebraicSet& as_set() const { return set_; }

 private:
  OuterDomain(Shape shape, int n, std::vector<double> half_widths, double radius);

  Shape shape_;
  int n_;
  std::vector<double> half_widths_;
  double radius_ = 0.0;
  SemialgebraicSet set_;
};

struct GeometrySummary {
  double inner_box_half_width = 0.0;  // s*
  double r = 0.0;                     // 1 / s*
  double interior_margin = 0.0;       // min_i g_i^K(0)
  int inclusion_samples = 0;
  int inclusion_hits = 0;             // sampled points of K (all of them inside X and B_n)
};

bool membership(const SemialgebraicSet& set, std::span<const double> x);

// Largest s in (0, 1] such that a surface grid of [-s, s]^n lies in K, by
// bisection to within tol. grid_per_axis <= 0 picks 33 for n <= 3 and a
// smaller count for higher dimension.
double inner_box_half_width(const SemialgebraicSet& k, double tol = 1e-4, int grid_per_axis = 0);

// Checks g_i^K(0) > 0 and samples the cube [-1, 1]^n for points of K outside X
// or outside the unit ball (a statistical, not exact, inclusion certificate).
// Throws InteriorViolation, InclusionViolation or NoFeasibleBox.
GeometrySummary certify_assumptions(const SemialgebraicSet& k, const OuterDomain& x, int samples = 100000,
                                    std::uint64_t seed = 0, double box_tol = 1e-4);

double unit_ball_volume(int n);

// Integral over X of x^alpha (Monomial) or T_alpha (ChebyshevTensor).
double lebesgue_moment(const OuterDomain& x, const MultiIndex& alpha);
double basis_moment(const OuterDomain& x, const MultiIndex& alpha, Basis basis);
// Moments of every element of graded_basis(n, d), in graded order.
std::vector<double> moment_vector(const OuterDomain& x, int d, Basis basis);

double integrate(const OuterDomain& x, const Polynomial& p);

}  // namespace volsos
