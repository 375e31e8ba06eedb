#include "volsos/semialg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "volsos/errors.hpp"
#include "volsos/rng.hpp"

namespace volsos {

SemialgebraicSet::SemialgebraicSet(int dimension, std::vector<Polynomial> inequalities, Role role)
    : n_(dimension), role_(role) {
  if (dimension < 1) throw DimensionMismatch("set dimension must be >= 1");
  g_.reserve(inequalities.size());
  for (auto& g : inequalities) {
    if (g.dimension() != dimension)
      throw DimensionMismatch("inequality of dimension " + std::to_string(g.dimension()) + " in a set of dimension " +
                              std::to_string(dimension));
    g_.push_back(to_basis(g, Basis::Monomial));
  }
}

int SemialgebraicSet::max_degree() const {
  int d = 0;
  for (const auto& g : g_) d = std::max(d, g.degree());
  return d;
}

bool SemialgebraicSet::has_ball_constraint() const {
  const auto ball = Polynomial::unit_ball(n_);
  return std::any_of(g_.begin(), g_.end(), [&](const Polynomial& g) {
    return g.degree() == ball.degree() && max_coeff_difference(g, ball) == 0.0;
  });
}

SemialgebraicSet SemialgebraicSet::normalized() const {
  if (has_ball_constraint()) return *this;
  auto g = g_;
  g.push_back(Polynomial::unit_ball(n_));
  return SemialgebraicSet(n_, std::move(g), role_);
}

bool SemialgebraicSet::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("point dimension does not match set");
  return std::all_of(g_.begin(), g_.end(), [&](const Polynomial& g) { return g.evaluate(x) >= 0.0; });
}

bool membership(const SemialgebraicSet& set, std::span<const double> x) { return set.contains(x); }

namespace {

SemialgebraicSet box_description(const std::vector<double>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<Polynomial> g;
  for (int k = 0; k < n; ++k) {
    MultiIndex sq = MultiIndex::zero(n);
    sq.exponents[k] = 2;
    g.push_back(Polynomial::from_terms(n, Basis::Monomial, {{MultiIndex::zero(n), a[k] * a[k]}, {sq, -1.0}}));
  }
  return SemialgebraicSet(n, std::move(g), SemialgebraicSet::Role::OuterX).normalized();
}

SemialgebraicSet ball_description(int n, double radius) {
  std::vector<Polynomial::Term> terms{{MultiIndex::zero(n), radius * radius}};
  for (int k = 0; k < n; ++k) {
    MultiIndex sq = MultiIndex::zero(n);
    sq.exponents[k] = 2;
    terms.push_back({sq, -1.0});
  }
  return SemialgebraicSet(n, {Polynomial::from_terms(n, Basis::Monomial, terms)}, SemialgebraicSet::Role::OuterX)
      .normalized();
}

}  // namespace

OuterDomain::OuterDomain(Shape shape, int n, std::vector<double> half_widths, double radius)
    : shape_(shape),
      n_(n),
      half_widths_(std::move(half_widths)),
      radius_(radius),
      set_(shape == Shape::Box ? box_description(half_widths_) : ball_description(n, radius)) {}

OuterDomain OuterDomain::box(std::vector<double> half_widths) {
  if (half_widths.empty()) throw DimensionMismatch("box needs at least one axis");
  double sq = 0.0;
  for (double a : half_widths) {
    if (!(a > 0.0)) throw Error("box half-widths must be positive");
    sq += a * a;
  }
  if (sq > 1.0 + 1e-12) throw Error("box is not contained in the unit ball (sum of squared half-widths > 1)");
  const int n = static_cast<int>(half_widths.size());
  return OuterDomain(Shape::Box, n, std::move(half_widths), 0.0);
}

OuterDomain OuterDomain::ball(int dimension, double radius) {
  if (dimension < 1) throw DimensionMismatch("ball dimension must be >= 1");
  if (!(radius > 0.0) || radius > 1.0) throw Error("ball radius must lie in (0, 1]");
  return OuterDomain(Shape::Ball, dimension, {}, radius);
}

double OuterDomain::volume() const {
  if (shape_ == Shape::Box) {
    double v = 1.0;
    for (double a : half_widths_) v *= 2.0 * a;
    return v;
  }
  return unit_ball_volume(n_) * std::pow(radius_, n_);
}

bool OuterDomain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("point dimension does not match domain");
  if (shape_ == Shape::Box) {
    for (int k = 0; k < n_; ++k)
      if (std::abs(x[k]) > half_widths_[k]) return false;
    return true;
  }
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return sq <= radius_ * radius_;
}

namespace {

// Every grid point on the 2n faces of [-s, s]^n lies in K.
bool box_surface_inside(const SemialgebraicSet& k, double s, int grid) {
  const int n = k.dimension();
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = s;
    if (!k.contains(x)) return false;
    x[0] = -s;
    return k.contains(x);
  }
  std::vector<double> ticks(grid);
  for (int i = 0; i < grid; ++i) ticks[i] = grid == 1 ? 0.0 : -s + 2.0 * s * i / (grid - 1);
  std::vector<int> counter(n - 1);
  for (int axis = 0; axis < n; ++axis) {
    for (double sign : {-1.0, 1.0}) {
      std::fill(counter.begin(), counter.end(), 0);
      while (true) {
        for (int j = 0, c = 0; j < n; ++j) x[j] = j == axis ? sign * s : ticks[counter[c++]];
        if (!k.contains(x)) return false;
        int pos = 0;
        while (pos < n - 1 && ++counter[pos] == grid) counter[pos++] = 0;
        if (pos == n - 1) break;
      }
    }
  }
  return true;
}

}  // namespace

double inner_box_half_width(const SemialgebraicSet& k, double tol, int grid_per_axis) {
  const int n = k.dimension();
  int grid = grid_per_axis;
  if (grid <= 0) grid = n <= 3 ? 33 : std::max(3, static_cast<int>(std::pow(1e5, 1.0 / (n - 1))));
  if (box_surface_inside(k, 1.0, grid)) return 1.0;
  if (!box_surface_inside(k, tol, grid)) throw NoFeasibleBox("no origin-centred box of half-width " +
                                                             std::to_string(tol) + " fits inside K");
  double lo = tol;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (box_surface_inside(k, mid, grid) ? lo : hi) = mid;
  }
  return lo;
}

GeometrySummary certify_assumptions(const SemialgebraicSet& k, const OuterDomain& x, int samples, std::uint64_t seed,
                                    double box_tol) {
  if (k.dimension() != x.dimension()) throw DimensionMismatch("K and X have different dimensions");
  const int n = k.dimension();
  GeometrySummary summary;
  const std::vector<double> origin(n, 0.0);

  const auto normalized = k.normalized();
  summary.interior_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normalized.inequalities().size(); ++i) {
    const double v = normalized.inequalities()[i].evaluate(origin);
    if (v <= 0.0) {
      std::ostringstream os;
      os << "origin is not interior to K: g_" << i + 1 << "(0) = " << v << " <= 0";
      throw InteriorViolation(os.str(), static_cast<int>(i), v);
    }
    summary.interior_margin = std::min(summary.interior_margin, v);
  }

  CounterRng rng(seed, 0);
  std::vector<double> p(n);
  for (int s = 0; s < samples; ++s) {
    double sq = 0.0;
    for (double& v : p) {
      v = rng.uniform(-1.0, 1.0);
      sq += v * v;
    }
    if (!k.contains(p)) continue;
    ++summary.inclusion_hits;
    if (!x.contains(p) || sq > 1.0) {
      std::ostringstream os;
      os << "sampled point of K outside " << (sq > 1.0 ? "the unit ball" : "X") << ": (";
      for (int j = 0; j < n; ++j) os << (j ? ", " : "") << p[j];
      os << ")";
      throw InclusionViolation(os.str(), p);
    }
  }
  summary.inclusion_samples = samples;
  summary.inner_box_half_width = inner_box_half_width(k, box_tol);
  summary.r = 1.0 / summary.inner_box_half_width;
  return summary;
}

double unit_ball_volume(int n) {
  return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

double lebesgue_moment(const OuterDomain& x, const MultiIndex& alpha) {
  if (alpha.dimension() != x.dimension()) throw DimensionMismatch("moment index dimension mismatch");
  for (int e : alpha.exponents)
    if (e % 2 != 0) return 0.0;
  if (x.shape() == OuterDomain::Shape::Box) {
    double m = 1.0;
    for (int k = 0; k < alpha.dimension(); ++k)
      m *= 2.0 * std::pow(x.half_widths()[k], alpha[k] + 1) / (alpha[k] + 1);
    return m;
  }
  // R^(n+|a|) prod_k Gamma((a_k+1)/2) / Gamma((n+|a|)/2 + 1)
  const int n = x.dimension();
  const int total = alpha.total_degree();
  double log_m = (n + total) * std::log(x.radius()) - std::lgamma(0.5 * (n + total) + 1.0);
  for (int e : alpha.exponents) log_m += std::lgamma(0.5 * (e + 1));
  return std::exp(log_m);
}

namespace {

// Integral of T_j over [-a, a] from the antiderivative
// T_{j+1}/(2(j+1)) - T_{j-1}/(2(j-1)) (j >= 2).
double chebyshev_interval_integral(int j, double a) {
  if (j % 2 != 0) return 0.0;
  if (j == 0) return 2.0 * a;
  const auto t = chebyshev_values(a, j + 1);
  const double f = t[j + 1] / (2.0 * (j + 1)) - t[j - 1] / (2.0 * (j - 1));
  return 2.0 * f;
}

}  // namespace

double basis_moment(const OuterDomain& x, const MultiIndex& alpha, Basis basis) {
  if (basis == Basis::Monomial) return lebesgue_moment(x, alpha);
  if (alpha.dimension() != x.dimension()) throw DimensionMismatch("moment index dimension mismatch");
  if (x.shape() == OuterDomain::Shape::Box) {
    double m = 1.0;
    for (int k = 0; k < alpha.dimension(); ++k) m *= chebyshev_interval_integral(alpha[k], x.half_widths()[k]);
    return m;
  }
  if (x.dimension() == 1) return chebyshev_interval_integral(alpha[0], x.radius());
  double m = 0.0;
  for (const auto& t : to_basis(Polynomial::basis_element(alpha, basis), Basis::Monomial).terms())
    m += t.coefficient * lebesgue_moment(x, t.index);
  return m;
}

std::vector<double> moment_vector(const OuterDomain& x, int d, Basis basis) {
  const auto b = graded_basis(x.dimension(), d);
  std::vector<double> m(b->size());
  for (std::size_t i = 0; i < b->size(); ++i) m[i] = basis_moment(x, (*b)[i], basis);
  return m;
}

double integrate(const OuterDomain& x, const Polynomial& p) {
  if (p.dimension() != x.dimension()) throw DimensionMismatch("polynomial dimension does not match X");
  double s = 0.0;
  for (const auto& t : p.terms()) s += t.coefficient * basis_moment(x, t.index, p.basis());
  return s;
}

}  // namespace volsos
