#include "volsos/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>

#include "volsos/errors.hpp"
#include "volsos/montecarlo.hpp"
#include "volsos/rng.hpp"
#include "volsos/sdp.hpp"

namespace volsos::approx {

namespace {

constexpr std::uint64_t kOuterStream = 1ull << 40;
constexpr std::uint64_t kInnerStream = 2ull << 40;
constexpr std::uint64_t kBoundaryStream = 3ull << 40;
constexpr int kBoundaryChecks = 1000;

using Points = std::vector<double>;  // row-major, n coordinates per point

// Values of every element of graded_basis(n, d) at x.
void basis_row(std::span<const double> x, const GradedBasis& gb, Basis basis, std::span<double> out) {
  const int n = gb.dimension();
  const int d = gb.degree();
  std::vector<std::vector<double>> table(n);
  for (int k = 0; k < n; ++k) {
    if (basis == Basis::Monomial) {
      table[k].resize(d + 1);
      table[k][0] = 1.0;
      for (int j = 1; j <= d; ++j) table[k][j] = table[k][j - 1] * x[k];
    } else {
      table[k] = chebyshev_values(x[k], d);
    }
  }
  for (std::size_t i = 0; i < gb.size(); ++i) {
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= table[k][gb[i][k]];
    out[i] = v;
  }
}

// Tensor product of per-axis node lists, keeping points accepted by keep.
template <class Keep>
Points tensor_grid(const std::vector<std::vector<double>>& axes, Keep keep) {
  const int n = static_cast<int>(axes.size());
  Points out;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> p(n);
  while (true) {
    for (int k = 0; k < n; ++k) p[k] = axes[k][idx[k]];
    if (keep(std::span<const double>(p))) out.insert(out.end(), p.begin(), p.end());
    int k = 0;
    while (k < n && ++idx[k] == axes[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

std::vector<double> chebyshev_nodes(int m, double a) {
  std::vector<double> v(m);
  for (int i = 0; i < m; ++i) v[i] = a * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m));
  return v;
}

std::vector<double> uniform_nodes(int m, double a, bool endpoints) {
  std::vector<double> v(m);
  for (int i = 0; i < m; ++i)
    v[i] = endpoints ? -a + 2.0 * a * i / (m - 1) : -a + a * (2.0 * i + 1.0) / m;
  return v;
}

int per_axis(double target, int n) { return std::max(2, static_cast<int>(std::ceil(std::pow(target, 1.0 / n)))); }

// Constraint grid: Chebyshev tensor nodes on a box, filtered midpoint grid on a ball.
Points constraint_grid(const OuterDomain& x, int count, int& axis_count) {
  const int n = x.dimension();
  std::vector<std::vector<double>> axes(n);
  if (x.shape() == OuterDomain::Shape::Box) {
    axis_count = per_axis(count, n);
    for (int k = 0; k < n; ++k) axes[k] = chebyshev_nodes(axis_count, x.half_widths()[k]);
    return tensor_grid(axes, [](std::span<const double>) { return true; });
  }
  const double fill = x.volume() / std::pow(2.0 * x.radius(), n);
  axis_count = per_axis(count / fill, n);
  for (int k = 0; k < n; ++k) axes[k] = uniform_nodes(axis_count, x.radius(), false);
  return tensor_grid(axes, [&](std::span<const double> p) { return x.contains(p); });
}

// Uniform grid with endpoints (box faces or ball filter) plus sphere points for a ball.
Points validation_grid(const OuterDomain& x, int axis_count, std::uint64_t seed, double& spacing) {
  const int n = x.dimension();
  const double extent = x.shape() == OuterDomain::Shape::Box
                            ? *std::max_element(x.half_widths().begin(), x.half_widths().end())
                            : x.radius();
  spacing = 2.0 * extent / (axis_count - 1);
  std::vector<std::vector<double>> axes(n);
  if (x.shape() == OuterDomain::Shape::Box) {
    for (int k = 0; k < n; ++k) axes[k] = uniform_nodes(axis_count, x.half_widths()[k], true);
    return tensor_grid(axes, [](std::span<const double>) { return true; });
  }
  for (int k = 0; k < n; ++k) axes[k] = uniform_nodes(axis_count, x.radius(), true);
  auto pts = tensor_grid(axes, [&](std::span<const double> p) { return x.contains(p); });
  const double r = x.radius();
  if (n == 1) {
    pts.push_back(-r);
    pts.push_back(r);
  } else if (n == 2) {
    const int ring = 4 * axis_count;
    for (int i = 0; i < ring; ++i) {
      const double th = 2.0 * std::numbers::pi * i / ring;
      pts.push_back(r * std::cos(th));
      pts.push_back(r * std::sin(th));
    }
  } else {
    const int ring = static_cast<int>(std::min(20000.0, std::pow(axis_count, n - 1)));
    CounterRng rng(seed, kBoundaryStream + 1);
    std::vector<double> p(n);
    for (int i = 0; i < ring; ++i) {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& v : p) {
          v = rng.normal();
          norm += v * v;
        }
      } while (norm == 0.0);
      norm = std::sqrt(norm);
      for (auto& v : p) pts.push_back(r * v / norm);
    }
  }
  return pts;
}

double indicator(const SemialgebraicSet& k, std::span<const double> p) { return k.contains(p) ? 1.0 : 0.0; }

struct LpSolve {
  std::vector<double> coeffs;
  int iterations = 0;
};

// min sum c_b m_b s.t. sum c_b phi_b(x_j) >= I_K(x_j), as a one-block diagonal SDP.
LpSolve solve_lp(const Points& grid, const std::vector<double>& targets, const GradedBasis& gb, Basis basis,
                 const std::vector<double>& moments, double tol) {
  const int n = gb.dimension();
  const int m = static_cast<int>(gb.size());
  const int count = static_cast<int>(targets.size());
  sdp::Problem prob;
  prob.blocks = {{sdp::BlockKind::Diagonal, count}};
  prob.b = Eigen::VectorXd(m);
  for (int j = 0; j < m; ++j) prob.b(j) = -moments[j];
  prob.a.resize(m);
  std::vector<double> row(m);
  for (int i = 0; i < count; ++i) {
    basis_row(std::span<const double>(grid).subspan(static_cast<std::size_t>(i) * n, n), gb, basis, row);
    for (int j = 0; j < m; ++j)
      if (row[j] != 0.0) prob.a[j].add(0, i, i, -row[j]);
    if (targets[i] != 0.0) prob.c.add(0, i, i, -targets[i]);
  }
  sdp::Options opt;
  opt.feas_tol = opt.gap_tol = tol;
  const auto sol = sdp::solve(prob, opt);
  if (sol.status != sdp::Status::Optimal)
    throw LpInfeasible("one-sided approximation LP returned " + sdp::to_string(sol.status) + " at degree " +
                       std::to_string(gb.degree()));
  LpSolve out;
  out.coeffs.assign(sol.y.data(), sol.y.data() + m);
  out.iterations = sol.iterations;
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

enum class BoundarySide { Midpoint, Inside };

// Bisects segments between consecutive inside/outside draws of X down to tol.
std::vector<std::vector<double>> bisect_boundary(const SemialgebraicSet& k, const OuterDomain& x, int count,
                                                 std::uint64_t seed, double tol, BoundarySide side) {
  const int n = x.dimension();
  CounterRng rng(seed, kBoundaryStream);
  std::vector<std::vector<double>> cloud;
  std::vector<double> p(n), inside, outside;
  const std::int64_t max_draws = 200ll * std::max(count, 100);
  for (std::int64_t draw = 0; draw < max_draws && static_cast<int>(cloud.size()) < count; ++draw) {
    mc::draw_point(x, rng, p);
    (k.contains(p) ? inside : outside) = p;
    if (inside.empty() || outside.empty()) continue;
    std::vector<double> a = inside, b = outside, mid(n);
    while (std::sqrt(sq_dist(a, b)) > tol) {
      for (int i = 0; i < n; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      (k.contains(mid) ? a : b) = mid;
    }
    if (side == BoundarySide::Inside) {
      cloud.push_back(a);
    } else {
      for (int i = 0; i < n; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      cloud.push_back(mid);
    }
    inside.clear();
    outside.clear();
  }
  return cloud;
}

}  // namespace

OneSidedApprox best_upper_L1(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis,
                             const LpOptions& options) {
  const int n = k.dimension();
  if (x.dimension() != n) throw DimensionMismatch("K and X have different dimensions");
  if (d < 0) throw Error("approximation degree must be non-negative");
  const auto gb = graded_basis(n, d);
  const int m = static_cast<int>(gb->size());
  const int requested = options.grid_points > 0 ? options.grid_points : 40 * m;
  if (requested < 10 * m)
    throw Error("grid_points = " + std::to_string(requested) + " is below 10 x dim R[x]_d = " +
                std::to_string(10 * m));

  int axis_count = 0;
  Points grid = constraint_grid(x, requested, axis_count);
  double spacing = 0.0;
  Points check = validation_grid(
      x, std::max(options.validation_factor * axis_count, per_axis(options.validation_points, n)) + 1, options.seed,
      spacing);
  // Points of K just inside its boundary, where one-sided violations concentrate.
  for (const auto& p : bisect_boundary(k, x, kBoundaryChecks, options.seed, 1e-9, BoundarySide::Inside))
    check.insert(check.end(), p.begin(), p.end());
  const std::size_t nc = check.size() / n;

  std::vector<double> targets(grid.size() / n);
  for (std::size_t i = 0; i < targets.size(); ++i)
    targets[i] = indicator(k, std::span<const double>(grid).subspan(i * n, n));
  std::vector<double> check_targets(nc);
  std::vector<double> check_rows(nc * m);
  for (std::size_t i = 0; i < nc; ++i) {
    const auto p = std::span<const double>(check).subspan(i * n, n);
    check_targets[i] = indicator(k, p);
    basis_row(p, *gb, basis, std::span<double>(check_rows).subspan(i * m, m));
  }
  const auto moments = moment_vector(x, d, basis);

  OneSidedApprox out;
  out.d = d;
  std::vector<double> coeffs;
  std::vector<double> values(nc);
  const int max_add = std::max(16, 4 * m);
  for (int round = 0;; ++round) {
    const auto lp = solve_lp(grid, targets, *gb, basis, moments, options.solver_tol);
    coeffs = lp.coeffs;
    out.solver_iterations += lp.iterations;
    out.exchange_rounds = round;

    // Enforce p >= I_K on the constraint grid exactly by lifting the constant term.
    std::vector<double> row(m);
    double lift = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      basis_row(std::span<const double>(grid).subspan(i * n, n), *gb, basis, row);
      lift = std::max(lift, targets[i] - dot(row, coeffs));
    }
    coeffs[0] += lift;

    std::vector<std::size_t> violating;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nc; ++i) {
      double v = 0.0;
      for (int j = 0; j < m; ++j) v += check_rows[i * m + j] * coeffs[j];
      values[i] = v;
      const double viol = check_targets[i] - v;
      worst = std::max(worst, viol);
      if (viol > options.violation_tol) violating.push_back(i);
    }
    out.worst_violation = std::max(0.0, worst);
    if (violating.empty()) break;
    if (round == options.max_exchange_rounds) {
      throw GridTooCoarse("degree " + std::to_string(d) + ": validation violation " +
                              std::to_string(out.worst_violation) + " after " + std::to_string(round) +
                              " exchange rounds",
                          out.worst_violation);
    }
    // Add the worst violators, one per neighbourhood of a few validation cells.
    std::sort(violating.begin(), violating.end(), [&](std::size_t a, std::size_t b) {
      return check_targets[a] - values[a] > check_targets[b] - values[b];
    });
    const double radius2 = 9.0 * spacing * spacing;
    std::vector<std::size_t> picked;
    for (auto i : violating) {
      const auto p = std::span<const double>(check).subspan(i * n, n);
      bool near = false;
      for (auto j : picked)
        if (sq_dist(p, std::span<const double>(check).subspan(j * n, n)) < radius2) {
          near = true;
          break;
        }
      if (near) continue;
      picked.push_back(i);
      grid.insert(grid.end(), p.begin(), p.end());
      targets.push_back(check_targets[i]);
      if (static_cast<int>(picked.size()) == max_add) break;
    }
  }

  out.p_tilde = Polynomial(n, basis, coeffs);
  out.sup_norm = *std::max_element(values.begin(), values.end());
  out.integral = dot(coeffs, moments);
  out.grid_size = static_cast<int>(targets.size());
  if (options.reference) {
    out.reference = *options.reference;
  } else {
    const auto v = mc::volume(k, x, options.mc_samples, options.seed);
    out.reference = {v.value, v.std_error};
  }
  out.e_d = out.integral - out.reference.value;
  return out;
}

std::vector<std::vector<double>> boundary_cloud(const SemialgebraicSet& k, const OuterDomain& x, int count,
                                                std::uint64_t seed, double tol) {
  return bisect_boundary(k, x, count, seed, tol, BoundarySide::Midpoint);
}

TubeEstimate tube_volume(const SemialgebraicSet& k, const OuterDomain& x, double t, std::int64_t samples,
                         int boundary_points, std::uint64_t seed) {
  if (t < 0.0 || t > 1.0) throw Error("tube radius must lie in [0, 1]");
  const int n = x.dimension();
  const double tol = 1e-6;
  auto cloud = boundary_cloud(k, x, boundary_points, seed, tol);
  if (cloud.size() < 100)
    throw DegenerateBoundary("only " + std::to_string(cloud.size()) + " boundary points found");
  std::sort(cloud.begin(), cloud.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  std::vector<double> first(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) first[i] = cloud[i][0];

  const std::int64_t chunks = (samples + mc::kChunkSize - 1) / mc::kChunkSize;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  const double t2 = t * t;
  mc::for_each_chunk(x, samples, seed, kOuterStream,
                     [&](std::int64_t c, std::int64_t, std::int64_t size, std::span<const double> pts) {
                       std::int64_t h = 0;
                       for (std::int64_t i = 0; i < size; ++i) {
                         const auto p = pts.subspan(i * n, n);
                         auto lo = std::lower_bound(first.begin(), first.end(), p[0] - t);
                         for (auto it = lo; it != first.end() && *it <= p[0] + t; ++it)
                           if (sq_dist(p, cloud[it - first.begin()]) <= t2) {
                             ++h;
                             break;
                           }
                       }
                       hits[c] = h;
                     });
  const double frac = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::int64_t{0})) / samples;
  TubeEstimate out;
  out.value = x.volume() * frac;
  out.std_error = x.volume() * std::sqrt(frac * (1.0 - frac) / samples);
  out.boundary_points = static_cast<int>(cloud.size());
  out.resolution = tol;
  return out;
}

std::pair<double, double> avg_modulus(const SemialgebraicSet& k, const OuterDomain& x, double t,
                                      std::int64_t samples, int inner_samples, std::uint64_t seed) {
  if (t < 0.0 || t > 1.0) throw Error("modulus radius must lie in [0, 1]");
  if (t == 0.0) return {0.0, 0.0};
  const int n = x.dimension();
  const std::int64_t chunks = (samples + mc::kChunkSize - 1) / mc::kChunkSize;
  std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
  mc::for_each_chunk(x, samples, seed, kOuterStream,
                     [&](std::int64_t c, std::int64_t, std::int64_t size, std::span<const double> pts) {
                       CounterRng rng(seed, kInnerStream + static_cast<std::uint64_t>(c));
                       std::vector<double> y(n);
                       std::int64_t h = 0;
                       for (std::int64_t i = 0; i < size; ++i) {
                         const auto p = pts.subspan(i * n, n);
                         const bool in = k.contains(p);
                         for (int s = 0; s < inner_samples; ++s) {
                           double norm = 0.0;
                           do {
                             norm = 0.0;
                             for (auto& v : y) {
                               v = rng.normal();
                               norm += v * v;
                             }
                           } while (norm == 0.0);
                           const double rad = t * std::pow(rng.uniform(), 1.0 / n) / std::sqrt(norm);
                           for (int j = 0; j < n; ++j) y[j] = p[j] + rad * y[j];
                           if (x.contains(y) && k.contains(y) != in) {
                             ++h;
                             break;
                           }
                         }
                       }
                       hits[c] = h;
                     });
  const double frac = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::int64_t{0})) / samples;
  return {x.volume() * frac, x.volume() * std::sqrt(frac * (1.0 - frac) / samples)};
}

ModulusEstimate modulus_estimate(const SemialgebraicSet& k, const OuterDomain& x, double t, std::int64_t samples,
                                 int inner_samples, int boundary_points, std::uint64_t seed) {
  ModulusEstimate out;
  out.t = t;
  std::tie(out.omega_bar, out.std_error) = avg_modulus(k, x, t, samples, inner_samples, seed);
  const auto tube = tube_volume(k, x, t, samples, boundary_points, seed);
  out.tube_vol = tube.value;
  out.tube_std_error = tube.std_error;
  return out;
}

int DegreeBoundInputs::c3() const { return static_cast<int>(std::ceil(2.0 * c1 / epsilon)); }

void DegreeBoundInputs::validate() const {
  for (double v : {epsilon, c1, c2, c_G, r})
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("degree bound inputs must be positive and finite");
  if (n < 1) throw Error("dimension must be >= 1");
}

namespace {

BoundValue from_ln(double ln_value, double ln_ln_value) {
  BoundValue b;
  b.ln_value = ln_value;
  b.log10_value = ln_value / std::numbers::ln10;
  b.value = std::exp(ln_value);
  b.finite = std::isfinite(b.value);
  b.ln_ln_value = ln_ln_value;
  return b;
}

// c2 exp[exp(ln_inner)^c2], keeping ln(ln bound) finite when the bound overflows.
BoundValue nested_exp(double c2, double ln_inner) {
  const double e = c2 * ln_inner;  // ln of the exponent
  const double lc2 = std::log(c2);
  if (e > 700.0) return from_ln(std::numeric_limits<double>::infinity(), e + std::log1p(lc2 * std::exp(-e)));
  const double ln_value = lc2 + std::exp(e);
  return from_ln(ln_value, ln_value > 0.0 ? std::log(ln_value) : std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

BoundValue eval_degree_bound(const DegreeBoundInputs& in) {
  in.validate();
  const double c3 = in.c3();
  const double ln_inner = std::log(3.0) + 2.0 * std::log(c3) + c3 * std::log(3.0 * in.r * in.n) +
                          std::log(2.0 * in.c_G * unit_ball_volume(in.n) + in.epsilon) - std::log(in.epsilon);
  return nested_exp(in.c2, ln_inner);
}

BoundValue asymptotic_degree_bound(const DegreeBoundInputs& in) {
  in.validate();
  const double ln_ln = 2.0 * in.c1 / in.epsilon * std::log(3.0 * in.r * in.n) - 3.0 * in.c2 * std::log(in.epsilon);
  return from_ln(std::exp(ln_ln), ln_ln);
}

BoundValue k_of(int d, double r) {
  const double ln_value = (d + 1) * std::log(3.0) + d * std::log(r);
  auto b = from_ln(ln_value, ln_value > 0.0 ? std::log(ln_value) : std::numeric_limits<double>::quiet_NaN());
  if (b.finite) b.value = std::pow(3.0, d + 1) * std::pow(r, d);  // exact for integer r
  return b;
}

BoundValue nie_bound(const PolynomialStats& p, const SetStats& s) {
  if (!(p.min_value > 0.0) || p.max_value < p.min_value) throw Error("nie_bound needs 0 < min p <= max p");
  if (!(s.c2 > 0.0) || !(s.r > 0.0) || s.n < 1 || p.degree < 0) throw Error("nie_bound inputs must be positive");
  const double deg = p.degree;
  const double ln_inner = k_of(p.degree, s.r).ln_value + 2.0 * std::log(deg) + deg * std::log(double(s.n)) +
                          std::log(p.max_value / p.min_value);
  return nested_exp(s.c2, ln_inner);
}

GibbsProbe gibbs_probe(const SemialgebraicSet& k, const OuterDomain& x, const std::vector<int>& degrees, Basis basis,
                       const LpOptions& options) {
  GibbsProbe out;
  auto opt = options;
  for (int d : degrees) {
    auto a = best_upper_L1(k, x, d, basis, opt);
    if (!opt.reference) opt.reference = a.reference;  // one reference volume for the sweep
    out.degrees.push_back(d);
    out.sup_norms.push_back(a.sup_norm);
    out.approximations.push_back(std::move(a));
  }
  if (out.sup_norms.size() >= 2) out.growth = out.sup_norms.back() > 1.5 * out.sup_norms.front();
  return out;
}

std::string to_string(RateModel model) {
  switch (model) {
    case RateModel::PowerLaw: return "PowerLaw";
    case RateModel::Log: return "Log";
    case RateModel::LogLog: return "LogLog";
  }
  return "?";
}

std::vector<RateFit> rate_fit(const std::vector<RatePoint>& series, double vol_ref) {
  std::vector<double> ds, gaps;
  for (const auto& pt : series) {
    const double g = pt.value - vol_ref;
    if (std::isfinite(g) && g > 0.0 && pt.d >= 3.0) {
      ds.push_back(pt.d);
      gaps.push_back(g);
    }
  }
  if (ds.size() < 4)
    throw InsufficientData("rate fitting needs at least 4 points with d >= 3 and value above the reference, got " +
                           std::to_string(ds.size()));
  const std::size_t np = ds.size();
  auto sse_of = [&](auto model) {
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i) s += std::pow(gaps[i] - model(ds[i]), 2);
    return s;
  };
  // a for gap = a u(d) by least squares.
  auto scale_fit = [&](auto u) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      num += gaps[i] * u(ds[i]);
      den += u(ds[i]) * u(ds[i]);
    }
    return num / den;
  };

  std::vector<RateFit> fits(3);
  {
    // log gap = log a - b log d
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      const double lx = std::log(ds[i]), ly = std::log(gaps[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    const double a = std::exp((sy - slope * sx) / np);
    const double b = -slope;
    fits[0] = {RateModel::PowerLaw, {a, b}, sse_of([&](double d) { return a * std::pow(d, -b); })};
  }
  {
    auto u = [](double d) { return 1.0 / std::log(d); };
    const double a = scale_fit(u);
    fits[1] = {RateModel::Log, {a}, sse_of([&](double d) { return a * u(d); })};
  }
  {
    auto u = [](double d) { return 1.0 / std::log(std::log(d)); };
    const double a = scale_fit(u);
    fits[2] = {RateModel::LogLog, {a}, sse_of([&](double d) { return a * u(d); })};
  }

  const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
  const bool flat = *hi - *lo <= 1e-12 * *hi;
  if (flat) {
    for (auto& f : fits) f.degenerate = true;
  } else {
    auto best = std::min_element(fits.begin(), fits.end(), [](const auto& a, const auto& b) { return a.sse < b.sse; });
    best->best = true;
  }
  return fits;
}

}  // namespace volsos::approx
