#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "volsos/poly.hpp"
#include "volsos/semialg.hpp"

namespace volsos::approx {

struct ReferenceVolume {
  double value = 0.0;
  double std_error = 0.0;  // 0 for analytic values
};

struct LpOptions {
  int grid_points = 0;               // 0: 40 x dim R[x]_d
  int validation_points = 100000;    // lower bound on the validation grid size
  int validation_factor = 4;         // and on its per-axis refinement of the constraint grid
  int max_exchange_rounds = 20;
  double violation_tol = 1e-6;
  double solver_tol = 1e-9;
  std::optional<ReferenceVolume> reference;  // default: Monte Carlo
  std::int64_t mc_samples = 1000000;
  std::uint64_t seed = 0;
};

// Degree-d polynomial p >= I_K on X minimising the integral over X, computed
// on a finite grid with exchange refinement against a finer validation grid.
struct OneSidedApprox {
  int d = 0;
  double e_d = 0.0;        // integral(X, p) - vol K
  Polynomial p_tilde{1};
  double sup_norm = 0.0;   // max of p over the validation grid
  double integral = 0.0;
  ReferenceVolume reference;
  double worst_violation = 0.0;  // max(I_K - p) over the validation grid
  int grid_size = 0;             // constraint points after refinement
  int exchange_rounds = 0;
  int solver_iterations = 0;
};

// Throws Error if grid_points < 10 dim R[x]_d, LpInfeasible if the LP solve
// fails, GridTooCoarse when the validation violation stays above violation_tol.
OneSidedApprox best_upper_L1(const SemialgebraicSet& k, const OuterDomain& x, int d,
                             Basis basis = Basis::ChebyshevTensor, const LpOptions& options = {});

struct ModulusEstimate {
  double t = 0.0;
  double omega_bar = 0.0;
  double std_error = 0.0;
  double tube_vol = 0.0;
  double tube_std_error = 0.0;
};

struct TubeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int boundary_points = 0;
  double resolution = 0.0;  // bisection tolerance
};

// Monte Carlo integral over X of sup_{y in X, |y - x| <= t} |I_K(y) - I_K(x)|,
// the inner sup taken over inner_samples uniform points of the t-ball.
// Uses the same outer points as tube_volume for a given seed.
std::pair<double, double> avg_modulus(const SemialgebraicSet& k, const OuterDomain& x, double t,
                                      std::int64_t samples, int inner_samples, std::uint64_t seed);

// Points of X within distance t of a bisected boundary point cloud of K.
// Throws DegenerateBoundary if fewer than 100 boundary points are found.
TubeEstimate tube_volume(const SemialgebraicSet& k, const OuterDomain& x, double t, std::int64_t samples,
                         int boundary_points, std::uint64_t seed);

// Boundary cloud used by tube_volume: bisection between inside/outside pairs.
std::vector<std::vector<double>> boundary_cloud(const SemialgebraicSet& k, const OuterDomain& x, int count,
                                                std::uint64_t seed, double tol = 1e-6);

ModulusEstimate modulus_estimate(const SemialgebraicSet& k, const OuterDomain& x, double t, std::int64_t samples,
                                 int inner_samples, int boundary_points, std::uint64_t seed);

struct DegreeBoundInputs {
  double epsilon = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c_G = 1.0;
  double r = 1.0;
  int n = 1;

  int c3() const;  // ceil(2 c1 / epsilon)
  void validate() const;  // throws Error on non-positive input
};

// A positive quantity too large for a double is carried by its logarithm.
struct BoundValue {
  double ln_value = 0.0;
  double log10_value = 0.0;
  double value = 0.0;     // +inf when it overflows
  bool finite = true;
  double ln_ln_value = 0.0;  // ln(ln value), finite even when ln_value is not; NaN if value <= e
};

// c2 exp[(3 c3^2 (3rn)^c3 (2 c_G vol B_n + eps) / eps)^c2]
BoundValue eval_degree_bound(const DegreeBoundInputs& in);

// exp[(3rn)^(2 c1 / eps) / eps^(3 c2)]
BoundValue asymptotic_degree_bound(const DegreeBoundInputs& in);

// 3^(d+1) r^d in log form.
BoundValue k_of(int d, double r);

struct PolynomialStats {
  int degree = 0;
  double max_value = 0.0;  // max over S of p
  double min_value = 0.0;  // min over S of p, must be > 0
};

struct SetStats {
  double c2 = 1.0;  // constant of the set description
  double r = 1.0;
  int n = 1;
};

// c2 exp[(k(deg p) deg(p)^2 n^deg(p) max p / min p)^c2]
BoundValue nie_bound(const PolynomialStats& p, const SetStats& s);

struct GibbsProbe {
  std::vector<int> degrees;
  std::vector<double> sup_norms;
  std::vector<OneSidedApprox> approximations;
  bool growth = false;  // last sup norm exceeds the first by more than 50%
};

GibbsProbe gibbs_probe(const SemialgebraicSet& k, const OuterDomain& x, const std::vector<int>& degrees,
                       Basis basis = Basis::ChebyshevTensor, const LpOptions& options = {});

enum class RateModel { PowerLaw, Log, LogLog };

std::string to_string(RateModel model);

struct RateFit {
  RateModel model = RateModel::PowerLaw;
  std::vector<double> params;  // PowerLaw: a, b for a / d^b; Log, LogLog: a
  double sse = 0.0;            // sum of squared gap residuals
  bool best = false;
  bool degenerate = false;     // gaps show no decay, rate not identifiable
};

struct RatePoint {
  double d = 0.0;
  double value = 0.0;
};

// Fits gap = value - vol_ref on points with gap > 0 and d >= 3 (log log d > 0).
// Throws InsufficientData with fewer than four such points.
std::vector<RateFit> rate_fit(const std::vector<RatePoint>& series, double vol_ref);

}  // namespace volsos::approx
