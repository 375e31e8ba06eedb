#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "volsos/approx.hpp"
#include "volsos/poly.hpp"
#include "volsos/semialg.hpp"

namespace volsos::cli {

// Optional settings of a problem file; command-line flags take precedence.
struct ProblemOptions {
  std::optional<Basis> basis;
  std::optional<int> dmin, dmax, step;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;            // Monte Carlo oracle
  std::optional<int> inclusion_samples;
  std::optional<double> reference_volume;         // analytic vol K
  std::optional<std::vector<int>> approx_degrees;
  std::optional<int> grid_points;
  std::optional<std::vector<double>> t_values;
  std::optional<std::int64_t> modulus_samples;
  std::optional<int> inner_samples;
  std::optional<int> boundary_points;
};

// JSON problem file:
//   { "dimension": n,
//     "X": {"shape": "box", "half_widths": [...]} | {"shape": "ball", "radius": R},
//     "K": {"inequalities": [{"basis": "monomial", "terms": [{"coefficient": c, "exponents": [...]}, ...]}, ...]},
//     "options": {...} }
// Unknown keys are rejected.
struct ProblemFile {
  int dimension = 0;
  OuterDomain x = OuterDomain::box({1.0});
  SemialgebraicSet k{1, {}, SemialgebraicSet::Role::InnerK};
  ProblemOptions options;
};

// Throws ParseError carrying the 1-based line and column of the offending text.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);

// (d, value) pairs from a CSV with a header. The value column is `column` if
// given, else the first of v_d, e_d, value, else the second column. Rows whose
// value is not a finite number (NA, nan) are skipped.
std::vector<approx::RatePoint> parse_rate_csv(const std::string& text, const std::string& column = "");

// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

enum ExitCode { kOk = 0, kUsage = 1, kAssumption = 2, kSolver = 3 };

// Entry point of the volsos executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace volsos::cli
