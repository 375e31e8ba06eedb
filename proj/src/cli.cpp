#include "volsos/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "volsos/approx.hpp"
#include "volsos/errors.hpp"
#include "volsos/hierarchy.hpp"
#include "volsos/montecarlo.hpp"

namespace volsos::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

std::string fmt(double v) { return format_double(v); }

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  std::string lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return enabled_ ? fmt(s) : "NA";
  }
  std::string seconds(double s) const { return enabled_ ? fmt(s) : "NA"; }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

// "4,8,16", "2..20" (even degrees) or "4..64:4".
std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      std::string rest = text.substr(dots + 2);
      int step = 2;
      if (const auto colon = rest.find(':'); colon != std::string::npos) {
        step = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const int hi = std::stoi(rest);
      if (step <= 0 || hi < lo) throw UsageError("bad degree range '" + text + "'");
      for (int d = lo; d <= hi; d += step) out.push_back(d);
    } else {
      std::istringstream in(text);
      std::string item;
      while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad degree list '" + text + "'");
  }
  for (int d : out)
    if (d < 0) throw UsageError("degrees must be non-negative");
  if (out.empty()) throw UsageError("empty degree list");
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  try {
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw UsageError("bad number list '" + text + "'");
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

std::string geometry_text(const GeometrySummary& g) {
  std::ostringstream os;
  os << "geometry\n"
     << "  inner box half-width s* = " << fmt(g.inner_box_half_width) << "\n"
     << "  r = 1/s* = " << fmt(g.r) << "\n"
     << "  interior margin min g_i(0) = " << fmt(g.interior_margin) << "\n"
     << "  inclusion K in X: statistically certified (" << g.inclusion_hits << " of " << g.inclusion_samples
     << " cube samples in K, none outside X or the unit ball)\n";
  return os.str();
}

std::string rate_text(const std::vector<approx::RateFit>& fits) {
  std::ostringstream os;
  os << "model,params,sse,best,degenerate\n";
  for (const auto& f : fits) {
    os << approx::to_string(f.model) << ",";
    if (f.model == approx::RateModel::PowerLaw)
      os << "a=" << fmt(f.params[0]) << ";b=" << fmt(f.params[1]);
    else
      os << "a=" << fmt(f.params[0]);
    os << "," << fmt(f.sse) << "," << (f.best ? "yes" : "no") << "," << (f.degenerate ? "yes" : "no") << "\n";
  }
  bool any = false;
  for (const auto& f : fits)
    if (f.best) {
      os << "best model (empirical): " << approx::to_string(f.model) << "\n";
      any = true;
    }
  if (!any) os << "best model: none (gaps do not decay, all fits degenerate)\n";
  return os.str();
}

std::string rate_section(const std::vector<approx::RatePoint>& pts, double ref) {
  try {
    return rate_text(approx::rate_fit(pts, ref));
  } catch (const InsufficientData& e) {
    return std::string("not fitted: ") + e.what() + "\n";
  }
}

struct Common {
  std::string file;
  std::string out_dir = "volsos_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> basis;
  bool timings = false;
};

Basis pick_basis(const Common& c, const ProblemFile& pf, Basis fallback) {
  if (c.basis) {
    try {
      return basis_from_string(*c.basis);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return pf.options.basis.value_or(fallback);
}

// ---- volume ----------------------------------------------------------------

struct VolumeArgs {
  Common common;
  std::optional<int> dmin, dmax, step;
  std::optional<double> tol;
  std::optional<std::int64_t> samples;
  std::string sdpa_dir;
};

int cmd_volume(const VolumeArgs& a, std::ostream& out) {
  const auto pf = load_problem(a.common.file);
  const auto& po = pf.options;
  const int dmin_default = std::max(2, 2 * ((pf.k.max_degree() + 1) / 2));
  const int dmin = a.dmin.value_or(po.dmin.value_or(dmin_default));
  const int dmax = a.dmax.value_or(po.dmax.value_or(dmin + 6));
  const int step = a.step.value_or(po.step.value_or(2));
  if (dmax < dmin) throw UsageError("--dmax (" + std::to_string(dmax) + ") is below --dmin (" + std::to_string(dmin) + ")");
  if (dmin < 0 || dmin % 2 != 0 || step <= 0 || step % 2 != 0)
    throw UsageError("--dmin must be even and non-negative, --step positive and even");
  const auto seed = a.common.seed.value_or(po.seed.value_or(0));
  const auto basis = pick_basis(a.common, pf, Basis::Monomial);
  const auto samples = a.samples.value_or(po.samples.value_or(1000000));

  Stopwatch clock(a.common.timings);
  const auto geometry = certify_assumptions(pf.k, pf.x, po.inclusion_samples.value_or(100000), seed);
  const auto t_geometry = clock.lap();

  hierarchy::Options hopt;
  if (const auto tol = a.tol ? a.tol : po.tol) {
    auto so = hierarchy::default_solver_options(pf.dimension);
    so.feas_tol = so.gap_tol = *tol;
    hopt.solver = so;
  }
  hopt.sdpa_dump_dir = a.sdpa_dir;
  const auto seq = hierarchy::run(pf.k, pf.x, dmin, dmax, step, basis, hopt, po.reference_volume);
  const auto t_hierarchy = clock.lap();

  const auto oracle = mc::volume(pf.k, pf.x, samples, seed);
  const auto t_oracle = clock.lap();

  std::ostringstream csv;
  csv << "d,basis,status,v_d,iterations,cert_residual,min_gram_eigenvalue,primal_residual,dual_residual,"
         "relative_gap,retried,seconds\n";
  std::vector<approx::RatePoint> pts;
  int solved = 0;
  for (const auto& l : seq.levels) {
    csv << l.d << "," << to_string(l.basis) << "," << l.status_text() << "," << (l.ok() ? fmt(l.v_d) : "NA") << ","
        << l.iterations << "," << fmt(l.cert_residual) << "," << fmt(l.min_gram_eigenvalue) << ","
        << fmt(l.solver_residuals.primal) << "," << fmt(l.solver_residuals.dual) << ","
        << fmt(l.solver_residuals.relative_gap) << "," << (l.retried ? "yes" : "no") << "," << clock.seconds(l.seconds)
        << "\n";
    if (l.ok()) {
      ++solved;
      pts.push_back({double(l.d), l.v_d});
    }
  }
  const fs::path dir(a.common.out_dir);
  write_file(dir / "hierarchy.csv", csv.str());

  const double ref = po.reference_volume.value_or(oracle.value);
  std::ostringstream rep;
  rep << "volume run\n" << geometry_text(geometry);
  rep << "hierarchy\n  basis " << to_string(basis) << ", degrees " << dmin << ".." << dmax << " step " << step
      << ", " << solved << " of " << seq.levels.size() << " levels solved\n"
      << "  csv: " << (dir / "hierarchy.csv").string() << "\n"
      << "  monotone: " << (seq.monotone ? "yes" : "no") << "\n";
  for (const auto& w : seq.warnings) rep << "  warning: " << w << "\n";
  rep << "oracle\n  Monte Carlo vol K = " << fmt(oracle.value) << " +- " << fmt(oracle.std_error) << " (" << samples
      << " samples, seed " << seed << ")\n";
  if (po.reference_volume) rep << "  analytic vol K = " << fmt(*po.reference_volume) << "\n";
  rep << "rate fit of v_d - " << (po.reference_volume ? "analytic" : "Monte Carlo") << " vol K\n"
      << rate_section(pts, ref);
  rep << "timings (s)\n  geometry " << t_geometry << "\n  hierarchy " << t_hierarchy << "\n  oracle " << t_oracle
      << "\n";
  write_file(dir / "report.txt", rep.str());
  out << rep.str();
  if (solved == 0) throw SolverFailure("the solver failed at every level");
  return kOk;
}

// ---- approx ----------------------------------------------------------------

struct ApproxArgs {
  Common common;
  std::optional<std::string> degrees;
  std::optional<int> grid;
  std::optional<std::string> t_values;
  std::optional<std::int64_t> samples;
  std::optional<int> inner_samples;
  std::optional<int> boundary_points;
};

int cmd_approx(const ApproxArgs& a, std::ostream& out) {
  const auto pf = load_problem(a.common.file);
  const auto& po = pf.options;
  const auto seed = a.common.seed.value_or(po.seed.value_or(0));
  const auto basis = pick_basis(a.common, pf, Basis::ChebyshevTensor);
  const auto degrees = a.degrees ? parse_degrees(*a.degrees) : po.approx_degrees.value_or(std::vector<int>{4, 8, 16, 32});
  const auto ts = a.t_values ? parse_reals(*a.t_values) : po.t_values.value_or(std::vector<double>{0.05, 0.1});
  for (double t : ts)
    if (t < 0.0 || t > 1.0) throw UsageError("t values must lie in [0, 1]");
  const auto samples = a.samples.value_or(po.modulus_samples.value_or(100000));
  const int inner = a.inner_samples.value_or(po.inner_samples.value_or(64));
  const int cloud = a.boundary_points.value_or(po.boundary_points.value_or(2000));

  Stopwatch clock(a.common.timings);
  const auto geometry = certify_assumptions(pf.k, pf.x, po.inclusion_samples.value_or(100000), seed);
  const auto t_geometry = clock.lap();

  approx::LpOptions lp;
  lp.seed = seed;
  if (a.grid) lp.grid_points = *a.grid;
  else if (po.grid_points) lp.grid_points = *po.grid_points;
  if (po.reference_volume) lp.reference = approx::ReferenceVolume{*po.reference_volume, 0.0};
  else lp.mc_samples = po.samples.value_or(1000000);
  approx::GibbsProbe probe;
  try {
    probe = approx::gibbs_probe(pf.k, pf.x, degrees, basis, lp);
  } catch (const GridTooCoarse& e) {
    throw SolverFailure(e.what());
  } catch (const LpInfeasible& e) {
    throw SolverFailure(e.what());
  }
  const auto t_lp = clock.lap();

  std::ostringstream csv;
  csv << "d,e_d,sup_norm,integral,vol_ref,vol_ref_std_error,worst_violation,grid_size,exchange_rounds\n";
  std::vector<approx::RatePoint> pts;
  for (const auto& s : probe.approximations) {
    csv << s.d << "," << fmt(s.e_d) << "," << fmt(s.sup_norm) << "," << fmt(s.integral) << ","
        << fmt(s.reference.value) << "," << fmt(s.reference.std_error) << "," << fmt(s.worst_violation) << ","
        << s.grid_size << "," << s.exchange_rounds << "\n";
    pts.push_back({double(s.d), s.e_d});
  }
  const fs::path dir(a.common.out_dir);
  write_file(dir / "approx.csv", csv.str());

  std::ostringstream mcsv;
  mcsv << "t,omega_bar,omega_std_error,tube_vol,tube_std_error,omega_below_tube\n";
  std::vector<std::string> notes;
  std::vector<std::pair<double, double>> tubes;
  for (double t : ts) {
    const auto [w, wse] = approx::avg_modulus(pf.k, pf.x, t, samples, inner, seed);
    mcsv << fmt(t) << "," << fmt(w) << "," << fmt(wse) << ",";
    try {
      const auto tube = approx::tube_volume(pf.k, pf.x, t, samples, cloud, seed);
      mcsv << fmt(tube.value) << "," << fmt(tube.std_error) << ","
           << (w <= tube.value + 3 * wse ? "yes" : "no") << "\n";
      tubes.emplace_back(t, tube.value);
    } catch (const DegenerateBoundary& e) {
      mcsv << "NA,NA,NA\n";
      notes.push_back(std::string("t = ") + fmt(t) + ": " + e.what());
    }
  }
  write_file(dir / "modulus.csv", mcsv.str());
  const auto t_mc = clock.lap();

  std::ostringstream rep;
  rep << "approx run\n" << geometry_text(geometry);
  rep << "one-sided L1 approximation\n  basis " << to_string(basis) << "\n  csv: " << (dir / "approx.csv").string()
      << "\n";
  bool nested = true;
  for (std::size_t i = 1; i < probe.approximations.size(); ++i)
    if (probe.degrees[i] > probe.degrees[i - 1] && probe.approximations[i].e_d > probe.approximations[i - 1].e_d + 1e-9)
      nested = false;
  rep << "  e_d non-increasing: " << (nested ? "yes" : "no") << "\n";
  rep << "gibbs probe (empirical evidence only)\n  sup norms:";
  for (double s : probe.sup_norms) rep << " " << fmt(s);
  rep << "\n  growth over 50%: " << (probe.growth ? "yes" : "no") << "\n";
  rep << "modulus and tube\n  csv: " << (dir / "modulus.csv").string() << "\n";
  for (const auto& [t1, v1] : tubes)
    for (const auto& [t2, v2] : tubes)
      if (t1 > 0 && std::abs(t2 - 2 * t1) < 1e-12) {
        const double ratio = v2 / v1;
        rep << "  tube ratio vol(" << fmt(t2) << ")/vol(" << fmt(t1) << ") = " << fmt(ratio)
            << (ratio >= 1.6 && ratio <= 2.4 ? " (within [1.6, 2.4])" : " (outside [1.6, 2.4])") << "\n";
      }
  for (const auto& n : notes) rep << "  note: " << n << "\n";
  rep << "rate fit of e_d\n" << rate_section(pts, 0.0);
  rep << "timings (s)\n  geometry " << t_geometry << "\n  lp " << t_lp << "\n  monte carlo " << t_mc << "\n";
  write_file(dir / "report.txt", rep.str());
  out << rep.str();
  return kOk;
}

// ---- bound -----------------------------------------------------------------

struct BoundArgs {
  approx::DegreeBoundInputs in;
  std::optional<int> k_degree;
};

std::string bound_line(const std::string& name, const approx::BoundValue& b) {
  std::ostringstream os;
  os << name << ": ln = " << fmt(b.ln_value) << ", log10 = " << fmt(b.log10_value);
  if (b.finite)
    os << ", value = " << fmt(b.value);
  else
    os << ", value = +inf (overflow), ln ln = " << fmt(b.ln_ln_value);
  os << "\n";
  return os.str();
}

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  try {
    a.in.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const int c3 = a.in.c3();
  out << "c3 = ceil(2 c1 / epsilon) = " << c3 << "\n";
  out << bound_line("k(c3) = 3^(c3+1) r^c3", approx::k_of(c3, a.in.r));
  if (a.k_degree) out << bound_line("k(" + std::to_string(*a.k_degree) + ")", approx::k_of(*a.k_degree, a.in.r));
  out << bound_line("degree bound c2 exp[(3 c3^2 (3rn)^c3 (2 c_G vol B_n + eps)/eps)^c2]",
                    approx::eval_degree_bound(a.in));
  out << bound_line("asymptotic form exp[(3rn)^(2 c1/eps) / eps^(3 c2)]", approx::asymptotic_degree_bound(a.in));
  return kOk;
}

// ---- rate ------------------------------------------------------------------

struct RateArgs {
  std::string csv;
  double vol_ref = 0.0;
  std::string column;
  std::string out_file;
};

int cmd_rate(const RateArgs& a, std::ostream& out) {
  std::ifstream in(a.csv);
  if (!in) throw ParseError("cannot open CSV '" + a.csv + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto pts = parse_rate_csv(ss.str(), a.column);
  std::vector<approx::RateFit> fits;
  try {
    fits = approx::rate_fit(pts, a.vol_ref);
  } catch (const InsufficientData& e) {
    throw UsageError(e.what());
  }
  const auto text = rate_text(fits);
  if (!a.out_file.empty()) write_file(a.out_file, text);
  out << text;
  return kOk;
}

// ---- oracle ----------------------------------------------------------------

struct OracleArgs {
  Common common;
  std::optional<std::int64_t> samples;
  bool write = false;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const auto pf = load_problem(a.common.file);
  const auto seed = a.common.seed.value_or(pf.options.seed.value_or(0));
  const auto samples = a.samples.value_or(pf.options.samples.value_or(1000000));
  const auto v = mc::volume(pf.k, pf.x, samples, seed);
  std::ostringstream csv;
  csv << "samples,seed,hits,value,std_error\n"
      << v.samples << "," << v.seed << "," << v.hits << "," << fmt(v.value) << "," << fmt(v.std_error) << "\n";
  if (a.write) write_file(fs::path(a.common.out_dir) / "oracle.csv", csv.str());
  out << csv.str();
  if (pf.options.reference_volume) {
    const double z = v.std_error > 0 ? (v.value - *pf.options.reference_volume) / v.std_error : 0.0;
    out << "analytic " << fmt(*pf.options.reference_volume) << ", deviation " << fmt(z) << " std errors\n";
  }
  return kOk;
}

void add_common(CLI::App* cmd, Common& c, bool with_basis) {
  cmd->add_option("file", c.file, "problem file (JSON)")->required();
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  if (with_basis) cmd->add_option("--basis", c.basis, "monomial or chebyshev");
  cmd->add_flag("--timings", c.timings, "report wall-clock seconds instead of NA");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volume upper bounds for semialgebraic sets by sum-of-squares hierarchies", "volsos"};
  app.require_subcommand(1);

  VolumeArgs va;
  auto* volume = app.add_subcommand("volume", "hierarchy of upper bounds v_d on vol K");
  add_common(volume, va.common, true);
  volume->add_option("--dmin", va.dmin, "first degree (even)");
  volume->add_option("--dmax", va.dmax, "last degree");
  volume->add_option("--step", va.step, "degree step (even)");
  volume->add_option("--tol", va.tol, "solver feasibility and gap tolerance")->check(CLI::PositiveNumber);
  volume->add_option("--samples", va.samples, "Monte Carlo oracle samples")->check(CLI::PositiveNumber);
  volume->add_option("--sdpa-dir", va.sdpa_dir, "write each level as SDPA sparse format into this directory");

  ApproxArgs aa;
  auto* appr = app.add_subcommand("approx", "one-sided L1 approximation, Gibbs probe, modulus and tube volume");
  add_common(appr, aa.common, true);
  appr->add_option("--degrees", aa.degrees, "degree list: 4,8,16 or 2..20 or 4..64:4");
  appr->add_option("--grid", aa.grid, "LP grid points")->check(CLI::PositiveNumber);
  appr->add_option("--t-values", aa.t_values, "radii, comma separated");
  appr->add_option("--samples", aa.samples, "outer Monte Carlo samples for modulus and tube")
      ->check(CLI::PositiveNumber);
  appr->add_option("--inner-samples", aa.inner_samples, "inner samples per modulus point")->check(CLI::PositiveNumber);
  appr->add_option("--boundary-points", aa.boundary_points, "boundary cloud size")->check(CLI::PositiveNumber);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "evaluate the closed-form degree bound");
  bound->add_option("--epsilon", ba.in.epsilon, "target accuracy")->required();
  bound->add_option("--c1", ba.in.c1)->capture_default_str();
  bound->add_option("--c2", ba.in.c2)->capture_default_str();
  bound->add_option("--cG", ba.in.c_G, "Gibbs constant")->capture_default_str();
  bound->add_option("--r", ba.in.r)->capture_default_str();
  bound->add_option("--n", ba.in.n, "dimension")->capture_default_str();
  bound->add_option("--k-degree", ba.k_degree, "also print k(d) for this d");

  RateArgs ra;
  auto* rate = app.add_subcommand("rate", "fit convergence models to a (d, value) CSV");
  rate->add_option("csv", ra.csv, "CSV file with a header")->required();
  rate->add_option("--vol-ref", ra.vol_ref, "reference volume subtracted from the values")->required();
  rate->add_option("--column", ra.column, "value column name");
  rate->add_option("--out", ra.out_file, "also write the fit table to this file");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo volume of K");
  add_common(oracle, oa.common, false);
  oracle->add_option("--samples", oa.samples, "sample count")->check(CLI::PositiveNumber);
  oracle->final_callback([&] { oa.write = oracle->count("--out") > 0; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*volume) return cmd_volume(va, out);
    if (*appr) return cmd_approx(aa, out);
    if (*bound) return cmd_bound(ba, out);
    if (*rate) return cmd_rate(ra, out);
    if (*oracle) return cmd_oracle(oa, out);
  } catch (const ParseError& e) {
    err << "parse error";
    if (e.line > 0) err << " at line " << e.line << ", column " << e.column;
    err << ": " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegreeTooSmall& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionMismatch& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InteriorViolation& e) {
    err << "InteriorViolation: " << e.what() << "\n";
    return kAssumption;
  } catch (const InclusionViolation& e) {
    err << "InclusionViolation: " << e.what() << "\n";
    return kAssumption;
  } catch (const NoFeasibleBox& e) {
    err << "NoFeasibleBox: " << e.what() << "\n";
    return kAssumption;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
  return kUsage;
}

}  // namespace volsos::cli
