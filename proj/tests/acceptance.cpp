// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "planted.hpp"
#include "volsos/approx.hpp"
#include "volsos/cli.hpp"
#include "volsos/hierarchy.hpp"
#include "volsos/montecarlo.hpp"

using namespace volsos;
namespace fs = std::filesystem;

namespace {

SemialgebraicSet ball_k(int n, double r) {
  std::vector<Polynomial::Term> t{{MultiIndex::zero(n), r * r}};
  for (int i = 0; i < n; ++i) {
    MultiIndex a = MultiIndex::zero(n);
    a.exponents[i] = 2;
    t.push_back({a, -1.0});
  }
  return SemialgebraicSet(n, {Polynomial::from_terms(n, Basis::Monomial, t)}, SemialgebraicSet::Role::InnerK);
}

const SemialgebraicSet kInterval = ball_k(1, 0.5);
const OuterDomain kUnitInterval = OuterDomain::box({1.0});
const SemialgebraicSet kDisk = ball_k(2, 0.5);
const OuterDomain kUnitDisk = OuterDomain::ball(2);
const double kQuarterPi = std::numbers::pi / 4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared between criteria.
std::map<int, double> interval_v;  // monomial hierarchy, d = 2..20
std::map<int, double> disk_v;      // d = 2..10

struct Check {
  std::ostringstream detail;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

approx::LpOptions exact(double v) {
  approx::LpOptions o;
  o.reference = approx::ReferenceVolume{v, 0.0};
  return o;
}

void criterion1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto seq = hierarchy::run(kInterval, kUnitInterval, 2, 20, 2, Basis::Monomial);
  const double elapsed = seconds_since(t0);
  double prev = INFINITY;
  for (const auto& l : seq.levels) {
    c.require(l.ok(), "d=" + std::to_string(l.d) + " " + l.status_text());
    c.require(l.v_d <= prev + 1e-6, "v_" + std::to_string(l.d) + " increased");
    c.require(l.v_d >= 1.0 - 1e-6, "v_" + std::to_string(l.d) + " below 1");
    prev = l.v_d;
    interval_v[l.d] = l.v_d;
  }
  c.require(seq.levels.size() == 10, "10 levels");
  c.require(elapsed < 60.0, "runtime");
  c.detail << " v_2=" << interval_v[2] << " v_20=" << interval_v[20] << " time=" << elapsed << "s";
}

void criterion2(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto l = hierarchy::solve_level(kInterval, kUnitInterval, 100, Basis::ChebyshevTensor);
  const double elapsed = seconds_since(t0);
  const double v20 = hierarchy::solve_level(kInterval, kUnitInterval, 20, Basis::ChebyshevTensor).v_d;
  c.require(l.status == sdp::Status::Optimal, "status " + l.status_text());
  c.require(l.cert_residual <= 1e-5, "cert residual");
  c.require(l.v_d <= v20, "v_100 > v_20");
  c.require(elapsed < 600.0, "runtime");
  c.detail << " v_100=" << l.v_d << " v_20=" << v20 << " cert_residual=" << l.cert_residual << " time=" << elapsed
           << "s";
}

void criterion3(Check& c) {
  const auto seq = hierarchy::run(kDisk, kUnitDisk, 2, 10, 2, Basis::Monomial);
  double prev = INFINITY;
  for (const auto& l : seq.levels) {
    c.require(l.ok(), "d=" + std::to_string(l.d) + " " + l.status_text());
    c.require(l.v_d >= kQuarterPi - 1e-6, "v_" + std::to_string(l.d) + " below pi/4");
    c.require(l.v_d <= prev + 1e-6, "v_" + std::to_string(l.d) + " increased");
    prev = l.v_d;
    disk_v[l.d] = l.v_d;
  }
  const auto mc = mc::volume(kDisk, kUnitDisk, 1000000, 2024);
  c.require(std::abs(mc.value - kQuarterPi) <= 4 * mc.std_error, "Monte Carlo");
  c.detail << " v_10=" << disk_v[10] << " mc=" << mc.value << "+-" << mc.std_error;
}

std::map<int, double> interval_e;

void criterion4(Check& c) {
  std::vector<double> scaled;
  double prev = INFINITY;
  for (int d : {4, 8, 16, 32, 64}) {
    const auto a = approx::best_upper_L1(kInterval, kUnitInterval, d, Basis::ChebyshevTensor, exact(1.0));
    interval_e[d] = a.e_d;
    c.require(a.e_d <= prev + 1e-9, "e_" + std::to_string(d) + " increased");
    prev = a.e_d;
    scaled.push_back(d * a.e_d);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  c.require(*hi / *lo <= 10.0, "ratio");
  c.detail << " d*e_d in [" << *lo << ", " << *hi << "] ratio=" << *hi / *lo;
}

void criterion5(Check& c) {
  double worst = INFINITY;
  int compared = 0;
  for (const auto& [d, v] : interval_v) {
    if (!interval_e.count(d))
      interval_e[d] = approx::best_upper_L1(kInterval, kUnitInterval, d, Basis::ChebyshevTensor, exact(1.0)).e_d;
    const double margin = (v - 1.0) - (interval_e[d] - 1e-5);
    c.require(margin >= 0.0, "interval d=" + std::to_string(d));
    worst = std::min(worst, margin);
    ++compared;
  }
  for (int d : {4, 8}) {
    const double e = approx::best_upper_L1(kDisk, kUnitDisk, d, Basis::ChebyshevTensor, exact(kQuarterPi)).e_d;
    const double margin = (disk_v.at(d) - kQuarterPi) - (e - 1e-5);
    c.require(margin >= 0.0, "disk d=" + std::to_string(d));
    worst = std::min(worst, margin);
    ++compared;
  }
  c.detail << " " << compared << " degree pairs, smallest margin " << worst;
}

void criterion6(Check& c) {
  std::vector<double> est;
  for (double t : {0.05, 0.1}) {
    const auto m = approx::modulus_estimate(kDisk, kUnitDisk, t, 200000, 64, 2000, 6);
    const double exact_area = 2 * std::numbers::pi * t;
    c.require(std::abs(m.tube_vol - exact_area) <= 4 * m.tube_std_error, "tube t=" + std::to_string(t));
    c.require(m.omega_bar <= m.tube_vol + 3 * m.std_error, "omega t=" + std::to_string(t));
    est.push_back(m.tube_vol);
    c.detail << " t=" << t << ": tube=" << m.tube_vol << "+-" << m.tube_std_error << " (exact " << exact_area
             << ") omega=" << m.omega_bar;
  }
  const double ratio = est[1] / est[0];
  c.require(ratio >= 1.6 && ratio <= 2.4, "ratio");
  c.detail << " ratio=" << ratio;
}

void criterion7(Check& c) {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p = sdp::testing::planted_problem(seed);
    const auto sol = sdp::solve(p.problem);
    c.require(sol.status == sdp::Status::Optimal, "seed " + std::to_string(seed) + " not optimal");
    c.require(sdp::within_tolerances(sdp::residuals(p.problem, sol), {}),
              "seed " + std::to_string(seed) + " residual check");
    double err = (sol.y - p.y).cwiseAbs().maxCoeff();
    for (std::size_t b = 0; b < p.z.blocks.size(); ++b)
      err = std::max(err, (sol.z.blocks[b] - p.z.blocks[b]).cwiseAbs().maxCoeff());
    c.require(err <= 1e-6, "seed " + std::to_string(seed) + " error");
    worst = std::max(worst, err);
  }
  c.detail << " worst error " << worst;
}

void criterion8(Check& c) {
  approx::DegreeBoundInputs in;
  in.epsilon = 2.0;
  const auto b = approx::eval_degree_bound(in);
  c.require(in.c3() == 1, "c3");
  c.require(std::abs(b.ln_value - 27.0) <= 27.0 * 1e-10, "ln bound");
  bool monotone = true;
  for (int i = 0; i < 10; ++i) {
    approx::DegreeBoundInputs a;
    a.epsilon = 0.05 * std::pow(1.5, i);
    const double big = approx::eval_degree_bound(a).ln_ln_value;
    a.epsilon /= 2;
    monotone = monotone && approx::eval_degree_bound(a).ln_ln_value >= big;
  }
  c.require(monotone, "monotone in epsilon");
  c.detail << " ln bound=" << b.ln_value;
}

void criterion9(Check& c) {
  std::vector<approx::RatePoint> power, logs;
  for (int d = 4; d <= 64; d += 4) {
    power.push_back({double(d), 1.0 + 5.0 / (d * d)});
    logs.push_back({double(d), 1.0 + 1.0 / std::log(d)});
  }
  const auto pf = approx::rate_fit(power, 1.0);
  const auto lf = approx::rate_fit(logs, 1.0);
  c.require(std::abs(pf[0].params[1] - 2.0) <= 0.05, "power exponent");
  c.require(lf[1].best, "log model not selected");
  c.detail << " b=" << pf[0].params[1] << " log sse=" << lf[1].sse;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "volsos");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10(Check& c) {
  const std::string fixtures = VOLSOS_FIXTURES;
  const auto root = fs::temp_directory_path() / "volsos_acceptance";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"volume", {"volume", fixtures + "/disk.json", "--dmax", "6", "--samples", "100000", "--seed", "9"}},
      {"approx",
       {"approx", fixtures + "/disk.json", "--degrees", "4", "--t-values", "0.05,0.1", "--samples", "50000", "--seed",
        "9"}},
      {"oracle", {"oracle", fixtures + "/interval.json", "--samples", "100000", "--seed", "9"}}};
  int files = 0;
  for (const auto& [name, args] : runs) {
    for (const char* rep : {"a", "b"}) {
      auto full = args;
      full.push_back("--out");
      full.push_back((root / rep / name).string());
      c.require(invoke(full) == 0, name + " run failed");
    }
    for (const auto& entry : fs::directory_iterator(root / "a" / name)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      c.require(slurp(entry.path()) == slurp(root / "b" / name / entry.path().filename()),
                name + "/" + entry.path().filename().string() + " differs");
    }
  }
  c.require(files == 4, "expected 4 CSV files");
  c.detail << " " << files << " CSV files compared";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"interval hierarchy d=2..20 monotone, >= vol K, < 60 s", criterion1},
      {"Chebyshev basis reaches d=100", criterion2},
      {"disk hierarchy d=2..10 and Monte Carlo oracle", criterion3},
      {"one-sided L1 rate d*e_d bounded", criterion4},
      {"v_d - vol K >= e_d - 1e-5", criterion5},
      {"tube volume and averaged modulus on the disk", criterion6},
      {"planted SDPs recovered, residuals confirmed", criterion7},
      {"degree bound hand case and monotonicity", criterion8},
      {"rate fitting on synthetic data", criterion9},
      {"byte-identical CSVs for repeated runs", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    c.detail << std::setprecision(10);
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " exception: " << e.what();
    }
    if (!c.ok) ++failed;
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ":" << c.detail.str()
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
