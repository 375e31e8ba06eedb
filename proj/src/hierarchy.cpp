#include "volsos/hierarchy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "volsos/errors.hpp"

namespace volsos::hierarchy {

using Role = SemialgebraicSet::Role;

namespace {

std::vector<Polynomial> multipliers_of(const SemialgebraicSet& set, Basis basis) {
  std::vector<Polynomial> out{Polynomial::constant(set.dimension(), 1.0, basis)};
  for (const auto& g : set.inequalities()) out.push_back(to_basis(g, basis));
  return out;
}

// v' G v for the graded basis of degree k.
Polynomial gram_form(const Eigen::MatrixXd& g, int n, int k, Basis basis) {
  const auto v = graded_basis(n, k);
  Polynomial out(n, basis);
  for (std::size_t a = 0; a < v->size(); ++a) {
    std::vector<Polynomial::Term> row;
    for (std::size_t b = 0; b < v->size(); ++b)
      if (g(a, b) != 0.0) row.push_back({(*v)[b], g(a, b)});
    if (row.empty()) continue;
    out = out + multiply(Polynomial::basis_element((*v)[a], basis), Polynomial::from_terms(n, basis, row));
  }
  return out;
}

}  // namespace

CertificateCheck certify(const Polynomial& p, const QuadraticModuleCertificate& cert) {
  const int n = p.dimension();
  const Polynomial target =
      to_basis(cert.role == Role::InnerK ? p - Polynomial::constant(n, 1.0, p.basis()) : p, cert.basis);
  Polynomial sum(n, cert.basis);
  CertificateCheck check;
  for (std::size_t i = 0; i < cert.grams.size(); ++i) {
    const auto& g = cert.grams[i];
    sum = sum + multiply(cert.multipliers[i], gram_form(g, n, cert.half_degrees[i], cert.basis));
    if (g.size() == 0) {
      check.min_eigenvalues.push_back(0.0);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
      check.min_eigenvalues.push_back(es.eigenvalues()(0));
    }
  }
  check.residual = max_coeff_difference(sum, target);
  return check;
}

Assembly assemble(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis) {
  const int n = k.dimension();
  if (x.dimension() != n) throw DimensionMismatch("K and X have different dimensions");
  if (d < 0 || d % 2 != 0) throw Error("hierarchy degree must be even and non-negative, got " + std::to_string(d));
  const auto nk = k.normalized();
  const auto& xs = x.as_set();
  for (const auto* set : {&nk, &xs})
    for (const auto& g : set->inequalities())
      if (g.degree() > d)
        throw DegreeTooSmall("degree " + std::to_string(d) + " is below the constraint degree " +
                             std::to_string(g.degree()));

  Assembly as;
  as.dimension = n;
  as.degree = d;
  as.basis = basis;
  as.k_multipliers = multipliers_of(nk, basis);
  as.x_multipliers = multipliers_of(xs, basis);

  const auto full = graded_basis(n, d);
  const std::size_t m = full->size();
  const auto moments = moment_vector(x, d, basis);
  auto& prob = as.problem;
  prob.a.resize(m);
  prob.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  prob.b(0) = 1.0;

  std::vector<double> acc(m, 0.0);
  std::vector<std::size_t> touched;
  auto add_block = [&](Role role, int index, const Polynomial& g) {
    const int half = (d - std::max(0, g.degree())) / 2;
    const int block = static_cast<int>(as.blocks.size());
    as.blocks.push_back({role, index, half});
    const auto v = graded_basis(n, half);
    prob.blocks.push_back({sdp::BlockKind::Dense, static_cast<int>(v->size())});
    const double sign = role == Role::OuterX ? 1.0 : -1.0;
    const auto g_terms = g.terms();
    for (std::size_t a = 0; a < v->size(); ++a) {
      for (std::size_t b = a; b < v->size(); ++b) {
        for (const auto& ab : basis_product((*v)[a], (*v)[b], basis))
          for (const auto& gt : g_terms)
            for (const auto& u : basis_product(gt.index, ab.index, basis)) {
              const auto r = graded_rank(u.index);
              if (acc[r] == 0.0) touched.push_back(r);
              acc[r] += gt.coefficient * ab.coefficient * u.coefficient;
            }
        double c = 0.0;
        for (auto r : touched) {
          if (acc[r] != 0.0) {
            prob.a[r].add(block, static_cast<int>(a), static_cast<int>(b), sign * acc[r]);
            c += acc[r] * moments[r];
          }
          acc[r] = 0.0;
        }
        touched.clear();
        if (role == Role::OuterX && c != 0.0) prob.c.add(block, static_cast<int>(a), static_cast<int>(b), c);
      }
    }
  };
  for (std::size_t i = 0; i < as.k_multipliers.size(); ++i) add_block(Role::InnerK, static_cast<int>(i), as.k_multipliers[i]);
  for (std::size_t i = 0; i < as.x_multipliers.size(); ++i) add_block(Role::OuterX, static_cast<int>(i), as.x_multipliers[i]);
  return as;
}

QuadraticModuleCertificate certificate_from(const Assembly& as, const sdp::BlockMatrix& z, Role role) {
  QuadraticModuleCertificate cert;
  cert.role = role;
  cert.basis = as.basis;
  cert.multipliers = role == Role::InnerK ? as.k_multipliers : as.x_multipliers;
  for (std::size_t b = 0; b < as.blocks.size(); ++b) {
    if (as.blocks[b].role != role) continue;
    const auto& zb = z.blocks[b];
    cert.half_degrees.push_back(as.blocks[b].half_degree);
    cert.grams.push_back(0.5 * (zb + zb.transpose()));
  }
  return cert;
}

Polynomial polynomial_from(const Assembly& as, const sdp::BlockMatrix& z) {
  const auto m = as.problem.num_constraints();
  std::vector<double> coeffs(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j)
    for (const auto& e : as.problem.a[j].entries) {
      if (as.blocks[e.block].role != Role::OuterX) continue;
      const auto& zb = z.blocks[e.block];
      coeffs[j] += e.value * (e.row == e.col ? zb(e.row, e.row) : zb(e.row, e.col) + zb(e.col, e.row));
    }
  return Polynomial(as.dimension, as.basis, std::move(coeffs));
}

sdp::Options default_solver_options(int dimension) {
  sdp::Options o;
  if (dimension >= 2) o.feas_tol = o.gap_tol = 1e-6;
  return o;
}

std::string LevelResult::status_text() const {
  if (!error.empty()) return error;
  return sdp::to_string(status);
}

namespace {

LevelResult solve_once(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis, const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto as = assemble(k, x, d, basis);
  if (!opt.sdpa_dump_dir.empty()) {
    std::filesystem::create_directories(opt.sdpa_dump_dir);
    std::ofstream out(std::filesystem::path(opt.sdpa_dump_dir) / ("level_d" + std::to_string(d) + ".dat-s"));
    if (!out) throw Error("cannot write SDPA dump into " + opt.sdpa_dump_dir);
    sdp::write_sdpa(as.problem, out);
  }
  const auto sol = sdp::solve(as.problem, opt.solver.value_or(default_solver_options(k.dimension())));

  LevelResult r;
  r.d = d;
  r.basis = basis;
  r.status = sol.status;
  r.solver_residuals = sol.residuals;
  r.iterations = sol.iterations;
  r.p = polynomial_from(as, sol.z);
  r.v_d = integrate(x, r.p);
  r.cert_k = certificate_from(as, sol.z, Role::InnerK);
  r.cert_x = certificate_from(as, sol.z, Role::OuterX);
  const auto ck = certify(r.p, r.cert_k);
  const auto cx = certify(r.p, r.cert_x);
  r.cert_residual = std::max(ck.residual, cx.residual);
  r.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto* c : {&ck, &cx})
    for (double e : c->min_eigenvalues) r.min_gram_eigenvalue = std::min(r.min_gram_eigenvalue, e);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.status == sdp::Status::Optimal && r.cert_residual > 10.0 * opt.cert_tol) {
    std::ostringstream msg;
    msg << "degree " << d << ": solver reported Optimal but the certificate residual is " << r.cert_residual;
    throw CertificateMismatch(msg.str());
  }
  return r;
}

}  // namespace

LevelResult solve_level(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis, const Options& options) {
  auto r = solve_once(k, x, d, basis, options);
  if (r.status == sdp::Status::IllConditioned && basis == Basis::Monomial && k.dimension() == 1 &&
      options.chebyshev_retry) {
    const double spent = r.seconds;
    r = solve_once(k, x, d, Basis::ChebyshevTensor, options);
    r.retried = true;
    r.seconds += spent;
  }
  return r;
}

HierarchySequence run(const SemialgebraicSet& k, const OuterDomain& x, int d_min, int d_max, int step, Basis basis,
                      const Options& options, std::optional<double> reference_volume) {
  if (d_min % 2 != 0 || step <= 0 || step % 2 != 0) throw Error("degree sweep needs an even d_min and a positive even step");
  HierarchySequence seq;
  seq.reference_volume = reference_volume;
  for (int d = d_min; d <= d_max; d += step) {
    try {
      seq.levels.push_back(solve_level(k, x, d, basis, options));
    } catch (const DegreeTooSmall&) {
      throw;
    } catch (const CertificateMismatch& e) {
      LevelResult r;
      r.d = d;
      r.basis = basis;
      r.v_d = std::numeric_limits<double>::quiet_NaN();
      r.error = "CertificateMismatch";
      seq.levels.push_back(std::move(r));
      seq.warnings.push_back(e.what());
    }
  }
  const LevelResult* prev = nullptr;
  for (const auto& level : seq.levels) {
    if (!level.ok()) {
      seq.warnings.push_back("degree " + std::to_string(level.d) + ": " + level.status_text());
      continue;
    }
    if (prev && level.v_d > prev->v_d + options.monotonicity_tol) {
      seq.monotone = false;
      std::ostringstream msg;
      msg << "v_" << level.d << " = " << level.v_d << " exceeds v_" << prev->d << " = " << prev->v_d;
      seq.warnings.push_back(msg.str());
    }
    if (reference_volume && level.v_d < *reference_volume - options.monotonicity_tol) {
      std::ostringstream msg;
      msg << "v_" << level.d << " = " << level.v_d << " is below the reference volume " << *reference_volume;
      seq.warnings.push_back(msg.str());
    }
    prev = &level;
  }
  return seq;
}

}  // namespace volsos::hierarchy
