#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "volsos/poly.hpp"
#include "volsos/sdp.hpp"
#include "volsos/semialg.hpp"

namespace volsos::hierarchy {

// sum_i g_i * v_i' G_i v_i with g_0 = 1 and v_i the graded basis of degree
// floor((d - deg g_i) / 2). Multipliers are held in the certificate's basis.
struct QuadraticModuleCertificate {
  SemialgebraicSet::Role role = SemialgebraicSet::Role::OuterX;
  Basis basis = Basis::Monomial;
  std::vector<Polynomial> multipliers;
  std::vector<int> half_degrees;
  std::vector<Eigen::MatrixXd> grams;
};

struct CertificateCheck {
  double residual = 0.0;  // max coefficient deviation from p (OuterX) or p - 1 (InnerK)
  std::vector<double> min_eigenvalues;
};

// Rebuilds the certified polynomial by polynomial arithmetic alone.
CertificateCheck certify(const Polynomial& p, const QuadraticModuleCertificate& cert);

struct BlockInfo {
  SemialgebraicSet::Role role;
  int multiplier;   // index into the role's multiplier list
  int half_degree;  // Gram basis degree
};

// min <C, Z> s.t. sigma_X - sigma_K = 1 coefficientwise, Z = all Gram blocks.
// Constraint j matches the coefficient of graded_basis(n, d)[j].
struct Assembly {
  int dimension = 0;
  int degree = 0;
  Basis basis = Basis::Monomial;
  sdp::Problem problem;
  std::vector<BlockInfo> blocks;
  std::vector<Polynomial> k_multipliers;  // g_0 = 1 first, in `basis`
  std::vector<Polynomial> x_multipliers;
};

// Throws DegreeTooSmall, DimensionMismatch, or Error for odd d.
Assembly assemble(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis);

// Splits a Gram block matrix back into certificates and p = sigma_X.
QuadraticModuleCertificate certificate_from(const Assembly& assembly, const sdp::BlockMatrix& z,
                                            SemialgebraicSet::Role role);
Polynomial polynomial_from(const Assembly& assembly, const sdp::BlockMatrix& z);

struct Options {
  std::optional<sdp::Options> solver;  // default: tolerances 1e-8 for n = 1, 1e-6 otherwise
  double cert_tol = 1e-6;
  double monotonicity_tol = 1e-6;
  bool chebyshev_retry = true;  // n = 1, monomial basis, IllConditioned
  std::string sdpa_dump_dir;    // empty: no dump
};

sdp::Options default_solver_options(int dimension);

struct LevelResult {
  int d = 0;
  Basis basis = Basis::Monomial;  // basis actually used (after a retry)
  bool retried = false;
  double v_d = 0.0;
  Polynomial p{1};
  QuadraticModuleCertificate cert_k;
  QuadraticModuleCertificate cert_x;
  sdp::Status status = sdp::Status::IterationLimit;
  sdp::Residuals solver_residuals;
  int iterations = 0;
  double cert_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
  double seconds = 0.0;
  std::string error;  // set when the level threw (run() only)

  bool ok() const { return status == sdp::Status::Optimal && error.empty(); }
  std::string status_text() const;
};

// Throws CertificateMismatch when the solver reports Optimal but the
// certificate residual exceeds 10 * cert_tol.
LevelResult solve_level(const SemialgebraicSet& k, const OuterDomain& x, int d, Basis basis,
                        const Options& options = {});

struct HierarchySequence {
  std::vector<LevelResult> levels;
  std::optional<double> reference_volume;
  bool monotone = true;
  std::vector<std::string> warnings;
};

HierarchySequence run(const SemialgebraicSet& k, const OuterDomain& x, int d_min, int d_max, int step, Basis basis,
                      const Options& options = {}, std::optional<double> reference_volume = std::nullopt);

}  // namespace volsos::hierarchy
