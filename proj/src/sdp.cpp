#include "volsos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "volsos/errors.hpp"

namespace volsos::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SparseSymMatrix::add(int block, int row, int col, double value) {
  if (row > col) std::swap(row, col);
  entries.push_back({block, row, col, value});
}

BlockMatrix BlockMatrix::zeros(const std::vector<BlockSpec>& spec) {
  BlockMatrix m;
  for (const auto& b : spec)
    m.blocks.push_back(b.kind == BlockKind::Dense ? MatrixXd::Zero(b.size, b.size) : MatrixXd::Zero(b.size, 1));
  return m;
}

BlockMatrix BlockMatrix::from_sparse(const std::vector<BlockSpec>& spec, const SparseSymMatrix& s) {
  auto m = zeros(spec);
  for (const auto& e : s.entries) {
    if (spec[e.block].kind == BlockKind::Diagonal) {
      m.blocks[e.block](e.row, 0) += e.value;
    } else {
      m.blocks[e.block](e.row, e.col) += e.value;
      if (e.row != e.col) m.blocks[e.block](e.col, e.row) += e.value;
    }
  }
  return m;
}

MatrixXd BlockMatrix::dense_block(std::size_t b) const {
  const auto& blk = blocks[b];
  if (blk.cols() == 1 && blk.rows() != 1) return blk.col(0).asDiagonal();
  return blk;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) s += a.blocks[i].cwiseProduct(b.blocks[i]).sum();
  return s;
}

double frobenius_norm(const BlockMatrix& a) {
  double s = 0.0;
  for (const auto& blk : a.blocks) s += blk.squaredNorm();
  return std::sqrt(s);
}

double min_eigenvalue(const BlockMatrix& a) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& blk : a.blocks) {
    if (blk.size() == 0) continue;
    if (blk.cols() == 1) {
      m = std::min(m, blk.minCoeff());
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(blk, Eigen::EigenvaluesOnly);
      m = std::min(m, es.eigenvalues()(0));
    }
  }
  return m;
}

void Problem::validate() const {
  if (a.empty()) throw Error("SDP needs at least one scalar variable");
  if (b.size() != static_cast<Eigen::Index>(a.size())) throw Error("objective length does not match variable count");
  if (blocks.empty()) throw Error("SDP needs at least one block");
  for (const auto& blk : blocks)
    if (blk.size < 1) throw Error("SDP block sizes must be positive");
  auto check = [&](const SparseSymMatrix& m, const std::string& name) {
    for (const auto& e : m.entries) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size())) throw Error(name + ": block index out of range");
      const auto& spec = blocks[e.block];
      if (e.row < 0 || e.col < e.row || e.col >= spec.size) throw Error(name + ": entry index out of range");
      if (spec.kind == BlockKind::Diagonal && e.row != e.col) throw Error(name + ": off-diagonal entry in LP block");
      if (!std::isfinite(e.value)) throw Error(name + ": non-finite entry");
    }
  };
  check(c, "C");
  for (std::size_t j = 0; j < a.size(); ++j) check(a[j], "A_" + std::to_string(j + 1));
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal:
      return "Optimal";
    case Status::Infeasible:
      return "Infeasible";
    case Status::IllConditioned:
      return "IllConditioned";
    case Status::IterationLimit:
      return "IterationLimit";
  }
  return "Unknown";
}

namespace {

using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Iterates are kept in extended precision: at high hierarchy degrees the
// Schur complement is too badly conditioned for binary64 to keep A(X) = b.
struct Blocks {
  std::vector<Mat> blocks;

  static Blocks zeros(const std::vector<BlockSpec>& spec) {
    Blocks m;
    for (const auto& b : spec)
      m.blocks.push_back(b.kind == BlockKind::Dense ? Mat::Zero(b.size, b.size) : Mat::Zero(b.size, 1));
    return m;
  }
};

Blocks to_real(const BlockMatrix& a) {
  Blocks r;
  for (const auto& b : a.blocks) r.blocks.push_back(b.cast<Real>());
  return r;
}

BlockMatrix to_double(const Blocks& a) {
  BlockMatrix r;
  for (const auto& b : a.blocks) r.blocks.push_back(b.cast<double>());
  return r;
}

Real inner(const Blocks& a, const Blocks& b) {
  Real s = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) s += a.blocks[i].cwiseProduct(b.blocks[i]).sum();
  return s;
}

Real frobenius_norm(const Blocks& a) {
  Real s = 0.0;
  for (const auto& blk : a.blocks) s += blk.squaredNorm();
  return std::sqrt(s);
}

struct Triplet {
  int row;
  int col;
  Real value;
};

// Constraint data rearranged per block for the Schur complement.
struct Compiled {
  std::vector<BlockSpec> spec;
  int m = 0;
  int total_dim = 0;
  std::vector<std::vector<std::vector<Triplet>>> dense;  // [block][j] entries
  std::vector<std::vector<int>> active;                  // [block] variables with entries there
  std::vector<Mat> diag;                            // [block] m x size (LP blocks)
  Blocks c;
  Vec b;

  explicit Compiled(const Problem& p) : spec(p.blocks), m(p.num_constraints()), b(p.b.cast<Real>()) {
    const auto nb = spec.size();
    dense.resize(nb);
    active.resize(nb);
    diag.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      total_dim += spec[k].size;
      if (spec[k].kind == BlockKind::Dense)
        dense[k].resize(m);
      else
        diag[k] = Mat::Zero(m, spec[k].size);
    }
    for (int j = 0; j < m; ++j) {
      // merge duplicates so every (row, col) appears once
      std::map<std::tuple<int, int, int>, Real> merged;
      for (const auto& e : p.a[j].entries) merged[{e.block, e.row, e.col}] += e.value;
      for (const auto& [key, v] : merged) {
        const auto [blk, r, col] = key;
        if (v == 0.0) continue;
        if (spec[blk].kind == BlockKind::Dense)
          dense[blk][j].push_back({r, col, v});
        else
          diag[blk](j, r) += v;
      }
    }
    for (std::size_t k = 0; k < nb; ++k)
      if (spec[k].kind == BlockKind::Dense)
        for (int j = 0; j < m; ++j)
          if (!dense[k][j].empty()) active[k].push_back(j);
    c = to_real(BlockMatrix::from_sparse(spec, p.c));
  }

  bool is_dense(std::size_t k) const { return spec[k].kind == BlockKind::Dense; }

  // A(X)_j = <A_j, X>
  Vec apply(const Blocks& x) const {
    Vec out = Vec::Zero(m);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (is_dense(k)) {
        const auto& xb = x.blocks[k];
        for (int j : active[k]) {
          Real s = 0.0;
          for (const auto& t : dense[k][j]) s += t.value * (t.row == t.col ? xb(t.row, t.row) : 2.0 * xb(t.row, t.col));
          out(j) += s;
        }
      } else {
        out += diag[k] * x.blocks[k].col(0);
      }
    }
    return out;
  }

  // sum_j y_j A_j
  Blocks adjoint(const Vec& y) const {
    auto out = Blocks::zeros(spec);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (is_dense(k)) {
        auto& ob = out.blocks[k];
        for (int j : active[k]) {
          const Real yj = y(j);
          if (yj == 0.0) continue;
          for (const auto& t : dense[k][j]) {
            ob(t.row, t.col) += yj * t.value;
            if (t.row != t.col) ob(t.col, t.row) += yj * t.value;
          }
        }
      } else {
        out.blocks[k].col(0) = diag[k].transpose() * y;
      }
    }
    return out;
  }
};

Blocks add(const Blocks& a, const Blocks& b, Real beta = 1.0) {
  Blocks r = a;
  for (std::size_t k = 0; k < r.blocks.size(); ++k) r.blocks[k] += beta * b.blocks[k];
  return r;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha dX PSD, given the Cholesky factor of X.
Real max_step(const Compiled& cp, const std::vector<Eigen::LLT<Mat>>& chol, const Blocks& x,
                const Blocks& dx) {
  Real alpha = std::numeric_limits<Real>::infinity();
  for (std::size_t k = 0; k < cp.spec.size(); ++k) {
    if (cp.is_dense(k)) {
      const auto& l = chol[k].matrixL();
      Mat t = l.solve(dx.blocks[k]);
      t = l.solve(t.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(t), Eigen::EigenvaluesOnly);
      const Real lmin = es.eigenvalues()(0);
      if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    } else {
      const auto xv = x.blocks[k].col(0);
      const auto dv = dx.blocks[k].col(0);
      for (Eigen::Index i = 0; i < xv.size(); ++i)
        if (dv(i) < 0.0) alpha = std::min(alpha, -xv(i) / dv(i));
    }
  }
  return alpha;
}

constexpr Real kLateGap = 1e-2;
constexpr Real kSigmaFloor = 0.2;
constexpr int kRefineSteps = 4;

struct Direction {
  Vec dy;
  Blocks dx;
  Blocks ds;
};

class Solver {
 public:
  Solver(const Problem& p, const Options& o) : problem_(p), cp_(p), opt_(o) {}

  Solution run();

 private:
  void initial_point();
  bool factor_iterates();
  bool build_schur();
  Mat operator_matrix(const std::vector<Mat>& right) const;
  Vec schur_apply(const Vec& v) const;
  Vec solve_schur(const Vec& rhs) const;
  Direction direction(Real sigma_mu, const Blocks& rd, const Vec& rp, const Direction* predictor);
  Solution finish(Status status, std::string message);

  const Problem& problem_;
  Compiled cp_;
  Options opt_;
  Blocks x_;
  Blocks s_;
  Vec y_;
  std::vector<Eigen::LLT<Mat>> chol_x_;
  std::vector<Eigen::LLT<Mat>> chol_s_;
  std::vector<Mat> s_inv_;
  Eigen::LLT<Mat> schur_;
  Eigen::LLT<Mat> xgram_;
  bool have_xgram_ = false;
  int iterations_ = 0;
  std::vector<Real> trace_;
};

void Solver::initial_point() {
  x_ = Blocks::zeros(cp_.spec);
  s_ = Blocks::zeros(cp_.spec);
  y_ = Vec::Zero(cp_.m);
  for (std::size_t k = 0; k < cp_.spec.size(); ++k) {
    const Real n = cp_.spec[k].size;
    Real xi = std::max<Real>(10.0, std::sqrt(n));
    Real eta = std::max<Real>(10.0, std::sqrt(n));
    const Real c_norm = cp_.c.blocks[k].norm();
    eta = std::max(eta, c_norm);
    for (int j = 0; j < cp_.m; ++j) {
      Real a_norm = 0.0;
      if (cp_.is_dense(k)) {
        for (const auto& t : cp_.dense[k][j]) a_norm += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
        a_norm = std::sqrt(a_norm);
      } else {
        a_norm = cp_.diag[k].row(j).norm();
      }
      if (a_norm == 0.0) continue;
      xi = std::max(xi, n * (1.0 + std::abs(cp_.b(j))) / (1.0 + a_norm));
      eta = std::max(eta, a_norm);
    }
    if (cp_.is_dense(k)) {
      x_.blocks[k] = xi * Mat::Identity(cp_.spec[k].size, cp_.spec[k].size);
      s_.blocks[k] = eta * Mat::Identity(cp_.spec[k].size, cp_.spec[k].size);
    } else {
      x_.blocks[k].setConstant(xi);
      s_.blocks[k].setConstant(eta);
    }
  }
}

bool Solver::factor_iterates() {
  const auto nb = cp_.spec.size();
  chol_x_.assign(nb, {});
  chol_s_.assign(nb, {});
  s_inv_.assign(nb, {});
  for (std::size_t k = 0; k < nb; ++k) {
    if (cp_.is_dense(k)) {
      chol_x_[k].compute(x_.blocks[k]);
      chol_s_[k].compute(s_.blocks[k]);
      if (chol_x_[k].info() != Eigen::Success || chol_s_[k].info() != Eigen::Success) return false;
      const auto n = cp_.spec[k].size;
      s_inv_[k] = chol_s_[k].solve(Mat::Identity(n, n));
      s_inv_[k] = symmetrize(s_inv_[k]);
    } else {
      if ((x_.blocks[k].array() <= 0.0).any() || (s_.blocks[k].array() <= 0.0).any()) return false;
      s_inv_[k] = s_.blocks[k].cwiseInverse();
    }
  }
  return true;
}

// M_ij = tr(A_i X A_j S^-1)
// A (X (x) R) A^*, i.e. entries tr(A_i X A_j R); only the lower triangle of
// the dense part is accumulated.
Mat Solver::operator_matrix(const std::vector<Mat>& right) const {
  Mat m = Mat::Zero(cp_.m, cp_.m);
  for (std::size_t k = 0; k < cp_.spec.size(); ++k) {
    if (cp_.is_dense(k)) {
      const auto& xb = x_.blocks[k];
      const auto& rb = right[k];
      const auto n = xb.rows();
      Mat xa(n, n);
      for (int j : cp_.active[k]) {
        xa.setZero();
        for (const auto& t : cp_.dense[k][j]) {
          xa.col(t.col) += t.value * xb.col(t.row);
          if (t.row != t.col) xa.col(t.row) += t.value * xb.col(t.col);
        }
        const Mat g = xa * rb;
        for (int i : cp_.active[k]) {
          if (i < j) continue;
          Real s = 0.0;
          for (const auto& t : cp_.dense[k][i]) s += t.value * (t.row == t.col ? g(t.row, t.row) : g(t.row, t.col) + g(t.col, t.row));
          m(i, j) += s;
        }
      }
    } else {
      const Vec d = x_.blocks[k].col(0).cwiseProduct(right[k].col(0));
      m.noalias() += cp_.diag[k] * d.asDiagonal() * cp_.diag[k].transpose();
    }
  }
  Mat lower = m.triangularView<Eigen::Lower>();
  Mat full = lower + lower.transpose();
  full.diagonal() = lower.diagonal();
  return full;
}

// Cholesky with a growing diagonal shift when plain factorisation fails.
bool factor_regularized(const Mat& a, Eigen::LLT<Mat>& llt) {
  llt.compute(a);
  if (llt.info() == Eigen::Success) return true;
  const Real scale = std::max<Real>(1.0, a.diagonal().cwiseAbs().maxCoeff());
  for (Real delta = 1e-14; delta <= 1e-6; delta *= 100.0) {
    Mat reg = a;
    reg.diagonal().array() += delta * scale;
    llt.compute(reg);
    if (llt.info() == Eigen::Success) return true;
  }
  return false;
}

// M_ij = tr(A_i X A_j S^-1)
bool Solver::build_schur() {
  if (!factor_regularized(operator_matrix(s_inv_), schur_)) return false;
  have_xgram_ = factor_regularized(operator_matrix(x_.blocks), xgram_);
  return true;
}

// M v = A(X (sum v_j A_j) S^-1) through the operators, not the stored matrix.
Vec Solver::schur_apply(const Vec& v) const {
  auto w = cp_.adjoint(v);
  for (std::size_t k = 0; k < cp_.spec.size(); ++k) {
    if (cp_.is_dense(k))
      w.blocks[k] = symmetrize(x_.blocks[k] * w.blocks[k] * s_inv_[k]);
    else
      w.blocks[k] = w.blocks[k].cwiseProduct(x_.blocks[k]).cwiseProduct(s_inv_[k]);
  }
  return cp_.apply(w);
}

// Cholesky solve plus iterative refinement; the Schur matrix becomes badly
// conditioned as mu -> 0 and plain solves lose primal feasibility.
Vec Solver::solve_schur(const Vec& rhs) const {
  Vec x = schur_.solve(rhs);
  const Real target = 1e-14 * (1.0 + rhs.norm());
  Real prev = std::numeric_limits<Real>::infinity();
  for (int it = 0; it < kRefineSteps; ++it) {
    const Vec res = rhs - schur_apply(x);
    const Real nres = res.norm();
    if (nres <= target || nres >= 0.5 * prev) break;
    prev = nres;
    x += schur_.solve(res);
  }
  return x;
}

Direction Solver::direction(Real sigma_mu, const Blocks& rd, const Vec& rp, const Direction* predictor) {
  const auto nb = cp_.spec.size();
  // R = sigma mu S^-1 - X - X Rd S^-1 - corrector
  Blocks r = Blocks::zeros(cp_.spec);
  for (std::size_t k = 0; k < nb; ++k) {
    if (cp_.is_dense(k)) {
      Mat rk = sigma_mu * s_inv_[k] - x_.blocks[k] - x_.blocks[k] * rd.blocks[k] * s_inv_[k];
      if (predictor) rk -= predictor->dx.blocks[k] * predictor->ds.blocks[k] * s_inv_[k];
      r.blocks[k] = symmetrize(rk);
    } else {
      auto rk = (sigma_mu * s_inv_[k].array() - x_.blocks[k].array() -
                 x_.blocks[k].array() * rd.blocks[k].array() * s_inv_[k].array())
                    .matrix()
                    .eval();
      if (predictor)
        rk.array() -= predictor->dx.blocks[k].array() * predictor->ds.blocks[k].array() * s_inv_[k].array();
      r.blocks[k] = rk;
    }
  }
  Direction d;
  d.dy = solve_schur(rp - cp_.apply(r));
  d.ds = add(rd, cp_.adjoint(d.dy), -1.0);
  d.dx = Blocks::zeros(cp_.spec);
  for (std::size_t k = 0; k < nb; ++k) {
    if (cp_.is_dense(k)) {
      Mat dk = sigma_mu * s_inv_[k] - x_.blocks[k] - x_.blocks[k] * d.ds.blocks[k] * s_inv_[k];
      if (predictor) dk -= predictor->dx.blocks[k] * predictor->ds.blocks[k] * s_inv_[k];
      d.dx.blocks[k] = symmetrize(dk);
    } else {
      auto dk = (sigma_mu * s_inv_[k].array() - x_.blocks[k].array() -
                 x_.blocks[k].array() * d.ds.blocks[k].array() * s_inv_[k].array())
                    .matrix()
                    .eval();
      if (predictor)
        dk.array() -= predictor->dx.blocks[k].array() * predictor->ds.blocks[k].array() * s_inv_[k].array();
      d.dx.blocks[k] = dk;
    }
  }
  // X dS S^-1 cancels badly once S is nearly singular; restore A(dX) = Rp
  // with a correction X A^*(w) X, which stays inside the range of X and so
  // does not shorten the step the way a Euclidean projection would.
  if (have_xgram_) {
    const auto w = cp_.adjoint(xgram_.solve(rp - cp_.apply(d.dx)));
    for (std::size_t k = 0; k < nb; ++k) {
      if (cp_.is_dense(k))
        d.dx.blocks[k] += symmetrize(x_.blocks[k] * w.blocks[k] * x_.blocks[k]);
      else
        d.dx.blocks[k] += w.blocks[k].cwiseProduct(x_.blocks[k]).cwiseProduct(x_.blocks[k]);
    }
  }
  return d;
}

Solution Solver::finish(Status status, std::string message) {
  Solution sol;
  sol.y = y_.cast<double>();
  sol.z = to_double(x_);
  sol.s = to_double(add(cp_.c, cp_.adjoint(y_), -1.0));
  sol.primal_objective = inner(cp_.c, x_);
  sol.dual_objective = cp_.b.dot(y_);
  sol.iterations = iterations_;
  sol.complementarity_trace.assign(trace_.begin(), trace_.end());
  sol.status = status;
  sol.message = std::move(message);
  return sol;
}

Solution Solver::run() {
  initial_point();
  const Real b_norm = cp_.b.norm();
  const Real c_norm = frobenius_norm(cp_.c);
  const Real big = 1e12 * (1.0 + b_norm + c_norm);
  int stalled = 0;

  for (iterations_ = 0; iterations_ < opt_.max_iter; ++iterations_) {
    const Vec rp = cp_.b - cp_.apply(x_);
    const Blocks rd = add(add(cp_.c, s_, -1.0), cp_.adjoint(y_), -1.0);
    const Real pobj = inner(cp_.c, x_);
    const Real dobj = cp_.b.dot(y_);
    const Real xs = inner(x_, s_);
    trace_.push_back(xs);
    const Real mu = xs / cp_.total_dim;
    const Real pinf = rp.norm() / (1.0 + b_norm);
    const Real dinf = frobenius_norm(rd);
    const Real relgap = std::max(std::abs(pobj - dobj), xs) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (opt_.verbose)
      std::cerr << std::setw(3) << iterations_ << " pobj " << std::setprecision(10) << pobj << " dobj " << dobj
                << " pinf " << std::setprecision(2) << pinf << " dinf " << dinf << " gap " << relgap << " xs " << xs << " |X| " << frobenius_norm(x_) << " |y| " << y_.norm() << "\n";

    if (pinf <= opt_.feas_tol && dinf <= opt_.feas_tol && relgap <= opt_.gap_tol) {
      // confirm with the independent residuals before stopping
      if (within_tolerances(residuals(problem_, y_.cast<double>(), to_double(x_)), opt_)) return finish(Status::Optimal, "converged");
    }
    if (dobj > big || y_.cwiseAbs().maxCoeff() > big) return finish(Status::Infeasible, "dual objective diverges");
    if (pobj < -big) return finish(Status::Infeasible, "primal objective diverges");

    if (!factor_iterates()) return finish(Status::IllConditioned, "iterates lost positive definiteness");
    if (!build_schur()) return finish(Status::IllConditioned, "Schur complement is not positive definite");

    // predictor
    const Direction pred = direction(0.0, rd, rp, nullptr);
    const Real ap = std::min<Real>(1.0, max_step(cp_, chol_x_, x_, pred.dx));
    std::vector<Eigen::LLT<Mat>> chol_s = chol_s_;
    const Real ad = std::min<Real>(1.0, max_step(cp_, chol_s, s_, pred.ds));
    const Real xs_pred = inner(add(x_, pred.dx, ap), add(s_, pred.ds, ad));
    const Real expon = std::max<Real>(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    Real sigma = std::min<Real>(1.0, std::pow(std::max<Real>(0.0, xs_pred) / xs, expon));
    // Near the optimum pure Mehrotra steps let off-diagonal blocks of the
    // iterates lag like sqrt(mu); a centring floor keeps the error O(mu).
    if (relgap < kLateGap) sigma = std::max(sigma, kSigmaFloor);

    // corrector
    const Direction corr = direction(sigma * mu, rd, rp, &pred);
    const Real ap_max = max_step(cp_, chol_x_, x_, corr.dx);
    const Real ad_max = max_step(cp_, chol_s, s_, corr.ds);
    const Real gamma = 0.9 + 0.09 * std::min(ap, ad);
    const Real step_p = std::min<Real>(1.0, gamma * ap_max);
    const Real step_d = std::min<Real>(1.0, gamma * ad_max);

    if (opt_.verbose)
      std::cerr << "    sigma " << std::setprecision(3) << sigma << " step_p " << step_p << " step_d " << step_d << "\n";
    x_ = add(x_, corr.dx, step_p);
    y_ += step_d * corr.dy;
    s_ = add(s_, corr.ds, step_d);
    for (auto& blk : x_.blocks)
      if (blk.cols() > 1) blk = symmetrize(blk);
    for (auto& blk : s_.blocks)
      if (blk.cols() > 1) blk = symmetrize(blk);

    stalled = (step_p < 1e-8 && step_d < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 3) return finish(Status::IllConditioned, "step lengths collapsed");
  }
  return finish(Status::IterationLimit, "iteration limit reached");
}

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  problem.validate();
  Solver solver(problem, options);
  auto sol = solver.run();
  sol.residuals = residuals(problem, sol.y, sol.z);
  if (sol.status == Status::Optimal && !within_tolerances(sol.residuals, options)) {
    sol.status = Status::IllConditioned;
    sol.message = "solver converged but the independent residual check failed";
  }
  return sol;
}

Residuals residuals(const Problem& problem, const Eigen::VectorXd& y, const BlockMatrix& z) {
  const auto spec = problem.blocks;
  auto s = BlockMatrix::from_sparse(spec, problem.c);
  const int m = problem.num_constraints();
  VectorXd az = VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    for (const auto& e : problem.a[j].entries) {
      const bool diag_block = spec[e.block].kind == BlockKind::Diagonal;
      if (diag_block) {
        s.blocks[e.block](e.row, 0) -= y(j) * e.value;
        az(j) += e.value * z.blocks[e.block](e.row, 0);
      } else {
        s.blocks[e.block](e.row, e.col) -= y(j) * e.value;
        if (e.row != e.col) s.blocks[e.block](e.col, e.row) -= y(j) * e.value;
        az(j) += e.value * (e.row == e.col ? z.blocks[e.block](e.row, e.row)
                                           : z.blocks[e.block](e.row, e.col) + z.blocks[e.block](e.col, e.row));
      }
    }
  }
  const auto c = BlockMatrix::from_sparse(spec, problem.c);
  Residuals r;
  r.primal = std::max(0.0, -min_eigenvalue(s));
  r.dual = std::max((az - problem.b).norm() / (1.0 + problem.b.norm()), std::max(0.0, -min_eigenvalue(z)));
  const double pobj = inner(c, z);
  const double dobj = problem.b.dot(y);
  r.gap = pobj - dobj;
  r.relative_gap = std::abs(r.gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

Residuals residuals(const Problem& problem, const Solution& solution) {
  return residuals(problem, solution.y, solution.z);
}

bool within_tolerances(const Residuals& r, const Options& options) {
  return r.primal <= options.feas_tol && r.dual <= options.feas_tol && r.relative_gap <= options.gap_tol;
}

void write_sdpa(const Problem& problem, std::ostream& os) {
  problem.validate();
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  os << "* maximize b'y s.t. C - sum y_j A_j PSD, stored as c = -b, F0 = -C, Fj = -A_j\n";
  os << problem.num_constraints() << "\n" << problem.blocks.size() << "\n";
  for (std::size_t k = 0; k < problem.blocks.size(); ++k) {
    const auto& blk = problem.blocks[k];
    os << (k ? " " : "") << (blk.kind == BlockKind::Diagonal ? -blk.size : blk.size);
  }
  os << "\n";
  for (int j = 0; j < problem.num_constraints(); ++j) os << (j ? " " : "") << -problem.b(j);
  os << "\n";
  auto emit = [&](int matno, const SparseSymMatrix& m) {
    std::map<std::tuple<int, int, int>, double> merged;
    for (const auto& e : m.entries) merged[{e.block, e.row, e.col}] += e.value;
    for (const auto& [key, v] : merged) {
      if (v == 0.0) continue;
      const auto [blk, r, c] = key;
      os << matno << " " << blk + 1 << " " << r + 1 << " " << c + 1 << " " << -v << "\n";
    }
  };
  emit(0, problem.c);
  for (int j = 0; j < problem.num_constraints(); ++j) emit(j + 1, problem.a[j]);
  os.flags(flags);
  os.precision(precision);
}

Problem read_sdpa(std::istream& is) {
  std::string text;
  {
    std::ostringstream buf;
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
      for (char& ch : line)
        if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
      buf << line << "\n";
    }
    text = buf.str();
  }
  std::istringstream in(text);
  int m = 0, nblocks = 0;
  if (!(in >> m >> nblocks) || m < 1 || nblocks < 1) throw ParseError("SDPA: bad header");
  Problem p;
  for (int k = 0; k < nblocks; ++k) {
    int size = 0;
    if (!(in >> size) || size == 0) throw ParseError("SDPA: bad block structure");
    p.blocks.push_back({size < 0 ? BlockKind::Diagonal : BlockKind::Dense, std::abs(size)});
  }
  p.b.resize(m);
  for (int j = 0; j < m; ++j) {
    double c = 0.0;
    if (!(in >> c)) throw ParseError("SDPA: bad objective vector");
    p.b(j) = -c;
  }
  p.a.resize(m);
  int matno = 0, blk = 0, r = 0, c = 0;
  double v = 0.0;
  while (in >> matno >> blk >> r >> c >> v) {
    if (matno < 0 || matno > m || blk < 1 || blk > nblocks) throw ParseError("SDPA: entry index out of range");
    auto& target = matno == 0 ? p.c : p.a[matno - 1];
    target.add(blk - 1, r - 1, c - 1, -v);
  }
  if (!in.eof()) throw ParseError("SDPA: malformed entry line");
  p.validate();
  return p;
}

}  // namespace volsos::sdp
