#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace volsos::sdp {

// Block-diagonal semidefinite program in the form
//
//   maximize  b'y   subject to  S = C - sum_j y_j A_j  is PSD,
//
// whose conic dual is  minimize <C, Z>  subject to  <A_j, Z> = b_j, Z PSD.
// Diagonal blocks are LP cones (a vector of 1x1 blocks).

enum class BlockKind { Dense, Diagonal };

struct BlockSpec {
  BlockKind kind = BlockKind::Dense;
  int size = 0;
};

// One upper-triangular entry (row <= col, 0-based) of a symmetric block matrix.
// Diagonal blocks only carry row == col entries. Duplicates are summed.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SparseSymMatrix {
  std::vector<Entry> entries;

  void add(int block, int row, int col, double value);
};

// Dense block-diagonal storage; Diagonal blocks are size x 1 column vectors.
struct BlockMatrix {
  std::vector<Eigen::MatrixXd> blocks;

  static BlockMatrix zeros(const std::vector<BlockSpec>& spec);
  static BlockMatrix from_sparse(const std::vector<BlockSpec>& spec, const SparseSymMatrix& m);

  // Full symmetric matrix for a block (diagonal blocks expanded).
  Eigen::MatrixXd dense_block(std::size_t b) const;
};

double inner(const BlockMatrix& a, const BlockMatrix& b);
double frobenius_norm(const BlockMatrix& a);
double min_eigenvalue(const BlockMatrix& a);

struct Problem {
  std::vector<BlockSpec> blocks;
  Eigen::VectorXd b;
  SparseSymMatrix c;
  std::vector<SparseSymMatrix> a;  // one per scalar variable y_j

  int num_constraints() const { return static_cast<int>(a.size()); }
  // Throws volsos::Error on inconsistent structure.
  void validate() const;
};

enum class Status { Optimal, Infeasible, IllConditioned, IterationLimit };

std::string to_string(Status status);

struct Options {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

// primal:       max(0, -lambda_min(C - sum y_j A_j))
// dual:         max(||A(Z) - b|| / (1 + ||b||), -lambda_min(Z))
// gap:          <C, Z> - b'y
// relative_gap: |gap| / (1 + |<C, Z>| + |b'y|)
struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
};

struct Solution {
  Status status = Status::IterationLimit;
  Eigen::VectorXd y;
  BlockMatrix s;  // C - sum y_j A_j, recomputed from y
  BlockMatrix z;
  Residuals residuals;
  double primal_objective = 0.0;  // <C, Z>
  double dual_objective = 0.0;    // b'y
  int iterations = 0;
  std::vector<double> complementarity_trace;  // <X, S> at the start of each iteration
  std::string message;
};

// Primal-dual path following with the HKM direction and Mehrotra
// predictor-corrector steps. Infeasible start from scaled identities.
Solution solve(const Problem& problem, const Options& options = {});

// Recomputes the residuals from y and Z alone.
Residuals residuals(const Problem& problem, const Eigen::VectorXd& y, const BlockMatrix& z);
Residuals residuals(const Problem& problem, const Solution& solution);

bool within_tolerances(const Residuals& r, const Options& options);

// SDPA sparse format (.dat-s), 1-based blocks and indices, LP blocks as
// negative sizes. SDPA minimises c'x with F(x) = sum F_i x_i - F_0 PSD, so the
// file carries c = -b, F_0 = -C, F_i = -A_i and x coincides with y.
void write_sdpa(const Problem& problem, std::ostream& os);
Problem read_sdpa(std::istream& is);

}  // namespace volsos::sdp
