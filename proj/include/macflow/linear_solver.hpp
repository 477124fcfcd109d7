#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>

#include "macflow/assembly.hpp"

namespace macflow {

struct LinearSolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sparse direct solver with symbolic-analysis reuse. The pattern of the
/// last factorized matrix is remembered; a matrix with the same pattern is
/// only refactorized numerically.
class SparseDirectSolver {
 public:
  SparseDirectSolver();
  ~SparseDirectSolver();
  SparseDirectSolver(SparseDirectSolver&&) noexcept;
  SparseDirectSolver& operator=(SparseDirectSolver&&) noexcept;

  /// Throws LinearSolverError if the matrix is numerically singular.
  void factorize(const SparseMatrix& a);

  /// Solves with up to two steps of iterative refinement and throws if the
  /// relative residual |Ax - b| / |b| stays above tol.
  Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol);

  double last_residual() const { return last_residual_; }
  /// Lower-bound estimate of the 1-norm condition number from a few probe
  /// solves with the current factorization (0 if nothing is factorized).
  double condition_estimate() const;
  /// Number of symbolic analyses performed so far.
  int analyses() const { return analyses_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
  int analyses_ = 0;
};

}  // namespace macflow
