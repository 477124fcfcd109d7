#include "macflow/linear_solver.hpp"

#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <vector>

namespace macflow {

struct SparseDirectSolver::Impl {
  Eigen::UmfPackLU<SparseMatrix> lu;
  SparseMatrix a;  // copy of the factorized matrix for residual checks
  std::vector<SparseMatrix::StorageIndex> outer;
  std::vector<SparseMatrix::StorageIndex> inner;
  bool analyzed = false;
};

SparseDirectSolver::SparseDirectSolver() : impl_(std::make_unique<Impl>()) {}
SparseDirectSolver::~SparseDirectSolver() = default;
SparseDirectSolver::SparseDirectSolver(SparseDirectSolver&&) noexcept = default;
SparseDirectSolver& SparseDirectSolver::operator=(SparseDirectSolver&&) noexcept = default;

void SparseDirectSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw LinearSolverError("matrix is not square");
  Impl& s = *impl_;
  s.a = a;
  s.a.makeCompressed();
  const auto* op = s.a.outerIndexPtr();
  const auto* ip = s.a.innerIndexPtr();
  const bool same = s.analyzed && s.outer.size() == static_cast<std::size_t>(s.a.outerSize() + 1) &&
                    s.inner.size() == static_cast<std::size_t>(s.a.nonZeros()) &&
                    std::equal(s.outer.begin(), s.outer.end(), op) && std::equal(s.inner.begin(), s.inner.end(), ip);
  if (!same) {
    s.lu.analyzePattern(s.a);
    if (s.lu.info() != Eigen::Success) throw LinearSolverError("symbolic analysis failed");
    s.outer.assign(op, op + s.a.outerSize() + 1);
    s.inner.assign(ip, ip + s.a.nonZeros());
    s.analyzed = true;
    ++analyses_;
  }
  s.lu.factorize(s.a);
  if (s.lu.info() != Eigen::Success) {
    s.analyzed = false;
    throw LinearSolverError("sparse LU factorization failed (matrix numerically singular, " +
                            std::to_string(s.a.rows()) + " unknowns)");
  }
}

Eigen::VectorXd SparseDirectSolver::solve(const Eigen::VectorXd& b, double tol) {
  Impl& s = *impl_;
  Eigen::VectorXd x = s.lu.solve(b);
  if (s.lu.info() != Eigen::Success) throw LinearSolverError("sparse LU solve failed");
  const double bn = b.norm();
  auto residual = [&] {
    const double r = (s.a * x - b).norm();
    return bn > 0.0 ? r / bn : r;
  };
  last_residual_ = residual();
  for (int it = 0; it < 2 && last_residual_ > 0.01 * tol; ++it) {
    const Eigen::VectorXd r = b - s.a * x;
    x += s.lu.solve(r);
    last_residual_ = residual();
  }
  if (!std::isfinite(last_residual_) || last_residual_ > tol) {
    throw LinearSolverError("linear residual " + std::to_string(last_residual_) + " exceeds tolerance " +
                            std::to_string(tol) + " (condition estimate " + std::to_string(condition_estimate()) + ")");
  }
  return x;
}

double SparseDirectSolver::condition_estimate() const {
  const Impl& s = *impl_;
  if (!s.analyzed) return 0.0;
  double anorm = 0.0;
  for (int c = 0; c < s.a.outerSize(); ++c) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(s.a, c); it; ++it) col += std::abs(it.value());
    anorm = std::max(anorm, col);
  }
  const Eigen::Index n = s.a.rows();
  double inv = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    Eigen::VectorXd x(n);
    for (Eigen::Index k = 0; k < n; ++k) x[k] = probe == 0 ? 1.0 : ((k * (probe + 2)) % 7 < 3 ? 1.0 : -1.0);
    const Eigen::VectorXd y = s.lu.solve(x);
    inv = std::max(inv, y.lpNorm<1>() / x.lpNorm<1>());
  }
  return anorm * inv;
}

}  // namespace macflow
