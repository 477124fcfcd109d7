#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "macflow/config.hpp"
#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"

namespace macflow {

struct LevelResult {
  int n = 0;  // cells along the first axis
  double h = 0.0;
  double dt = 0.0;
  int steps = 0;
  double u_error = 0.0;
  double p_error = 0.0;
  double rho_error = 0.0;
  double bv_total = 0.0;
  double h1_sum = 0.0;
  unsigned flags = 0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  std::vector<LevelResult> levels;
  // Between consecutive levels; NaN where undefined (see notes).
  std::vector<double> u_order, p_order, rho_order;
  std::vector<std::string> notes;
  int reference = 0;  // 0 when errors are taken against the exact solution
  double reference_seconds = 0.0;

  /// Least-squares slope of log(u_error) against log(h), NaN if fewer than
  /// two usable levels.
  double fitted_u_order() const;
  /// True if every error is below its predecessor. Errors at or under
  /// `floor` count as equal to each other.
  static bool decreasing(const std::vector<double>& errors, double floor = 0.0);
  std::vector<double> column(double LevelResult::*member) const;
};

/// log(e_coarse / e_fine) / log(h_coarse / h_fine), NaN when the levels
/// coincide or either error is not positive.
double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

/// Volume averages of a fine-grid field over the cells of a nested coarse grid.
CellScalarField restrict_cells(const MacMesh& fine, const CellScalarField& q, const MacMesh& coarse);
/// Area averages of the fine faces that make up each coarse face.
VelocityField restrict_faces(const MacMesh& fine, const VelocityField& u, const MacMesh& coarse);

/// Runs the problem on each level with dt = dt_over_h * h. Needs at least three
/// levels (std::invalid_argument otherwise). Progress lines go to `log`.
ConvergenceTable run_convergence(const ProblemSpec& spec, const std::vector<int>& levels, int threads = 1,
                                 std::ostream* log = nullptr);

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t);
void print_convergence(std::ostream& os, const ConvergenceTable& t);

}  // namespace macflow
