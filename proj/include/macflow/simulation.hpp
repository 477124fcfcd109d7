#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"
#include "macflow/solver.hpp"
#include "macflow/verification.hpp"

namespace macflow {

/// Analytic fields, used to fill the error columns.
struct ExactSolution {
  std::function<Vec3(double, const Vec3&)> u;
  std::function<double(double, const Vec3&)> p;  // any mean; compared after removing it
  std::function<double(double, const Vec3&)> rho;
};

/// Continuous problem data.
struct FlowProblem {
  std::string name;
  ScalarFunction rho0;
  VectorFunction u0;
  Forcing forcing;
  ViscosityLaw mu;
  // Bounds of mu over the range of rho0; 0 disables the checks that need them.
  double mu_min = 0.0;
  double mu_max = 0.0;
  std::optional<ExactSolution> exact;
};

/// Receives audit records and field snapshots as the run progresses.
class SimulationSink {
 public:
  virtual ~SimulationSink() = default;
  virtual void record(const DiagnosticsRecord& /*r*/) {}
  virtual void snapshot(const TimeState& /*s*/) {}
};

/// A step that could not be completed. `step` is the index of the step that
/// was being computed (1 for the first step).
struct StepFailure : std::runtime_error {
  StepFailure(const std::string& what, int step) : std::runtime_error(what), step(step) {}
  int step;
};

struct SimulationResult {
  TimeState final_state;
  std::vector<DiagnosticsRecord> records;  // step 0 first
  unsigned flags = 0;                      // union over all records
};

/// Initial state: cell-average density, dual-mean velocity, matching dual densities.
TimeState project_initial(const MacMesh& mesh, const FlowProblem& problem, const SolverConfig& cfg);

/// L2 errors of (u, p, rho) against the exact solution at s.t, written into r.
void fill_errors(const MacMesh& mesh, const TimeState& s, const ExactSolution& exact, int quadrature_order,
                 DiagnosticsRecord& r);

/// Steps from the projected initial data to cfg.t_end, auditing every step.
/// Snapshots go to the sink at step 0, every cfg.output_every steps and at
/// the end. Solver errors are rethrown as StepFailure.
SimulationResult run_simulation(const MacMesh& mesh, const FlowProblem& problem, const SolverConfig& cfg,
                                SimulationSink* sink = nullptr, const AuditTolerances& tol = {});

}  // namespace macflow
