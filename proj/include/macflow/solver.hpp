#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "macflow/assembly.hpp"
#include "macflow/fields.hpp"
#include "macflow/linear_solver.hpp"
#include "macflow/mesh.hpp"
#include "macflow/operators.hpp"

namespace macflow {

enum class ForcingSampling {
  kEndpoint,     // f(t^{n+1}, .)
  kSlabAverage,  // time average of f over (t^n, t^{n+1}]
};

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 0.1;
  double picard_tol = 1e-10;
  int picard_max = 50;
  double linear_tol = 1e-12;
  AdvectionScheme scheme = AdvectionScheme::kCentered;
  int quadrature_order = 5;
  int output_every = 0;  // snapshot cadence in steps, 0 = final state only
  ForcingSampling forcing = ForcingSampling::kEndpoint;
  int threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  int num_steps() const;
};

struct TimeState {
  int step = 0;
  double t = 0.0;
  CellScalarField rho;
  VelocityField u;
  CellScalarField p;   // zero mean
  FaceField rho_dual;  // rho_{D_sigma}

  /// rho, u and the matching dual densities; p = 0.
  static TimeState initial(const MacMesh& mesh, CellScalarField rho, VelocityField u, double t0 = 0.0);
};

/// Body force. `body` is projected onto the faces; `gravity` adds the
/// density-weighted term rho_{D_sigma} g with the current dual density.
struct Forcing {
  std::function<Vec3(double, const Vec3&)> body;
  Vec3 gravity{};

  bool has_body() const { return static_cast<bool>(body); }
};

/// Projected body force for the step (t0, t1] (gravity not included).
FaceField sample_body_force(const MacMesh& mesh, const Forcing& f, double t0, double t1, const SolverConfig& cfg);

/// body + rho_dual * gravity on interior faces.
FaceField total_force(const MacMesh& mesh, const Forcing& f, const FaceField& body, const FaceField& rho_dual);

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransportError : SolverError {
  TransportError(const std::string& what, double condition) : SolverError(what), condition(condition) {}
  double condition;
};

struct PicardError : SolverError {
  PicardError(const std::string& what, double residual, int iterations)
      : SolverError(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

struct MomentumData {
  const CellScalarField& rho_np1;
  const FaceField& rho_dual_n;
  const VelocityField& u_n;
  const MassFluxSet& fluxes;
  const ViscosityTensorField& mu;
  const FaceField& force;
  double dt;
};

struct MomentumSolution {
  VelocityField u;
  CellScalarField p;
  double linear_residual = 0.0;
};

/// Relative residual of the discrete momentum balance for (u, p), evaluated
/// with the matrix-free operators. Zero when every term vanishes.
double momentum_residual(const MacMesh& mesh, const MomentumData& data, const VelocityField& u,
                         const CellScalarField& p, AdvectionScheme scheme, Exec exec = {});

/// Relative residual of the implicit mass balance, max over cells of
/// |rho_K - rho_K^n + dt/|K| sum F| / max rho.
double mass_residual(const MacMesh& mesh, const CellScalarField& rho_n, const CellScalarField& rho,
                     const VelocityField& u, double dt);

struct StepReport {
  int picard_iterations = 0;
  double picard_residual = 0.0;
  double linear_residual = 0.0;
};

/// Holds factorizations between calls so that repeated solves on the same
/// mesh only redo the numeric phase.
class StepSolver {
 public:
  StepSolver(const MacMesh& mesh, SolverConfig cfg);

  const MacMesh& mesh() const { return *mesh_; }
  const SolverConfig& config() const { return cfg_; }

  /// Implicit upwind transport for frozen u.
  CellScalarField transport(const CellScalarField& rho_n, const VelocityField& u, double dt);

  /// One linear saddle-point solve for (u, p) with zero-mean pressure.
  MomentumSolution momentum(const MomentumData& data);

  /// Picard iteration for one time step.
  TimeState advance(const TimeState& state, const Forcing& forcing, const ViscosityLaw& law,
                    StepReport* report = nullptr);

  /// Bordered saddle-point matrix on (interior faces, cells, multiplier).
  SparseMatrix momentum_matrix(const MomentumData& data) const;
  const DofMap& dofs() const { return dofs_; }

 private:
  Triplets momentum_triplets(const MomentumData& data) const;

  const MacMesh* mesh_;
  SolverConfig cfg_;
  DofMap dofs_;
  SparseDirectSolver transport_lu_;
  SparseDirectSolver momentum_lu_;
};

CellScalarField transport_solve(const MacMesh& mesh, const CellScalarField& rho_n, const VelocityField& u,
                                double dt, double linear_tol = 1e-12);

MomentumSolution momentum_solve(const MacMesh& mesh, const MomentumData& data, const SolverConfig& cfg);

TimeState advance_timestep(const MacMesh& mesh, const TimeState& state, const SolverConfig& cfg,
                           const Forcing& forcing, const ViscosityLaw& law, StepReport* report = nullptr);

}  // namespace macflow
