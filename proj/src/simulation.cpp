#include "macflow/simulation.hpp"

#include <sstream>

namespace macflow {

TimeState project_initial(const MacMesh& mesh, const FlowProblem& problem, const SolverConfig& cfg) {
  CellScalarField rho = project_cell(mesh, problem.rho0, cfg.quadrature_order);
  VelocityField u = problem.u0 ? project_face(mesh, problem.u0, FaceProjection::kDualMean, cfg.quadrature_order)
                               : VelocityField::zeros(mesh);
  return TimeState::initial(mesh, std::move(rho), std::move(u));
}

void fill_errors(const MacMesh& mesh, const TimeState& s, const ExactSolution& exact, int order,
                 DiagnosticsRecord& r) {
  if (exact.u) {
    VelocityField e = project_face(
        mesh, [&](const Vec3& x) { return exact.u(s.t, x); }, FaceProjection::kDualMean, order);
    for (int i = 0; i < mesh.dim(); ++i) {
      for (std::size_t f = 0; f < e.comp[i].size(); ++f) e.comp[i][f] -= s.u.comp[i][f];
    }
    r.u_error = norm_l2(mesh, e);
  }
  if (exact.p) {
    CellScalarField e = project_cell(mesh, [&](const Vec3& x) { return exact.p(s.t, x); }, order);
    const double shift = mean(mesh, e);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] -= shift + s.p[k];
    r.p_error = norm_l2(mesh, e);
  }
  if (exact.rho) {
    CellScalarField e = project_cell(mesh, [&](const Vec3& x) { return exact.rho(s.t, x); }, order);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] -= s.rho[k];
    r.rho_error = norm_l2(mesh, e);
  }
}

SimulationResult run_simulation(const MacMesh& mesh, const FlowProblem& problem, const SolverConfig& cfg,
                                SimulationSink* sink, const AuditTolerances& tol) {
  cfg.validate();
  SimulationResult out;
  TimeState state = project_initial(mesh, problem, cfg);
  const AuditBaseline base = make_baseline(mesh, state, problem.mu_min, problem.mu_max);
  DiagnosticsRecord rec = initial_record(mesh, state, base);
  if (problem.exact) fill_errors(mesh, state, *problem.exact, cfg.quadrature_order, rec);
  out.flags |= rec.flags;
  out.records.push_back(rec);
  if (sink) {
    sink->record(rec);
    sink->snapshot(state);
  }

  StepSolver solver(mesh, cfg);
  const int steps = cfg.num_steps();
  for (int n = 1; n <= steps; ++n) {
    StepReport rep;
    TimeState next;
    try {
      next = solver.advance(state, problem.forcing, problem.mu, &rep);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "step " << n << " (t = " << state.t + cfg.dt << "): " << e.what();
      throw StepFailure(os.str(), n);
    }
    // Pin the clock to n * dt so long runs do not accumulate drift.
    next.t = n * cfg.dt;
    rec = step_audit(mesh, state, next, cfg, problem.mu, problem.forcing, base, rec, rep, tol);
    const bool snap = n == steps || (cfg.output_every > 0 && n % cfg.output_every == 0);
    if (problem.exact && snap) fill_errors(mesh, next, *problem.exact, cfg.quadrature_order, rec);
    out.flags |= rec.flags;
    out.records.push_back(rec);
    if (sink) {
      sink->record(rec);
      if (snap) sink->snapshot(next);
    }
    state = std::move(next);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace macflow
