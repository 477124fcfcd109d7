#include "macflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "macflow/quadrature.hpp"

namespace macflow {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool in_unit_interval(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

void SolverConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be non-negative");
  require(in_unit_interval(picard_tol), "picard_tol must lie in (0, 1)");
  require(in_unit_interval(linear_tol), "linear_tol must lie in (0, 1)");
  require(picard_max >= 1, "picard_max must be at least 1");
  require(quadrature_order >= 1 && quadrature_order <= 64, "quadrature_order must lie in [1, 64]");
  require(output_every >= 0, "output_every must be non-negative");
  require(threads >= 1, "threads must be at least 1");
}

int SolverConfig::num_steps() const {
  // Tolerate t_end / dt landing a hair above an integer.
  return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

TimeState TimeState::initial(const MacMesh& mesh, CellScalarField rho, VelocityField u, double t0) {
  TimeState s;
  s.t = t0;
  s.rho_dual = dual_cell_density(mesh, rho);
  s.rho = std::move(rho);
  s.u = std::move(u);
  s.u.apply_dirichlet(mesh);
  s.p = CellScalarField::zeros(mesh);
  return s;
}

FaceField sample_body_force(const MacMesh& mesh, const Forcing& f, double t0, double t1, const SolverConfig& cfg) {
  if (!f.has_body()) return FaceField::zeros(mesh);
  auto at = [&](double t) {
    return project_face(
        mesh, [&](const Vec3& x) { return f.body(t, x); }, FaceProjection::kDualMean, cfg.quadrature_order);
  };
  if (cfg.forcing == ForcingSampling::kEndpoint) return at(t1);
  const GaussRule rule = gauss_legendre(cfg.quadrature_order);
  FaceField out = FaceField::zeros(mesh);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = t0 + 0.5 * (t1 - t0) * (rule.nodes[q] + 1.0);
    const FaceField sample = at(t);
    for (int i = 0; i < mesh.dim(); ++i) {
      for (std::size_t s = 0; s < sample.comp[i].size(); ++s) out.comp[i][s] += 0.5 * rule.weights[q] * sample.comp[i][s];
    }
  }
  return out;
}

FaceField total_force(const MacMesh& mesh, const Forcing& f, const FaceField& body, const FaceField& rho_dual) {
  FaceField out = body;
  for (int i = 0; i < mesh.dim(); ++i) {
    if (f.gravity[i] == 0.0) continue;
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (faces[s].interior) out.comp[i][s] += rho_dual.comp[i][s] * f.gravity[i];
    }
  }
  return out;
}

double momentum_residual(const MacMesh& mesh, const MomentumData& d, const VelocityField& u, const CellScalarField& p,
                         AdvectionScheme scheme, Exec exec) {
  const FaceField rho_dual = dual_cell_density(mesh, d.rho_np1, exec);
  const VelocityField conv = convection_apply(mesh, d.fluxes, u, scheme, exec);
  const VelocityField diff = diffusion_apply(mesh, d.mu, u, exec);
  const VelocityField grad = pressure_gradient(mesh, p, exec);
  double r2 = 0.0;
  std::array<double, 6> n2{};
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (!faces[s].interior) continue;
      const double vol = faces[s].dual_volume;
      const std::array<double, 6> term{vol * rho_dual.comp[i][s] * u.comp[i][s] / d.dt,
                                       -vol * d.rho_dual_n.comp[i][s] * d.u_n.comp[i][s] / d.dt,
                                       vol * conv.comp[i][s],
                                       -vol * diff.comp[i][s],
                                       vol * grad.comp[i][s],
                                       -vol * d.force.comp[i][s]};
      double r = 0.0;
      for (std::size_t k = 0; k < term.size(); ++k) {
        r += term[k];
        n2[k] += term[k] * term[k];
      }
      r2 += r * r;
    }
  }
  double scale = 0.0;
  for (double v : n2) scale += std::sqrt(v);
  return scale > 0.0 ? std::sqrt(r2) / scale : 0.0;
}

double mass_residual(const MacMesh& mesh, const CellScalarField& rho_n, const CellScalarField& rho,
                     const VelocityField& u, double dt) {
  const MassFluxSet fs = primal_fluxes(mesh, rho, u);
  double worst = 0.0;
  double rmax = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    double net = 0.0;
    for (int i = 0; i < mesh.dim(); ++i) {
      for (int side = 0; side < 2; ++side) net += fs.outward(mesh, static_cast<int>(k), i, c.faces[i][side]);
    }
    worst = std::max(worst, std::abs(rho[k] - rho_n[k] + dt * net / c.volume));
    rmax = std::max({rmax, std::abs(rho[k]), std::abs(rho_n[k])});
  }
  return rmax > 0.0 ? worst / rmax : worst;
}

StepSolver::StepSolver(const MacMesh& mesh, SolverConfig cfg)
    : mesh_(&mesh), cfg_(cfg), dofs_(DofMap::interior_faces(mesh)) {
  cfg_.validate();
}

CellScalarField StepSolver::transport(const CellScalarField& rho_n, const VelocityField& u, double dt) {
  const MacMesh& m = *mesh_;
  const SparseMatrix a = transport_matrix(m, u, dt);
  // Solve for the increment so that a state without fluxes is reproduced bit for bit.
  const Eigen::VectorXd r0 = to_vector(rho_n);
  Eigen::VectorXd b = -(a * r0);
  for (std::size_t k = 0; k < m.num_cells(); ++k) b[k] += m.cell(static_cast<int>(k)).volume / dt * rho_n[k];
  try {
    transport_lu_.factorize(a);
    return to_cells(r0 + transport_lu_.solve(b, cfg_.linear_tol));
  } catch (const LinearSolverError& e) {
    const double cond = transport_lu_.condition_estimate();
    std::ostringstream os;
    os << "transport solve failed: " << e.what() << " (condition estimate " << cond << ")";
    throw TransportError(os.str(), cond);
  }
}

Triplets StepSolver::momentum_triplets(const MomentumData& d) const {
  const MacMesh& m = *mesh_;
  const int nu = dofs_.size;
  FaceField time_coeff = dual_cell_density(m, d.rho_np1, Exec{cfg_.threads});
  for (int i = 0; i < m.dim(); ++i) {
    for (double& v : time_coeff.comp[i]) v /= d.dt;
  }
  Triplets t;
  append_face_diagonal(m, time_coeff, dofs_, true, 1.0, t);
  append_convection(m, d.fluxes, cfg_.scheme, dofs_, true, 1.0, t);
  append_diffusion(m, d.mu, dofs_, true, -1.0, t);
  append_gradient(m, dofs_, nu, true, 1.0, t);
  append_divergence(m, dofs_, nu, true, -1.0, t);
  return t;
}

SparseMatrix StepSolver::momentum_matrix(const MomentumData& d) const {
  const MacMesh& m = *mesh_;
  const int nu = dofs_.size;
  const int np = static_cast<int>(m.num_cells());
  Triplets t = momentum_triplets(d);
  for (int k = 0; k < np; ++k) {
    const double vol = m.cell(k).volume;
    t.emplace_back(nu + k, nu + np, vol);
    t.emplace_back(nu + np, nu + k, vol);
  }
  SparseMatrix a(nu + np + 1, nu + np + 1);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

MomentumSolution StepSolver::momentum(const MomentumData& d) {
  const MacMesh& m = *mesh_;
  const int nu = dofs_.size;
  const int np = static_cast<int>(m.num_cells());
  const int n = nu + np;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (int i = 0; i < m.dim(); ++i) {
    const auto faces = m.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const int row = dofs_.id[i][s];
      if (row < 0) continue;
      b[row] = faces[s].dual_volume * (d.rho_dual_n.comp[i][s] * d.u_n.comp[i][s] / d.dt + d.force.comp[i][s]);
    }
  }

  // The multiplier of the bordered system vanishes at the solution (the
  // divergence rows sum to zero for any velocity in H_E,0), so the border is
  // eliminated: fix the pressure gauge through the first divergence row,
  // solve, then shift p to zero mean. The dense border would otherwise wreck
  // the fill-reducing ordering.
  Triplets t = momentum_triplets(d);
  t.emplace_back(nu, nu, m.cell(0).volume);
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  k.makeCompressed();
  Eigen::VectorXd x;
  try {
    momentum_lu_.factorize(k);
    x = momentum_lu_.solve(b.head(n), cfg_.linear_tol);
  } catch (const LinearSolverError& e) {
    throw SolverError(std::string("momentum system: ") + e.what() +
                      " (a singular constraint block points at a degenerate pressure/velocity pairing)");
  }
  MomentumSolution out;
  out.u = dofs_.scatter(m, x.head(nu));
  out.p = to_cells(x.segment(nu, np));
  const double pm = mean(m, out.p);
  for (double& v : out.p.values) v -= pm;

  // Residual of the bordered system itself.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);
  z.head(nu) = x.head(nu);
  z.segment(nu, np) = to_vector(out.p);
  const double bn = b.norm();
  const double r = (momentum_matrix(d) * z - b).norm();
  out.linear_residual = bn > 0.0 ? r / bn : r;
  if (!(out.linear_residual <= cfg_.linear_tol)) {
    std::ostringstream os;
    os << "momentum system: residual " << out.linear_residual << " exceeds linear_tol " << cfg_.linear_tol;
    throw SolverError(os.str());
  }
  return out;
}

TimeState StepSolver::advance(const TimeState& state, const Forcing& forcing, const ViscosityLaw& law,
                              StepReport* report) {
  const MacMesh& m = *mesh_;
  const Exec exec{cfg_.threads};
  const double dt = cfg_.dt;
  const FaceField body = sample_body_force(m, forcing, state.t, state.t + dt, cfg_);

  StepReport rep;
  VelocityField u_it = state.u;
  CellScalarField p_it = state.p;
  double last = 0.0;
  for (int k = 0;; ++k) {
    CellScalarField rho = transport(state.rho, u_it, dt);
    const FaceField rho_dual = dual_cell_density(m, rho, exec);
    const MassFluxSet fs = mass_fluxes(m, rho, u_it, exec);
    const ViscosityTensorField mu = viscosity_tensor(m, rho, law, exec);
    const FaceField f = total_force(m, forcing, body, rho_dual);
    const MomentumData data{rho, state.rho_dual, state.u, fs, mu, f, dt};
    if (k > 0) {
      last = momentum_residual(m, data, u_it, p_it, cfg_.scheme, exec);
      if (last <= cfg_.picard_tol) {
        rep.picard_residual = last;
        if (report) *report = rep;
        TimeState next;
        next.step = state.step + 1;
        next.t = state.t + dt;
        next.rho = std::move(rho);
        next.u = std::move(u_it);
        next.p = std::move(p_it);
        next.rho_dual = rho_dual;
        return next;
      }
    }
    if (rep.picard_iterations >= cfg_.picard_max) {
      std::ostringstream os;
      os << "Picard iteration did not converge in " << cfg_.picard_max << " iterations (last residual " << last
         << ", tolerance " << cfg_.picard_tol << ")";
      throw PicardError(os.str(), last, rep.picard_iterations);
    }
    MomentumSolution sol = momentum(data);
    rep.linear_residual = std::max(rep.linear_residual, sol.linear_residual);
    ++rep.picard_iterations;
    u_it = std::move(sol.u);
    p_it = std::move(sol.p);
  }
}

CellScalarField transport_solve(const MacMesh& mesh, const CellScalarField& rho_n, const VelocityField& u,
                                double dt, double linear_tol) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.linear_tol = linear_tol;
  StepSolver s(mesh, cfg);
  return s.transport(rho_n, u, dt);
}

MomentumSolution momentum_solve(const MacMesh& mesh, const MomentumData& data, const SolverConfig& cfg) {
  StepSolver s(mesh, cfg);
  return s.momentum(data);
}

TimeState advance_timestep(const MacMesh& mesh, const TimeState& state, const SolverConfig& cfg,
                           const Forcing& forcing, const ViscosityLaw& law, StepReport* report) {
  StepSolver s(mesh, cfg);
  return s.advance(state, forcing, law, report);
}

}  // namespace macflow
