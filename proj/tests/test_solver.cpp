#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "macflow/solver.hpp"
#include "support.hpp"

using namespace macflow;
using namespace testing_support;

namespace {

ViscosityLaw constant_mu(double mu) {
  return [mu](double) { return mu; };
}

double max_abs(const CellScalarField& q) {
  double m = 0.0;
  for (double v : q.values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const VelocityField& u) {
  double m = 0.0;
  for (int i = 0; i < u.dim; ++i) {
    for (double v : u.comp[i]) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

TEST_CASE("config validation names the field") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto fails = [](SolverConfig c, const char* key) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what()).find(key) != std::string::npos;
    }
    return false;
  };
  SolverConfig c = cfg;
  c.dt = 0.0;
  CHECK(fails(c, "dt"));
  c = cfg;
  c.picard_tol = 1.0;
  CHECK(fails(c, "picard_tol"));
  c = cfg;
  c.linear_tol = 0.0;
  CHECK(fails(c, "linear_tol"));
  c = cfg;
  c.picard_max = 0;
  CHECK(fails(c, "picard_max"));
  c = cfg;
  c.dt = 0.1;
  c.t_end = 0.3;
  CHECK(c.num_steps() == 3);
}

TEST_CASE("transport with zero velocity returns the old density") {
  const MacMesh m = nonuniform_3x3();
  std::mt19937_64 rng(1);
  const CellScalarField rho_n = random_cells(m, rng, 1.0, 3.0);
  const CellScalarField rho = transport_solve(m, rho_n, VelocityField::zeros(m), 0.1);
  CHECK(max_abs_diff(rho, rho_n) <= 1e-14);
}

TEST_CASE("constant density is a fixed point for divergence-free transport") {
  const MacMesh m = unit_square_mesh(6, 5, 2.0);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const VelocityField u = stream_velocity(m, rng, 0.3);
    const CellScalarField rho_n = CellScalarField::constant(m, 1.7);
    const CellScalarField rho = transport_solve(m, rho_n, u, 0.05);
    CHECK(max_abs_diff(rho, rho_n) <= 1e-13);
  }
}

TEST_CASE("4-cell rotating transport matches a hand-built dense solve") {
  const MacMesh m = unit_square_mesh(2, 2);
  // Counter-clockwise circulation 0 -> 1 -> 3 -> 2 -> 0 through the interior faces.
  VelocityField u = VelocityField::zeros(m);
  u.comp[0][m.face_id(0, {1, 0, 0})] = 1.0;
  u.comp[0][m.face_id(0, {1, 1, 0})] = -1.0;
  u.comp[1][m.face_id(1, {0, 1, 0})] = -1.0;
  u.comp[1][m.face_id(1, {1, 1, 0})] = 1.0;
  const double dt = 0.1;
  const CellScalarField rho_n{{1.0, 2.0, 3.0, 4.0}};

  // |K| = 0.25, |sigma| = 0.5: diagonal 0.25/dt + 0.5 outflow, inflow -0.5 from the upstream cell.
  Eigen::Matrix4d a;
  a << 3.0, 0.0, -0.5, 0.0,
      -0.5, 3.0, 0.0, 0.0,
      0.0, 0.0, 3.0, -0.5,
      0.0, -0.5, 0.0, 3.0;
  Eigen::Vector4d b;
  for (int k = 0; k < 4; ++k) b[k] = 2.5 * rho_n[k];
  const Eigen::Vector4d expect = a.lu().solve(b);

  const CellScalarField rho = transport_solve(m, rho_n, u, dt);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(rho[k] - expect[k]) <= 1e-12);
  CHECK(mass_residual(m, rho_n, rho, u, dt) <= 1e-14);
}

TEST_CASE("transport failure reports a condition estimate") {
  const MacMesh m = unit_square_mesh(3, 3);
  VelocityField u = VelocityField::zeros(m);
  u.comp[0][m.face_id(0, {1, 1, 0})] = std::numeric_limits<double>::quiet_NaN();
  const CellScalarField rho_n = CellScalarField::constant(m, 1.0);
  try {
    transport_solve(m, rho_n, u, 0.1);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(std::string(e.what()).find("condition estimate") != std::string::npos);
  }
}

TEST_CASE("momentum solve with no data gives zero") {
  const MacMesh m = unit_square_mesh(4, 4);
  const CellScalarField rho = CellScalarField::constant(m, 2.0);
  const FaceField rho_dual = dual_cell_density(m, rho);
  const VelocityField u_n = VelocityField::zeros(m);
  const MassFluxSet fs = mass_fluxes(m, rho, u_n);
  const ViscosityTensorField mu = viscosity_tensor(m, rho, constant_mu(0.1));
  const FaceField f = FaceField::zeros(m);
  SolverConfig cfg;
  const MomentumSolution sol = momentum_solve(m, {rho, rho_dual, u_n, fs, mu, f, 0.01}, cfg);
  CHECK(max_abs(sol.u) == 0.0);
  CHECK(max_abs(sol.p) == 0.0);
}

TEST_CASE("Stokes solve matches a dense oracle built from the matrix-free kernels") {
  const MacMesh m = mesh_from({0.0, 0.2, 0.45, 0.7, 1.0}, {0.0, 0.3, 0.5, 0.8, 1.0});
  std::mt19937_64 rng(7);
  const CellScalarField rho = random_cells(m, rng, 1.0, 2.0);
  const CellScalarField rho_old = random_cells(m, rng, 1.0, 2.0);
  const FaceField rho_dual_n = dual_cell_density(m, rho_old);
  const FaceField rho_dual = dual_cell_density(m, rho);
  const VelocityField u_n = random_velocity(m, rng);
  // Fluxes from zero velocity switch convection off.
  const MassFluxSet fs = mass_fluxes(m, rho, VelocityField::zeros(m));
  const ViscosityTensorField mu = viscosity_tensor(m, rho, [](double r) { return 0.5 + r; });
  VelocityField f = random_velocity(m, rng);
  const double dt = 0.05;

  SolverConfig cfg;
  cfg.dt = dt;
  const MomentumSolution sol = momentum_solve(m, {rho, rho_dual_n, u_n, fs, mu, f, dt}, cfg);

  // Columns of the bordered system from unit probes.
  const DofMap dofs = DofMap::interior_faces(m);
  const int nu = dofs.size, np = static_cast<int>(m.num_cells()), n = nu + np + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto put_velocity_rows = [&](const VelocityField& r, int col) {
    for (int i = 0; i < 2; ++i) {
      for (std::size_t s = 0; s < m.num_faces(i); ++s) {
        if (dofs.id[i][s] >= 0) a(dofs.id[i][s], col) += m.face(i, static_cast<int>(s)).dual_volume * r.comp[i][s];
      }
    }
  };
  for (int i = 0; i < 2; ++i) {
    for (std::size_t s = 0; s < m.num_faces(i); ++s) {
      const int col = dofs.id[i][s];
      if (col < 0) continue;
      VelocityField e = VelocityField::zeros(m);
      e.comp[i][s] = 1.0;
      VelocityField r = diffusion_apply(m, mu, e);
      for (int c = 0; c < 2; ++c) {
        for (std::size_t q = 0; q < r.comp[c].size(); ++q) r.comp[c][q] = -r.comp[c][q];
      }
      r.comp[i][s] += rho_dual.comp[i][s] / dt;
      put_velocity_rows(r, col);
      const CellScalarField d = divergence(m, e);
      for (int k = 0; k < np; ++k) a(nu + k, col) = -m.cell(k).volume * d[k];
      const double vol = m.face(i, static_cast<int>(s)).dual_volume;
      b[col] = vol * (rho_dual_n.comp[i][s] * u_n.comp[i][s] / dt + f.comp[i][s]);
    }
  }
  for (int k = 0; k < np; ++k) {
    CellScalarField e = CellScalarField::zeros(m);
    e[k] = 1.0;
    put_velocity_rows(pressure_gradient(m, e), nu + k);
    a(nu + k, n - 1) = m.cell(k).volume;
    a(n - 1, nu + k) = m.cell(k).volume;
  }
  const Eigen::VectorXd x = a.fullPivLu().solve(b);

  double err = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::size_t s = 0; s < m.num_faces(i); ++s) {
      const double expect = dofs.id[i][s] >= 0 ? x[dofs.id[i][s]] : 0.0;
      err = std::max(err, std::abs(sol.u.comp[i][s] - expect));
    }
  }
  for (int k = 0; k < np; ++k) err = std::max(err, std::abs(sol.p[k] - x[nu + k]));
  CHECK(err <= 1e-10);
  CHECK(max_abs(divergence(m, sol.u)) <= 1e-10);
  CHECK(std::abs(mean(m, sol.p)) <= 1e-13);
  CHECK(max_abs(sol.p) > 1e-3);
}

TEST_CASE("momentum pattern is analysed once across Picard iterations") {
  const MacMesh m = unit_square_mesh(6, 6);
  std::mt19937_64 rng(3);
  SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.scheme = AdvectionScheme::kUpwind;
  StepSolver solver(m, cfg);
  TimeState s = TimeState::initial(m, random_cells(m, rng, 1.0, 2.0), stream_velocity(m, rng, 0.2));
  StepReport rep;
  for (int n = 0; n < 3; ++n) s = solver.advance(s, {}, constant_mu(0.05), &rep);
  CHECK(rep.picard_iterations > 1);
  CHECK(s.step == 3);
}

TEST_CASE("quiescent state is stationary") {
  const MacMesh m = unit_square_mesh(5, 4, 1.5);
  std::mt19937_64 rng(4);
  const TimeState s0 = TimeState::initial(m, random_cells(m, rng, 1.0, 4.0), VelocityField::zeros(m));
  SolverConfig cfg;
  cfg.dt = 0.01;
  StepReport rep;
  const TimeState s1 = advance_timestep(m, s0, cfg, {}, constant_mu(1.0), &rep);
  CHECK(max_abs_diff(s1.rho, s0.rho) == 0.0);
  CHECK(max_abs(s1.u) == 0.0);
  CHECK(max_abs(s1.p) == 0.0);
  CHECK(s1.t == doctest::Approx(0.01));
  CHECK(rep.picard_iterations == 1);
}

TEST_CASE("Picard step: maximum principle, mass, divergence and residual") {
  const MacMesh m = unit_square_mesh(8, 8, 2.0);
  std::mt19937_64 rng(5);
  for (auto scheme : {AdvectionScheme::kCentered, AdvectionScheme::kUpwind}) {
    SolverConfig cfg;
    cfg.dt = 0.02;
    cfg.scheme = scheme;
    const CellScalarField rho0 = random_cells(m, rng, 1.0, 3.0);
    const TimeState s0 = TimeState::initial(m, rho0, stream_velocity(m, rng, 0.1));
    Forcing forcing;
    forcing.body = [](double t, const Vec3& x) { return Vec3{std::sin(3.0 * x[1]) * (1 + t), x[0] * x[0], 0.0}; };
    forcing.gravity = {0.0, -1.0, 0.0};
    const ViscosityLaw law = [](double r) { return 0.01 + 0.02 * r; };
    StepReport rep;
    const TimeState s1 = advance_timestep(m, s0, cfg, forcing, law, &rep);

    const auto [lo0, hi0] = std::minmax_element(rho0.values.begin(), rho0.values.end());
    const auto [lo1, hi1] = std::minmax_element(s1.rho.values.begin(), s1.rho.values.end());
    CHECK(*lo1 >= *lo0 - 1e-12);
    CHECK(*hi1 <= *hi0 + 1e-12);
    CHECK(std::abs(mean(m, s1.rho) - mean(m, rho0)) <= 1e-13 * mean(m, rho0));
    CHECK(max_abs(divergence(m, s1.u)) <= 1e-10);
    CHECK(std::abs(mean(m, s1.p)) <= 1e-13);
    CHECK(s1.u.satisfies_dirichlet(m));
    CHECK(rep.picard_residual <= cfg.picard_tol);
    CHECK(mass_residual(m, s0.rho, s1.rho, s1.u, cfg.dt) <= 1e-13);

    // Residual recomputed from the returned fields.
    const MassFluxSet fs = mass_fluxes(m, s1.rho, s1.u);
    const ViscosityTensorField mu = viscosity_tensor(m, s1.rho, law);
    const FaceField f = total_force(m, forcing, sample_body_force(m, forcing, s0.t, s1.t, cfg), s1.rho_dual);
    const double r = momentum_residual(m, {s1.rho, s0.rho_dual, s0.u, fs, mu, f, cfg.dt}, s1.u, s1.p, scheme);
    CHECK(r <= cfg.picard_tol);
  }
}

TEST_CASE("Picard cap raises with the last residual") {
  const MacMesh m = unit_square_mesh(6, 6);
  std::mt19937_64 rng(6);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.picard_max = 1;
  const TimeState s0 = TimeState::initial(m, random_cells(m, rng, 1.0, 5.0), stream_velocity(m, rng, 1.0));
  try {
    advance_timestep(m, s0, cfg, {}, constant_mu(0.01));
    FAIL("expected PicardError");
  } catch (const PicardError& e) {
    CHECK(e.residual > cfg.picard_tol);
    CHECK(e.iterations == 1);
  }
}

TEST_CASE("slab-averaged forcing integrates linear-in-time data exactly") {
  const MacMesh m = unit_square_mesh(3, 3);
  Forcing f;
  f.body = [](double t, const Vec3& x) { return Vec3{t * x[1], 2.0 * t, 0.0}; };
  SolverConfig cfg;
  cfg.forcing = ForcingSampling::kSlabAverage;
  const FaceField avg = sample_body_force(m, f, 0.2, 0.6, cfg);
  cfg.forcing = ForcingSampling::kEndpoint;
  const FaceField mid = sample_body_force(m, f, 0.0, 0.4, cfg);
  CHECK(max_abs_diff(avg, mid) <= 1e-14);
  CHECK(max_abs(mid) > 0.0);
}
