#include "macflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace macflow {

namespace {

double kinetic_energy(const MacMesh& mesh, const FaceField& rho_dual, const VelocityField& u) {
  double e = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      e += 0.5 * faces[s].dual_volume * rho_dual.comp[i][s] * u.comp[i][s] * u.comp[i][s];
    }
  }
  return e;
}

DualTensorField weighted(const DualTensorField& a, const DualTensorField& w, int dim) {
  DualTensorField out = a;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (std::size_t t = 0; t < out(i, j).size(); ++t) out(i, j)[t] *= w(i, j)[t];
    }
  }
  return out;
}

double net_outflow(const MacMesh& mesh, const MassFluxSet& fs, int k) {
  const CellInfo& c = mesh.cell(k);
  double net = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int side = 0; side < 2; ++side) net += fs.outward(mesh, k, i, c.faces[i][side]);
  }
  return net;
}

// max over interior faces of dt |R_sigma| / (|D_sigma| rho_max) for the dual balance
// |D|(rho_D - rho_D^old)/dt + sum F_{sigma,dual} = 0.
double dual_balance(const MacMesh& mesh, const FaceField& rd_old, const FaceField& rd, const MassFluxSet& fs,
                    double dt, double rho_max) {
  double worst = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    for (std::size_t s = 0; s < mesh.num_faces(i); ++s) {
      const FaceInfo& f = mesh.face(i, static_cast<int>(s));
      if (!f.interior) continue;
      double div = 0.0;
      for (const DualRef& r : mesh.dual_faces_of(i, static_cast<int>(s))) div += r.sign * fs.dual(i, r.j)[r.id];
      const double res = f.dual_volume * (rd.comp[i][s] - rd_old.comp[i][s]) + dt * div;
      worst = std::max(worst, std::abs(res) / f.dual_volume);
    }
  }
  return rho_max > 0.0 ? worst / rho_max : worst;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

CellScalarField uniform_cells(const MacMesh& mesh, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  CellScalarField q = CellScalarField::zeros(mesh);
  for (auto& v : q.values) v = d(rng);
  return q;
}

VelocityField uniform_velocity(const MacMesh& mesh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VelocityField u = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (auto& v : u.comp[i]) v = d(rng);
  }
  u.apply_dirichlet(mesh);
  return u;
}

std::string mesh_label(const MacMesh& mesh) {
  std::ostringstream os;
  for (int a = 0; a < mesh.dim(); ++a) os << (a ? "x" : "") << mesh.cells_along(a);
  const MeshMetrics mm = mesh_metrics(mesh);
  os << " eta=" << std::setprecision(4) << mm.eta;
  return os.str();
}

}  // namespace

std::string describe_flags(unsigned flags) {
  static const std::pair<unsigned, const char*> names[] = {
      {kFlagMaxPrinciple, "max_principle"}, {kFlagMass, "mass"},         {kFlagDualMass, "dual_mass"},
      {kFlagDensityIdentity, "density_identity"}, {kFlagDivergence, "divergence"}, {kFlagEnergy, "energy"},
      {kFlagNonFinite, "non_finite"}, {kFlagViscosity, "viscosity"}, {kFlagEstimate, "estimate"},
  };
  std::string out;
  for (const auto& [bit, name] : names) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += ",";
    out += name;
  }
  return out;
}

bool DiagnosticsRecord::all_finite() const {
  const double v[] = {t,
                      kinetic_energy,
                      dissipation,
                      forcing_work,
                      total_mass,
                      mass_drift,
                      rho_l2,
                      rho_min,
                      rho_max,
                      bv_increment,
                      bv_total,
                      h1_sum,
                      u_l2_sq_max,
                      force_sum,
                      estimate_lhs,
                      estimate_bound,
                      div_max,
                      picard_residual,
                      linear_residual,
                      mass_residual,
                      dual_mass_residual,
                      density_identity_residual,
                      energy_defect,
                      energy_identity_residual,
                      pressure_l2,
                      pressure_mean};
  return std::all_of(std::begin(v), std::end(v), [](double x) { return std::isfinite(x); });
}

AuditBaseline make_baseline(const MacMesh& mesh, const TimeState& initial, double mu_min, double mu_max) {
  AuditBaseline b;
  b.mu_min = mu_min;
  b.mu_max = mu_max;
  const double l2 = norm_l2(mesh, initial.u);
  b.u0_l2_sq = l2 * l2;
  const auto [lo, hi] = std::minmax_element(initial.rho.values.begin(), initial.rho.values.end());
  b.rho_min = *lo;
  b.rho_max = *hi;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) b.mass += mesh.cell(static_cast<int>(k)).volume * initial.rho[k];
  return b;
}

namespace {

void fill_state_entries(const MacMesh& mesh, const TimeState& s, const AuditBaseline& base, DiagnosticsRecord& r) {
  r.step = s.step;
  r.t = s.t;
  r.kinetic_energy = kinetic_energy(mesh, dual_cell_density(mesh, s.rho), s.u);
  r.total_mass = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) r.total_mass += mesh.cell(static_cast<int>(k)).volume * s.rho[k];
  r.mass_drift = base.mass != 0.0 ? std::abs(r.total_mass - base.mass) / std::abs(base.mass) : 0.0;
  r.rho_l2 = norm_l2(mesh, s.rho);
  const auto [lo, hi] = std::minmax_element(s.rho.values.begin(), s.rho.values.end());
  r.rho_min = *lo;
  r.rho_max = *hi;
  r.div_max = max_abs(divergence(mesh, s.u).values);
  r.pressure_l2 = norm_l2(mesh, s.p);
  r.pressure_mean = mean(mesh, s.p);
}

}  // namespace

DiagnosticsRecord initial_record(const MacMesh& mesh, const TimeState& s, const AuditBaseline& base) {
  DiagnosticsRecord r;
  fill_state_entries(mesh, s, base, r);
  const double l2 = norm_l2(mesh, s.u);
  r.u_l2_sq_max = l2 * l2;
  if (base.mu_min > 0.0) {
    r.estimate_lhs = base.rho_min * l2 * l2;
    r.estimate_bound = base.rho_max * base.u0_l2_sq;
  }
  if (!r.all_finite()) r.flags |= kFlagNonFinite;
  return r;
}

DiagnosticsRecord step_audit(const MacMesh& mesh, const TimeState& prev, const TimeState& next,
                             const SolverConfig& cfg, const ViscosityLaw& law, const Forcing& forcing,
                             const AuditBaseline& base, const DiagnosticsRecord& last, const StepReport& report,
                             const AuditTolerances& tol) {
  DiagnosticsRecord r;
  fill_state_entries(mesh, next, base, r);
  const double dt = next.t - prev.t;
  r.picard_iterations = report.picard_iterations;
  r.picard_residual = report.picard_residual;
  r.linear_residual = report.linear_residual;

  const FaceField rd_old = dual_cell_density(mesh, prev.rho);
  const FaceField rd = dual_cell_density(mesh, next.rho);
  const MassFluxSet fs = mass_fluxes(mesh, next.rho, next.u);
  const double rho_scale = std::max({std::abs(base.rho_max), std::abs(r.rho_max), std::abs(base.rho_min)});

  // Primal and dual mass balances.
  double worst = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double res = next.rho[k] - prev.rho[k] + dt * net_outflow(mesh, fs, static_cast<int>(k)) /
                                                       mesh.cell(static_cast<int>(k)).volume;
    worst = std::max(worst, std::abs(res));
  }
  r.mass_residual = rho_scale > 0.0 ? worst / rho_scale : worst;
  r.dual_mass_residual = dual_balance(mesh, rd_old, rd, fs, dt, rho_scale);

  // Density L2 identity and BV increment.
  double bv = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (!faces[s].interior) continue;
      const double jump = next.rho[faces[s].hi_cell] - next.rho[faces[s].lo_cell];
      bv += dt * faces[s].area * jump * jump * std::abs(next.u.comp[i][s]);
    }
  }
  r.bv_increment = bv;
  r.bv_total = last.bv_total + bv;
  double l2_new = 0.0, l2_old = 0.0, l2_jump = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const double vol = mesh.cell(static_cast<int>(k)).volume;
    l2_new += 0.5 * vol * next.rho[k] * next.rho[k];
    l2_old += 0.5 * vol * prev.rho[k] * prev.rho[k];
    l2_jump += 0.5 * vol * (next.rho[k] - prev.rho[k]) * (next.rho[k] - prev.rho[k]);
  }
  const double lhs = l2_new + 0.5 * bv + l2_jump;
  r.density_identity_residual = l2_old > 0.0 ? std::abs(lhs - l2_old) / l2_old : std::abs(lhs);

  // Velocity estimates.
  const double h1 = norm_h1(mesh, next.u);
  r.h1_sum = last.h1_sum + dt * h1 * h1;
  const double ul2 = norm_l2(mesh, next.u);
  r.u_l2_sq_max = std::max(last.u_l2_sq_max, ul2 * ul2);

  // Kinetic energy balance.
  const ViscosityTensorField mu = viscosity_tensor(mesh, next.rho, law);
  const DualTensorField strain = strain_tensor(mesh, next.u);
  r.dissipation = dt * integrate(mesh, weighted(strain, mu.dual, mesh.dim()), strain);
  const FaceField body = sample_body_force(mesh, forcing, prev.t, next.t, cfg);
  const FaceField f = total_force(mesh, forcing, body, rd);
  r.forcing_work = dt * integrate(mesh, f, next.u);
  r.force_sum = last.force_sum + dt * integrate(mesh, f, f);
  if (base.mu_min > 0.0) {
    const double c = 4.0 * mesh.diameter() * mesh.diameter() / base.mu_min;
    r.estimate_lhs = 0.25 * base.mu_min * r.h1_sum + base.rho_min * ul2 * ul2;
    r.estimate_bound = base.rho_max * base.u0_l2_sq + c * r.force_sum;
  }
  const double e_old = kinetic_energy(mesh, rd_old, prev.u);
  const double e_new = r.kinetic_energy;
  double jump = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const double du = next.u.comp[i][s] - prev.u.comp[i][s];
      jump += 0.5 * faces[s].dual_volume * rd_old.comp[i][s] * du * du;
    }
  }
  const double pressure_work = dt * integrate(mesh, pressure_gradient(mesh, next.p), next.u);
  const double scale = std::max(e_old, e_new) + r.dissipation + std::abs(r.forcing_work);
  const double defect = e_new + r.dissipation - r.forcing_work - e_old;
  r.energy_defect = scale > 0.0 ? std::max(0.0, defect) / scale : 0.0;
  if (cfg.scheme == AdvectionScheme::kCentered) {
    const double gap = e_new - e_old + jump + r.dissipation - r.forcing_work + pressure_work;
    r.energy_identity_residual = scale > 0.0 ? std::abs(gap) / (scale + jump + std::abs(pressure_work)) : 0.0;
  }

  if (r.rho_min < base.rho_min - tol.max_principle || r.rho_max > base.rho_max + tol.max_principle) {
    r.flags |= kFlagMaxPrinciple;
  }
  if (base.mu_min > 0.0) {
    const double lo = base.mu_min * (1.0 - tol.max_principle), hi = base.mu_max * (1.0 + tol.max_principle);
    bool inside = true;
    for (int i = 0; i < mesh.dim(); ++i) {
      for (int j = 0; j < mesh.dim(); ++j) {
        for (double x : mu.dual(i, j)) inside = inside && x >= lo && x <= hi;
      }
    }
    if (!inside) r.flags |= kFlagViscosity;
    if (r.estimate_lhs > r.estimate_bound * (1.0 + 1e-12)) r.flags |= kFlagEstimate;
  }
  if (r.mass_drift > tol.mass) r.flags |= kFlagMass;
  if (r.dual_mass_residual > tol.dual_mass) r.flags |= kFlagDualMass;
  if (r.density_identity_residual > tol.density_identity_factor * cfg.linear_tol) r.flags |= kFlagDensityIdentity;
  if (r.div_max > tol.divergence) r.flags |= kFlagDivergence;
  if (r.energy_defect > tol.energy_factor * cfg.picard_tol) r.flags |= kFlagEnergy;
  if (!r.all_finite()) r.flags |= kFlagNonFinite;
  return r;
}

void write_diagnostics_header(std::ostream& os) {
  os << "step,t,kinetic_energy,dissipation,forcing_work,total_mass,mass_drift,rho_l2,rho_min,rho_max,"
        "bv_increment,bv_total,h1_sum,u_l2_sq_max,force_sum,estimate_lhs,estimate_bound,div_max,picard_iterations,picard_residual,linear_residual,"
        "mass_residual,dual_mass_residual,density_identity_residual,energy_defect,energy_identity_residual,"
        "pressure_l2,pressure_mean,u_error,p_error,rho_error,flags\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  auto opt = [&](double v) {
    if (std::isnan(v)) {
      os << ",";
    } else {
      os << "," << v;
    }
  };
  os << r.step << "," << r.t << "," << r.kinetic_energy << "," << r.dissipation << "," << r.forcing_work << ","
     << r.total_mass << "," << r.mass_drift << "," << r.rho_l2 << "," << r.rho_min << "," << r.rho_max << ","
     << r.bv_increment << "," << r.bv_total << "," << r.h1_sum << "," << r.u_l2_sq_max << "," << r.force_sum << ","
     << r.estimate_lhs << "," << r.estimate_bound << "," << r.div_max << ","
     << r.picard_iterations << "," << r.picard_residual << "," << r.linear_residual << "," << r.mass_residual
     << "," << r.dual_mass_residual << "," << r.density_identity_residual << "," << r.energy_defect << ","
     << r.energy_identity_residual << "," << r.pressure_l2 << "," << r.pressure_mean;
  opt(r.u_error);
  opt(r.p_error);
  opt(r.rho_error);
  os << "," << describe_flags(r.flags) << "\n";
  os.flags(old_flags);
  os.precision(old_prec);
}

// Suites ------------------------------------------------------------------------

OperatorSet library_operators() {
  OperatorSet ops;
  ops.divergence = [](const MacMesh& m, const VelocityField& u) { return divergence(m, u); };
  ops.gradient = [](const MacMesh& m, const CellScalarField& p) { return pressure_gradient(m, p); };
  ops.diffusion = [](const MacMesh& m, const ViscosityTensorField& mu, const VelocityField& u) {
    return diffusion_apply(m, mu, u);
  };
  ops.convection = [](const MacMesh& m, const MassFluxSet& fs, const VelocityField& v, AdvectionScheme s) {
    return convection_apply(m, fs, v, s);
  };
  return ops;
}

bool CheckReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed(); });
}

std::string CheckReport::failures() const {
  std::string out;
  for (const CheckResult& r : results) {
    if (r.passed()) continue;
    if (!out.empty()) out += ", ";
    out += r.name;
  }
  return out;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  const double g = std::abs(a - b) / scale;
  return std::isnan(g) ? std::numeric_limits<double>::infinity() : g;
}

CheckReport check_dualities(const MacMesh& mesh, int trials, std::uint64_t seed, const OperatorSet& ops,
                            double tol) {
  CheckReport rep;
  rep.suite = "dualities";
  rep.mesh = mesh_label(mesh);
  rep.seed = seed;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  const double dt = 0.01;
  double div_grad = 0.0, diffusion = 0.0, dual_mass = 0.0;
  std::array<double, 2> conv{}, two_path{};
  const AdvectionScheme schemes[2] = {AdvectionScheme::kCentered, AdvectionScheme::kUpwind};
  auto worse = [](double& acc, double v) { acc = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::max(acc, v); };

  for (int trial = 0; trial < trials; ++trial) {
    const CellScalarField q = uniform_cells(mesh, rng, -1.0, 1.0);
    const VelocityField u = uniform_velocity(mesh, rng);
    const VelocityField v = uniform_velocity(mesh, rng);
    const VelocityField w = uniform_velocity(mesh, rng);
    const CellScalarField rho = uniform_cells(mesh, rng, 0.5, 2.0);
    const CellScalarField mu_cells = uniform_cells(mesh, rng, 0.1, 2.0);

    // int q div v = - int grad q . v
    worse(div_grad, relative_gap(integrate(mesh, q, ops.divergence(mesh, v)),
                                 -integrate(mesh, ops.gradient(mesh, q), v)));

    // int div(mu D(u)) . v = - int mu D(u) : D(v)
    const ViscosityTensorField mu = viscosity_from_cells(mesh, mu_cells);
    const DualTensorField su = strain_tensor(mesh, u);
    const DualTensorField sv = strain_tensor(mesh, v);
    worse(diffusion, relative_gap(integrate(mesh, ops.diffusion(mesh, mu, u), v),
                                  -integrate(mesh, weighted(su, mu.dual, mesh.dim()), sv)));

    const MassFluxSet fs = mass_fluxes(mesh, rho, u);
    for (int s = 0; s < 2; ++s) {
      const double b = integrate(mesh, ops.convection(mesh, fs, v, schemes[s]), w);
      worse(conv[s], relative_gap(b, convection_dual_form(mesh, fs, v, w, schemes[s])));
      worse(two_path[s], relative_gap(b, trilinear_reconstructed(mesh, rho, u, v, w, schemes[s])));
    }

    // Old density chosen so that the primal balance holds; the dual one must follow.
    CellScalarField rho_old = rho;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
      rho_old[k] = rho[k] + dt * net_outflow(mesh, fs, static_cast<int>(k)) / mesh.cell(static_cast<int>(k)).volume;
    }
    const double rmax = std::max(max_abs(rho.values), max_abs(rho_old.values));
    worse(dual_mass, dual_balance(mesh, dual_cell_density(mesh, rho_old), dual_cell_density(mesh, rho), fs, dt, rmax));
  }
  rep.results = {{"div-grad duality", div_grad, tol},
                 {"diffusion duality", diffusion, tol},
                 {"convection duality (centered)", conv[0], tol},
                 {"convection duality (upwind)", conv[1], tol},
                 {"b_E two-path (centered)", two_path[0], tol},
                 {"b_E two-path (upwind)", two_path[1], tol},
                 {"dual mass balance", dual_mass, tol}};
  return rep;
}

CheckReport check_inequalities(const MacMesh& mesh, int trials, std::uint64_t seed, double tol) {
  CheckReport rep;
  rep.suite = "inequalities";
  rep.mesh = mesh_label(mesh);
  rep.seed = seed;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  double korn = 0.0, poincare = 0.0, visc = 0.0;
  bool finite = true;
  const double rho_lo = 0.5, rho_hi = 3.0;
  const ViscosityLaw law = [](double r) { return 0.01 + 0.3 * r + 0.05 * std::sin(3.0 * r); };
  // The law is increasing on [rho_lo, rho_hi], so its extremes sit at the ends.
  const double mu_min = law(rho_lo), mu_max = law(rho_hi);

  for (int trial = 0; trial < trials; ++trial) {
    const VelocityField u = uniform_velocity(mesh, rng);
    const DualTensorField s = strain_tensor(mesh, u);
    const double d = std::sqrt(integrate(mesh, s, s));
    const double h1 = norm_h1(mesh, u);
    if (d > 0.0) korn = std::max(korn, h1 / d);
    if (h1 > 0.0) poincare = std::max(poincare, norm_l2(mesh, u) / h1);

    const CellScalarField rho = uniform_cells(mesh, rng, rho_lo, rho_hi);
    const ViscosityTensorField mu = viscosity_tensor(mesh, rho, law);
    for (int i = 0; i < mesh.dim(); ++i) {
      for (int j = 0; j < mesh.dim(); ++j) {
        for (double x : mu.dual(i, j)) visc = std::max({visc, (mu_min - x) / mu_max, (x - mu_max) / mu_max});
      }
    }
    if (trial % 10 == 0) {
      const VelocityField v = uniform_velocity(mesh, rng);
      const VelocityField w = uniform_velocity(mesh, rng);
      const MassFluxSet fs = mass_fluxes(mesh, rho, u);
      for (AdvectionScheme sch : {AdvectionScheme::kCentered, AdvectionScheme::kUpwind}) {
        finite = finite && std::isfinite(trilinear(mesh, fs, v, w, sch));
      }
    }
  }
  rep.results = {{"Korn ratio", korn, std::sqrt(2.0) + tol},
                 {"Poincare ratio", poincare, mesh.diameter() + tol},
                 {"viscosity bounds", visc, tol},
                 {"b_E finite", finite ? 0.0 : 1.0, 0.0}};
  return rep;
}

void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports) {
  const auto old_prec = os.precision();
  os << "suite,mesh,seed,trials,check,value,bound,passed\n" << std::setprecision(17);
  for (const CheckReport& rep : reports) {
    for (const CheckResult& r : rep.results) {
      os << rep.suite << ",\"" << rep.mesh << "\"," << rep.seed << "," << rep.trials << "," << r.name << ","
         << r.value << "," << r.bound << "," << (r.passed() ? 1 : 0) << "\n";
    }
  }
  os.precision(old_prec);
}

void write_report_summary(std::ostream& os, const CheckReport& rep) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << rep.suite << " on " << rep.mesh << " (" << rep.trials << " trials, seed " << rep.seed << ")\n";
  for (const CheckResult& r : rep.results) {
    os << "  " << (r.passed() ? "ok  " : "FAIL") << "  " << std::left << std::setw(32) << r.name << std::right
       << std::scientific << std::setprecision(3) << r.value << "  <= " << r.bound << "\n";
    os.flags(old_flags);
  }
  os.precision(old_prec);
}

}  // namespace macflow
