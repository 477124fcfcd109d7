#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"
#include "macflow/operators.hpp"
#include "macflow/solver.hpp"

namespace macflow {

// Per-step audit -------------------------------------------------------------

enum AuditFlag : unsigned {
  kFlagMaxPrinciple = 1u << 0,
  kFlagMass = 1u << 1,
  kFlagDualMass = 1u << 2,
  kFlagDensityIdentity = 1u << 3,
  kFlagDivergence = 1u << 4,
  kFlagEnergy = 1u << 5,
  kFlagNonFinite = 1u << 6,
  kFlagViscosity = 1u << 7,
  kFlagEstimate = 1u << 8,
};

/// Comma-separated names of the raised flags ("" when none).
std::string describe_flags(unsigned flags);

struct DiagnosticsRecord {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  int step = 0;
  double t = 0.0;
  double kinetic_energy = 0.0;  // 1/2 sum |D| rho_D u^2
  double dissipation = 0.0;     // dt int mu D(u):D(u) for this step
  double forcing_work = 0.0;    // dt int f . u for this step
  double total_mass = 0.0;
  double mass_drift = 0.0;  // relative to the initial mass
  double rho_l2 = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double bv_increment = 0.0;  // dt sum |sigma| (rho_L - rho_K)^2 |u|
  double bv_total = 0.0;
  double h1_sum = 0.0;        // sum dt ||u||_{1,E,0}^2
  double u_l2_sq_max = 0.0;   // max over steps of ||u||_{L2}^2
  double force_sum = 0.0;     // sum dt ||f||_{L2}^2
  double estimate_lhs = 0.0;  // mu_min/4 h1_sum + rho_min ||u||_{L2}^2
  double estimate_bound = 0.0;  // rho_max ||u^0||^2 + 4 diam^2 / mu_min * force_sum
  double div_max = 0.0;
  int picard_iterations = 0;
  double picard_residual = 0.0;
  double linear_residual = 0.0;
  double mass_residual = 0.0;       // max_K dt |R_K| / rho_max
  double dual_mass_residual = 0.0;  // max_sigma dt |R_sigma| / (|D_sigma| rho_max)
  double density_identity_residual = 0.0;
  double energy_defect = 0.0;            // positive part of E^{n+1} + diss - work - E^n, relative
  double energy_identity_residual = 0.0; // centered scheme only, relative
  double pressure_l2 = 0.0;
  double pressure_mean = 0.0;
  double u_error = kUnset;
  double p_error = kUnset;
  double rho_error = kUnset;
  unsigned flags = 0;

  bool all_finite() const;
};

struct AuditTolerances {
  double max_principle = 1e-12;  // absolute drift past the initial bounds
  double mass = 1e-12;           // relative total-mass drift
  double dual_mass = 1e-12;
  double divergence = 1e-10;
  double density_identity_factor = 10.0;  // times linear_tol
  double energy_factor = 10.0;            // times picard_tol
};

/// Reference quantities fixed at t = 0. mu_min/mu_max bound the viscosity
/// law over [rho_min, rho_max]; leave mu_min at 0 to skip the viscosity and
/// velocity-estimate checks.
struct AuditBaseline {
  double rho_min = 0.0;
  double rho_max = 0.0;
  double mass = 0.0;
  double u0_l2_sq = 0.0;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

AuditBaseline make_baseline(const MacMesh& mesh, const TimeState& initial, double mu_min = 0.0,
                            double mu_max = 0.0);

/// Record for the initial state (step 0, no step-dependent entries).
DiagnosticsRecord initial_record(const MacMesh& mesh, const TimeState& s, const AuditBaseline& base);

/// Re-derives every audit quantity from (prev, next) and the problem data.
/// `last` carries the running sums (BV, H1, max L2) of the previous record.
DiagnosticsRecord step_audit(const MacMesh& mesh, const TimeState& prev, const TimeState& next,
                             const SolverConfig& cfg, const ViscosityLaw& law, const Forcing& forcing,
                             const AuditBaseline& base, const DiagnosticsRecord& last, const StepReport& report,
                             const AuditTolerances& tol = {});

/// Headered CSV.
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r);

// Identity and inequality suites ----------------------------------------------

/// Operators under test. Defaults to the library kernels; a test fixture can
/// swap one out to confirm the suite catches it.
struct OperatorSet {
  std::function<CellScalarField(const MacMesh&, const VelocityField&)> divergence;
  std::function<VelocityField(const MacMesh&, const CellScalarField&)> gradient;
  std::function<VelocityField(const MacMesh&, const ViscosityTensorField&, const VelocityField&)> diffusion;
  std::function<VelocityField(const MacMesh&, const MassFluxSet&, const VelocityField&, AdvectionScheme)> convection;
};

OperatorSet library_operators();

struct CheckResult {
  std::string name;
  double value = 0.0;  // worst residual or ratio
  double bound = 0.0;
  bool passed() const { return value <= bound; }
};

struct CheckReport {
  std::string suite;
  std::string mesh;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<CheckResult> results;

  bool passed() const;
  /// Names of the failing checks, comma separated.
  std::string failures() const;
};

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_gap(double a, double b);

/// Random-field trials of the exact discrete identities: div-grad duality,
/// diffusion duality, convection duality, the two evaluations of b_E, and
/// the dual mass balance. Fields are i.i.d. uniform in [-1, 1] with zero
/// boundary velocities.
CheckReport check_dualities(const MacMesh& mesh, int trials, std::uint64_t seed,
                            const OperatorSet& ops = library_operators(), double tol = 1e-12);

/// Korn and Poincare ratios over random velocities, viscosity bounds over
/// random densities, and finiteness of b_E.
CheckReport check_inequalities(const MacMesh& mesh, int trials, std::uint64_t seed, double tol = 1e-12);

void write_report_csv(std::ostream& os, const std::vector<CheckReport>& reports);
void write_report_summary(std::ostream& os, const CheckReport& report);

}  // namespace macflow
