// Batch driver: run a configured problem, run a refinement study, or check
// the discrete identities.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "macflow/assembly.hpp"
#include "macflow/config.hpp"
#include "macflow/convergence.hpp"
#include "macflow/io.hpp"
#include "macflow/simulation.hpp"
#include "macflow/verification.hpp"

namespace fs = std::filesystem;
using namespace macflow;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kVerification = 4 };

struct Options {
  std::string config;
  int levels = 0;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir;
};

fs::path prepare_dir(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

void dump_matrices(const fs::path& dir, const MacMesh& mesh, const FlowProblem& problem, const SolverConfig& cfg) {
  const TimeState s = project_initial(mesh, problem, cfg);
  StepSolver solver(mesh, cfg);
  const CellScalarField rho = solver.transport(s.rho, s.u, cfg.dt);
  const MassFluxSet fluxes = mass_fluxes(mesh, rho, s.u);
  const ViscosityTensorField mu = viscosity_tensor(mesh, rho, problem.mu);
  const FaceField body = sample_body_force(mesh, problem.forcing, s.t, s.t + cfg.dt, cfg);
  const FaceField f = total_force(mesh, problem.forcing, body, dual_cell_density(mesh, rho));
  const MomentumData data{rho, s.rho_dual, s.u, fluxes, mu, f, cfg.dt};
  auto out = open_output(dir / "momentum_matrix.coo");
  write_coo(out, solver.momentum_matrix(data));
  auto tr = open_output(dir / "transport_matrix.coo");
  write_coo(tr, transport_matrix(mesh, s.u, cfg.dt));
}

int cmd_run(const Options& o) {
  ProblemSpec spec = load_config(o.config);
  if (o.threads > 0) spec.solver.threads = o.threads;
  if (!o.output_dir.empty()) spec.output.directory = o.output_dir;
  const fs::path dir = prepare_dir(spec.output.directory);
  const MacMesh mesh = spec.build_mesh();
  const FlowProblem problem = spec.build_problem();

  auto csv = open_output(dir / "diagnostics.csv");
  CsvSink csv_sink(csv);
  VtkSnapshotSink vtk_sink(mesh, dir);
  TeeSink sink;
  sink.add(&csv_sink);
  if (spec.output.vtk) sink.add(&vtk_sink);
  if (spec.output.matrix) dump_matrices(dir, mesh, problem, spec.solver);

  const SimulationResult res = run_simulation(mesh, problem, spec.solver, &sink);
  if (spec.output.raw) {
    auto raw = open_output(dir / "final_fields.csv");
    write_raw_fields(raw, mesh, res.final_state);
  }
  const DiagnosticsRecord& last = res.records.back();
  std::cout << spec.problem << ": " << last.step << " steps to t = " << last.t << ", kinetic energy "
            << last.kinetic_energy << ", mass drift " << last.mass_drift << "\n";
  if (problem.exact) {
    std::cout << "L2 errors: u " << last.u_error << ", p " << last.p_error << ", rho " << last.rho_error << "\n";
  }
  std::cout << "output in " << dir.string() << "\n";
  if (res.flags != 0) {
    std::cerr << "audit flags raised: " << describe_flags(res.flags) << "\n";
    return kVerification;
  }
  return kOk;
}

int cmd_convergence(const Options& o) {
  ProblemSpec spec = load_config(o.config);
  std::vector<int> levels = spec.convergence.levels;
  if (o.levels > 0) {
    const int base = levels.empty() ? 8 : levels.front();
    levels.clear();
    for (int k = 0; k < o.levels; ++k) levels.push_back(base << k);
  }
  const fs::path dir = prepare_dir(o.output_dir.empty() ? spec.output.directory : o.output_dir);
  ConvergenceTable table;
  try {
    table = run_convergence(spec, levels, o.threads > 0 ? o.threads : spec.solver.threads, &std::cerr);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("convergence", e.what());
  }
  print_convergence(std::cout, table);
  auto csv = open_output(dir / "convergence.csv");
  write_convergence_csv(csv, table);
  return kOk;
}

int cmd_verify(const Options& o) {
  std::vector<MacMesh> meshes;
  if (!o.config.empty()) {
    meshes.push_back(load_config(o.config).build_mesh());
  } else {
    meshes.push_back(unit_square_mesh(8, 8));
    meshes.push_back(unit_square_mesh(16, 16, 3.0));
  }
  std::vector<CheckReport> reports;
  for (const MacMesh& m : meshes) {
    reports.push_back(check_dualities(m, o.trials, o.seed));
    reports.push_back(check_inequalities(m, 10 * o.trials, o.seed));
  }
  bool ok = true;
  for (const CheckReport& r : reports) {
    write_report_summary(std::cout, r);
    ok = ok && r.passed();
  }
  if (!o.output_dir.empty()) {
    auto csv = open_output(prepare_dir(o.output_dir) / "verify.csv");
    write_report_csv(csv, reports);
  }
  std::cout << (ok ? "all checks passed" : "verification FAILED") << "\n";
  return ok ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit MAC solver for variable-density incompressible flow"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run a configured problem, writing diagnostics and snapshots");
  run->add_option("--config", o.config, "JSON configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--threads", o.threads, "assembly threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--output-dir", o.output_dir, "output directory (overrides the config)");

  auto* conv = app.add_subcommand("convergence", "refinement study with dt proportional to h");
  conv->add_option("--config", o.config, "JSON configuration")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", o.levels, "number of levels, doubling from the first configured one");
  conv->add_option("--threads", o.threads, "assembly threads")->check(CLI::PositiveNumber);
  conv->add_option("--output-dir", o.output_dir, "where convergence.csv goes");

  auto* ver = app.add_subcommand("verify", "random-field identity and inequality suites");
  ver->add_option("--config", o.config, "take the mesh from this configuration")->check(CLI::ExistingFile);
  ver->add_option("--trials", o.trials, "identity trials per mesh (inequalities use 10x)")->check(CLI::PositiveNumber);
  ver->add_option("--seed", o.seed, "random seed");
  ver->add_option("--threads", o.threads, "accepted for symmetry; the suites run serially");
  ver->add_option("--output-dir", o.output_dir, "write verify.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*conv) return cmd_convergence(o);
    return cmd_verify(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const StepFailure& e) {
    std::cerr << "solver failure at step " << e.step << ": " << e.what() << "\n";
    return kSolver;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
}
