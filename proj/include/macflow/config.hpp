#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "macflow/mesh.hpp"
#include "macflow/problems.hpp"
#include "macflow/solver.hpp"

namespace macflow {

/// Schema violation; `path` is the offending key, e.g. "solver.dt".
struct ConfigError : std::runtime_error {
  ConfigError(std::string path, const std::string& msg)
      : std::runtime_error((path.empty() ? std::string("config") : path) + ": " + msg), path(std::move(path)) {}
  std::string path;
};

/// Either explicit breakpoints per axis or cell counts with optional grading.
struct MeshSpec {
  std::vector<int> cells;
  std::vector<double> stretch;  // per axis, 1 = uniform
  std::vector<std::vector<double>> breakpoints;

  bool explicit_breakpoints() const { return !breakpoints.empty(); }
  MacMesh build(const Box& box) const;
  /// Same shape and grading with n cells along the first axis and the other
  /// axes scaled to keep the cell-count ratios.
  MacMesh build_level(const Box& box, int n) const;
};

struct ConvergenceSpec {
  std::vector<int> levels{8, 16, 32, 64};
  double dt_over_h = 0.25;
  int reference = 0;  // cells along the first axis of a self-reference run, 0 = use the exact solution
  double reference_linear_tol = 0.0;  // 0 = same as solver.linear_tol
};

struct OutputSpec {
  std::string directory = "output";
  bool vtk = true;
  bool raw = true;
  bool matrix = false;
};

struct ProblemSpec {
  std::string problem;
  ParameterMap parameters;
  Box domain;
  MeshSpec mesh;
  ViscosityModel viscosity;
  Vec3 gravity{};
  SolverConfig solver;
  ConvergenceSpec convergence;
  OutputSpec output;

  FlowProblem build_problem() const;
  MacMesh build_mesh() const { return mesh.build(domain); }
};

/// Parses JSON text. Unknown keys, wrong types and out-of-range values throw
/// ConfigError carrying the key path.
ProblemSpec parse_config(const std::string& text);
ProblemSpec load_config(const std::filesystem::path& path);

}  // namespace macflow
