#include "macflow/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace macflow {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
  return out;
}

void parse_domain(const json& j, const std::string& path, Box& box) {
  only_keys(j, path, {"lower", "upper"});
  if (!j.contains("lower") || !j.contains("upper")) throw ConfigError(path, "needs 'lower' and 'upper'");
  const auto lo = numbers(j["lower"], join(path, "lower"));
  const auto hi = numbers(j["upper"], join(path, "upper"));
  if (lo.size() < 2 || lo.size() > 3) throw ConfigError(join(path, "lower"), "needs 2 or 3 entries");
  if (hi.size() != lo.size()) throw ConfigError(join(path, "upper"), "must match the length of 'lower'");
  box.dim = static_cast<int>(lo.size());
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (!(hi[a] > lo[a])) throw ConfigError(index(join(path, "upper"), a), "must exceed the lower bound");
    box.lower[a] = lo[a];
    box.upper[a] = hi[a];
  }
}

void parse_mesh(const json& j, const std::string& path, int dim, MeshSpec& mesh) {
  only_keys(j, path, {"cells", "stretch", "breakpoints"});
  if (j.contains("breakpoints")) {
    if (j.contains("cells") || j.contains("stretch")) {
      throw ConfigError(join(path, "breakpoints"), "cannot be combined with 'cells' or 'stretch'");
    }
    const json& b = j["breakpoints"];
    const std::string bp = join(path, "breakpoints");
    if (!b.is_array() || static_cast<int>(b.size()) != dim) {
      throw ConfigError(bp, "expected one array per axis (" + std::to_string(dim) + ")");
    }
    for (std::size_t a = 0; a < b.size(); ++a) {
      auto v = numbers(b[a], index(bp, a));
      if (v.size() < 2) throw ConfigError(index(bp, a), "needs at least two breakpoints");
      for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] > v[k - 1])) throw ConfigError(index(index(bp, a), k), "breakpoints must increase strictly");
      }
      mesh.breakpoints.push_back(std::move(v));
    }
    return;
  }
  if (!j.contains("cells")) throw ConfigError(path, "needs 'cells' or 'breakpoints'");
  const json& c = j["cells"];
  const std::string cp = join(path, "cells");
  if (!c.is_array() || static_cast<int>(c.size()) != dim) {
    throw ConfigError(cp, "expected " + std::to_string(dim) + " cell counts");
  }
  for (std::size_t a = 0; a < c.size(); ++a) {
    const int n = integer(c[a], index(cp, a));
    if (n < 1) throw ConfigError(index(cp, a), "must be at least 1");
    mesh.cells.push_back(n);
  }
  mesh.stretch.assign(dim, 1.0);
  if (j.contains("stretch")) {
    const std::string sp = join(path, "stretch");
    const json& s = j["stretch"];
    if (s.is_number()) {
      mesh.stretch.assign(dim, positive(s, sp));
    } else {
      const auto v = numbers(s, sp);
      if (static_cast<int>(v.size()) != dim) throw ConfigError(sp, "expected a number or one per axis");
      for (std::size_t a = 0; a < v.size(); ++a) {
        if (!(v[a] > 0.0)) throw ConfigError(index(sp, a), "must be positive");
      }
      mesh.stretch = v;
    }
  }
}

void parse_viscosity(const json& j, const std::string& path, ViscosityModel& m) {
  if (!j.is_object() || !j.contains("law")) throw ConfigError(path, "needs a 'law' entry");
  const std::string law = string(j["law"], join(path, "law"));
  if (law == "constant") {
    only_keys(j, path, {"law", "value"});
    if (!j.contains("value")) throw ConfigError(join(path, "value"), "missing");
    m = ViscosityModel::constant(positive(j["value"], join(path, "value")));
  } else if (law == "linear") {
    only_keys(j, path, {"law", "a", "b"});
    if (!j.contains("a") || !j.contains("b")) throw ConfigError(path, "linear law needs 'a' and 'b'");
    m = ViscosityModel::linear(number(j["a"], join(path, "a")), number(j["b"], join(path, "b")));
  } else if (law == "table") {
    only_keys(j, path, {"law", "rho", "mu"});
    if (!j.contains("rho") || !j.contains("mu")) throw ConfigError(path, "table law needs 'rho' and 'mu'");
    m = ViscosityModel::table(numbers(j["rho"], join(path, "rho")), numbers(j["mu"], join(path, "mu")));
  } else {
    throw ConfigError(join(path, "law"), "expected constant, linear or table");
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_solver(const json& j, const std::string& path, SolverConfig& cfg) {
  only_keys(j, path,
            {"dt", "t_end", "picard_tol", "picard_max", "linear_tol", "scheme", "quadrature_order", "output_every",
             "forcing", "threads"});
  if (j.contains("dt")) cfg.dt = positive(j["dt"], join(path, "dt"));
  if (j.contains("t_end")) cfg.t_end = number(j["t_end"], join(path, "t_end"));
  if (j.contains("picard_tol")) cfg.picard_tol = positive(j["picard_tol"], join(path, "picard_tol"));
  if (j.contains("picard_max")) cfg.picard_max = integer(j["picard_max"], join(path, "picard_max"));
  if (j.contains("linear_tol")) cfg.linear_tol = positive(j["linear_tol"], join(path, "linear_tol"));
  if (j.contains("quadrature_order")) {
    cfg.quadrature_order = integer(j["quadrature_order"], join(path, "quadrature_order"));
  }
  if (j.contains("output_every")) cfg.output_every = integer(j["output_every"], join(path, "output_every"));
  if (j.contains("threads")) cfg.threads = integer(j["threads"], join(path, "threads"));
  if (j.contains("scheme")) {
    try {
      cfg.scheme = parse_advection_scheme(string(j["scheme"], join(path, "scheme")));
    } catch (const std::invalid_argument&) {
      throw ConfigError(join(path, "scheme"), "expected centered or upwind");
    }
  }
  if (j.contains("forcing")) {
    const std::string f = string(j["forcing"], join(path, "forcing"));
    if (f == "endpoint") {
      cfg.forcing = ForcingSampling::kEndpoint;
    } else if (f == "slab-average") {
      cfg.forcing = ForcingSampling::kSlabAverage;
    } else {
      throw ConfigError(join(path, "forcing"), "expected endpoint or slab-average");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    // validate() names the field first.
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(' '));
    throw ConfigError(join(path, field), msg.substr(msg.find(' ') + 1));
  }
}

void parse_convergence(const json& j, const std::string& path, ConvergenceSpec& c) {
  only_keys(j, path, {"levels", "dt_over_h", "reference", "reference_linear_tol"});
  if (j.contains("levels")) {
    const json& l = j["levels"];
    const std::string lp = join(path, "levels");
    if (!l.is_array()) throw ConfigError(lp, "expected an array of cell counts");
    c.levels.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      const int n = integer(l[i], index(lp, i));
      if (n < 1) throw ConfigError(index(lp, i), "must be at least 1");
      c.levels.push_back(n);
    }
  }
  if (j.contains("dt_over_h")) c.dt_over_h = positive(j["dt_over_h"], join(path, "dt_over_h"));
  if (j.contains("reference")) {
    c.reference = integer(j["reference"], join(path, "reference"));
    if (c.reference < 0) throw ConfigError(join(path, "reference"), "must be non-negative");
  }
  if (j.contains("reference_linear_tol")) {
    c.reference_linear_tol = positive(j["reference_linear_tol"], join(path, "reference_linear_tol"));
  }
}

void parse_output(const json& j, const std::string& path, OutputSpec& o) {
  only_keys(j, path, {"directory", "vtk", "raw", "matrix"});
  if (j.contains("directory")) o.directory = string(j["directory"], join(path, "directory"));
  if (j.contains("vtk")) o.vtk = boolean(j["vtk"], join(path, "vtk"));
  if (j.contains("raw")) o.raw = boolean(j["raw"], join(path, "raw"));
  if (j.contains("matrix")) o.matrix = boolean(j["matrix"], join(path, "matrix"));
}

}  // namespace

MacMesh MeshSpec::build(const Box& box) const {
  std::vector<AxisPartition> axes;
  if (explicit_breakpoints()) {
    for (const auto& b : breakpoints) axes.push_back(AxisPartition{b});
  } else {
    for (int a = 0; a < box.dim; ++a) {
      axes.push_back(AxisPartition::stretched(box.lower[a], box.upper[a], cells[a], stretch[a]));
    }
  }
  return MacMesh(axes);
}

MacMesh MeshSpec::build_level(const Box& box, int n) const {
  if (explicit_breakpoints()) throw std::invalid_argument("refinement levels need a 'cells' mesh specification");
  std::vector<AxisPartition> axes;
  for (int a = 0; a < box.dim; ++a) {
    const long scaled = std::lround(static_cast<double>(n) * cells[a] / cells[0]);
    if (scaled < 1 || static_cast<double>(n) * cells[a] / cells[0] != static_cast<double>(scaled)) {
      throw std::invalid_argument("level " + std::to_string(n) + " does not keep the mesh aspect ratio");
    }
    axes.push_back(AxisPartition::stretched(box.lower[a], box.upper[a], static_cast<int>(scaled), stretch[a]));
  }
  return MacMesh(axes);
}

FlowProblem ProblemSpec::build_problem() const {
  try {
    return make_problem(problem, parameters, domain, viscosity, gravity);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }
}

ProblemSpec parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  only_keys(j, "", {"problem", "parameters", "domain", "mesh", "viscosity", "gravity", "solver", "convergence", "output"});
  ProblemSpec spec;
  if (!j.contains("problem")) throw ConfigError("problem", "missing");
  spec.problem = string(j["problem"], "problem");
  ParameterMap defaults;
  try {
    defaults = problem_defaults(spec.problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }
  if (j.contains("parameters")) {
    const json& p = j["parameters"];
    if (!p.is_object()) throw ConfigError("parameters", "expected an object");
    for (const auto& [key, v] : p.items()) {
      if (!defaults.count(key)) throw ConfigError(join("parameters", key), "unknown parameter for " + spec.problem);
      spec.parameters[key] = number(v, join("parameters", key));
    }
  }
  if (j.contains("domain")) parse_domain(j["domain"], "domain", spec.domain);
  if (!j.contains("mesh")) throw ConfigError("mesh", "missing");
  parse_mesh(j["mesh"], "mesh", spec.domain.dim, spec.mesh);
  if (spec.mesh.explicit_breakpoints()) {
    for (int a = 0; a < spec.domain.dim; ++a) {
      const auto& b = spec.mesh.breakpoints[a];
      if (b.front() != spec.domain.lower[a] || b.back() != spec.domain.upper[a]) {
        throw ConfigError(index("mesh.breakpoints", a), "must span the domain");
      }
    }
  }
  if (j.contains("viscosity")) parse_viscosity(j["viscosity"], "viscosity", spec.viscosity);
  if (j.contains("gravity")) {
    const auto g = numbers(j["gravity"], "gravity");
    if (static_cast<int>(g.size()) != spec.domain.dim) throw ConfigError("gravity", "needs one entry per axis");
    for (std::size_t a = 0; a < g.size(); ++a) spec.gravity[a] = g[a];
  }
  if (j.contains("solver")) {
    parse_solver(j["solver"], "solver", spec.solver);
  } else {
    spec.solver.validate();
  }
  if (j.contains("convergence")) parse_convergence(j["convergence"], "convergence", spec.convergence);
  if (j.contains("output")) parse_output(j["output"], "output", spec.output);
  spec.build_problem();  // surfaces domain and law mismatches now
  return spec;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace macflow
