#include "macflow/convergence.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "macflow/simulation.hpp"

namespace macflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Refinement factors per axis, after checking that every coarse node is a fine node.
Index3 nesting(const MacMesh& fine, const MacMesh& coarse) {
  if (fine.dim() != coarse.dim()) throw std::invalid_argument("meshes differ in dimension");
  Index3 r{1, 1, 1};
  for (int a = 0; a < fine.dim(); ++a) {
    const int nf = fine.cells_along(a), nc = coarse.cells_along(a);
    if (nf % nc != 0) throw std::invalid_argument("meshes are not nested");
    r[a] = nf / nc;
    const double scale = fine.nodes(a).back() - fine.nodes(a).front();
    for (int k = 0; k <= nc; ++k) {
      if (std::abs(fine.nodes(a)[k * r[a]] - coarse.nodes(a)[k]) > 1e-12 * scale) {
        throw std::invalid_argument("meshes are not nested");
      }
    }
  }
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double observed_order(double ec, double ef, double hc, double hf) {
  if (!(ec > 0.0) || !(ef > 0.0) || !(hc > 0.0) || !(hf > 0.0) || hc == hf) return kNaN;
  return std::log(ec / ef) / std::log(hc / hf);
}

std::vector<double> ConvergenceTable::column(double LevelResult::*member) const {
  std::vector<double> out;
  for (const LevelResult& l : levels) out.push_back(l.*member);
  return out;
}

double ConvergenceTable::fitted_u_order() const {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const LevelResult& l : levels) {
    if (!(l.u_error > 0.0)) continue;
    const double x = std::log(l.h), y = std::log(l.u_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den <= 0.0) return kNaN;
  return (n * sxy - sx * sy) / den;
}

bool ConvergenceTable::decreasing(const std::vector<double>& e, double floor) {
  for (std::size_t k = 1; k < e.size(); ++k) {
    if (e[k] <= floor && e[k - 1] <= floor) continue;
    if (!(e[k] < e[k - 1])) return false;
  }
  return true;
}

CellScalarField restrict_cells(const MacMesh& fine, const CellScalarField& q, const MacMesh& coarse) {
  const Index3 r = nesting(fine, coarse);
  CellScalarField out = CellScalarField::zeros(coarse);
  for (std::size_t k = 0; k < fine.num_cells(); ++k) {
    const Index3 m = fine.cell_index(static_cast<int>(k));
    Index3 c{};
    for (int a = 0; a < kMaxDim; ++a) c[a] = m[a] / r[a];
    out[coarse.cell_id(c)] += fine.cell(static_cast<int>(k)).volume * q[k];
  }
  for (std::size_t k = 0; k < coarse.num_cells(); ++k) out[k] /= coarse.cell(static_cast<int>(k)).volume;
  return out;
}

VelocityField restrict_faces(const MacMesh& fine, const VelocityField& u, const MacMesh& coarse) {
  const Index3 r = nesting(fine, coarse);
  VelocityField out = VelocityField::zeros(coarse);
  for (int i = 0; i < fine.dim(); ++i) {
    for (std::size_t s = 0; s < fine.num_faces(i); ++s) {
      const Index3 m = fine.face_index(i, static_cast<int>(s));
      if (m[i] % r[i] != 0) continue;  // not on a coarse face
      Index3 c{};
      for (int a = 0; a < kMaxDim; ++a) c[a] = m[a] / r[a];
      out.comp[i][coarse.face_id(i, c)] += fine.face(i, static_cast<int>(s)).area * u.comp[i][s];
    }
    for (std::size_t s = 0; s < coarse.num_faces(i); ++s) out.comp[i][s] /= coarse.face(i, static_cast<int>(s)).area;
  }
  out.apply_dirichlet(coarse);
  return out;
}

ConvergenceTable run_convergence(const ProblemSpec& spec, const std::vector<int>& levels, int threads,
                                 std::ostream* log) {
  if (levels.size() < 3) throw std::invalid_argument("convergence needs at least 3 levels");
  const FlowProblem problem = spec.build_problem();
  const ConvergenceSpec& conv = spec.convergence;
  const bool self_reference = conv.reference > 0;
  if (!self_reference && !problem.exact) {
    throw std::invalid_argument("problem '" + spec.problem + "' has no exact solution; set convergence.reference");
  }
  const double width = spec.domain.upper[0] - spec.domain.lower[0];

  auto level_config = [&](int n) {
    SolverConfig cfg = spec.solver;
    cfg.threads = threads;
    cfg.output_every = 0;
    const double h = width / n;
    cfg.dt = conv.dt_over_h * h;
    const double steps = cfg.t_end / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      std::ostringstream os;
      os << "level " << n << ": t_end / dt = " << steps << " is not a whole number of steps";
      throw std::invalid_argument(os.str());
    }
    return cfg;
  };

  ConvergenceTable table;
  MacMesh ref_mesh = spec.mesh.build_level(spec.domain, self_reference ? conv.reference : levels.front());
  TimeState ref;
  if (self_reference) {
    table.reference = conv.reference;
    SolverConfig cfg = level_config(conv.reference);
    if (conv.reference_linear_tol > 0.0) cfg.linear_tol = conv.reference_linear_tol;
    if (log) *log << "reference " << conv.reference << ": " << cfg.num_steps() << " steps" << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    ref = run_simulation(ref_mesh, problem, cfg).final_state;
    table.reference_seconds = seconds_since(t0);
    if (log) *log << "reference done in " << table.reference_seconds << " s" << std::endl;
  }

  for (int n : levels) {
    const MacMesh mesh = spec.mesh.build_level(spec.domain, n);
    const SolverConfig cfg = level_config(n);
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationResult res = run_simulation(mesh, problem, cfg);
    LevelResult l;
    l.n = n;
    l.h = width / n;
    l.dt = cfg.dt;
    l.steps = cfg.num_steps();
    l.bv_total = res.records.back().bv_total;
    l.h1_sum = res.records.back().h1_sum;
    l.flags = res.flags;
    if (self_reference) {
      const TimeState& s = res.final_state;
      VelocityField du = restrict_faces(ref_mesh, ref.u, mesh);
      for (int i = 0; i < mesh.dim(); ++i) {
        for (std::size_t f = 0; f < du.comp[i].size(); ++f) du.comp[i][f] -= s.u.comp[i][f];
      }
      CellScalarField dp = restrict_cells(ref_mesh, ref.p, mesh);
      const double shift = mean(mesh, dp);
      CellScalarField dr = restrict_cells(ref_mesh, ref.rho, mesh);
      for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        dp[k] -= shift + s.p[k];
        dr[k] -= s.rho[k];
      }
      l.u_error = norm_l2(mesh, du);
      l.p_error = norm_l2(mesh, dp);
      l.rho_error = norm_l2(mesh, dr);
    } else {
      const DiagnosticsRecord& last = res.records.back();
      l.u_error = last.u_error;
      l.p_error = last.p_error;
      l.rho_error = last.rho_error;
    }
    l.seconds = seconds_since(t0);
    if (log) {
      *log << "level " << n << ": dt " << l.dt << ", " << l.steps << " steps, u error " << l.u_error << " ("
           << l.seconds << " s)" << std::endl;
    }
    table.levels.push_back(l);
  }

  for (std::size_t k = 1; k < table.levels.size(); ++k) {
    const LevelResult& c = table.levels[k - 1];
    const LevelResult& f = table.levels[k];
    table.u_order.push_back(observed_order(c.u_error, f.u_error, c.h, f.h));
    table.p_order.push_back(observed_order(c.p_error, f.p_error, c.h, f.h));
    table.rho_order.push_back(observed_order(c.rho_error, f.rho_error, c.h, f.h));
    if (c.n == f.n) {
      table.notes.push_back("levels " + std::to_string(k - 1) + " and " + std::to_string(k) +
                            " are identical; orders undefined");
    } else if (std::isnan(table.u_order.back())) {
      table.notes.push_back("velocity order between levels " + std::to_string(k - 1) + " and " + std::to_string(k) +
                            " undefined (zero error)");
    }
  }
  return table;
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& t) {
  const auto old_prec = os.precision();
  os << std::setprecision(17) << "n,h,dt,steps,u_error,p_error,rho_error,u_order,p_order,rho_order,bv_total,h1_sum\n";
  auto opt = [&](const std::vector<double>& v, std::size_t k) {
    if (k == 0 || std::isnan(v[k - 1])) return std::string();
    std::ostringstream s;
    s << std::setprecision(17) << v[k - 1];
    return s.str();
  };
  for (std::size_t k = 0; k < t.levels.size(); ++k) {
    const LevelResult& l = t.levels[k];
    os << l.n << "," << l.h << "," << l.dt << "," << l.steps << "," << l.u_error << "," << l.p_error << ","
       << l.rho_error << "," << opt(t.u_order, k) << "," << opt(t.p_order, k) << "," << opt(t.rho_order, k) << ","
       << l.bv_total << "," << l.h1_sum << "\n";
  }
  os.precision(old_prec);
}

void print_convergence(std::ostream& os, const ConvergenceTable& t) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  if (t.reference > 0) os << "errors against a " << t.reference << "-cell reference\n";
  os << std::setw(6) << "n" << std::setw(11) << "h" << std::setw(11) << "dt" << std::setw(12) << "u err"
     << std::setw(7) << "ord" << std::setw(12) << "p err" << std::setw(7) << "ord" << std::setw(12) << "rho err"
     << std::setw(7) << "ord" << "\n";
  auto ord = [&](const std::vector<double>& v, std::size_t k) {
    std::ostringstream s;
    if (k == 0) {
      s << "";
    } else if (std::isnan(v[k - 1])) {
      s << "-";
    } else {
      s << std::fixed << std::setprecision(2) << v[k - 1];
    }
    return s.str();
  };
  for (std::size_t k = 0; k < t.levels.size(); ++k) {
    const LevelResult& l = t.levels[k];
    os << std::setw(6) << l.n << std::scientific << std::setprecision(3) << std::setw(11) << l.h << std::setw(11)
       << l.dt << std::setw(12) << l.u_error << std::setw(7) << ord(t.u_order, k) << std::setw(12) << l.p_error
       << std::setw(7) << ord(t.p_order, k) << std::setw(12) << l.rho_error << std::setw(7) << ord(t.rho_order, k)
       << "\n";
  }
  os << "fitted velocity order: " << std::fixed << std::setprecision(3) << t.fitted_u_order() << "\n";
  for (const std::string& n : t.notes) os << "note: " << n << "\n";
  os.flags(old_flags);
  os.precision(old_prec);
}

}  // namespace macflow
