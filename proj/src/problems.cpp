#include "macflow/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace macflow {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// g(s) = s^2 (1 - s)^2 and its derivatives.
double g0(double s) { return s * s * (1 - s) * (1 - s); }
double g1(double s) { return 2 * s - 6 * s * s + 4 * s * s * s; }
double g2(double s) { return 2 - 12 * s + 12 * s * s; }
double g3(double s) { return -12 + 24 * s; }

// Divergence-free velocity 256 A curl(g(xi) g(zeta)) on a box; peak stream
// function value A.
Vec3 box_vortex(const Box& box, double amplitude, const Vec3& x) {
  const double lx = box.upper[0] - box.lower[0], ly = box.upper[1] - box.lower[1];
  const double xi = (x[0] - box.lower[0]) / lx, zeta = (x[1] - box.lower[1]) / ly;
  const double c = 256.0 * amplitude;
  return {c * g0(xi) * g1(zeta) / ly, -c * g1(xi) * g0(zeta) / lx, 0.0};
}

bool is_unit_square(const Box& b) {
  return b.dim == 2 && b.lower[0] == 0.0 && b.lower[1] == 0.0 && b.upper[0] == 1.0 && b.upper[1] == 1.0;
}

const std::map<std::string, ParameterMap>& registry() {
  static const std::map<std::string, ParameterMap> r = {
      {"quiescent", {{"rho", 1.0}}},
      {"mms-a", {{"rho", 1.0}, {"amplitude", 1.0}}},
      {"mms-b",
       {{"rho_in", 3.0},
        {"rho_out", 1.0},
        {"radius", 0.2},
        {"center_x", 0.5},
        {"center_y", 0.6},
        {"amplitude", 0.05},
        {"forcing", 1.0}}},
      {"rayleigh-taylor",
       {{"rho_heavy", 3.0}, {"rho_light", 1.0}, {"width", 0.02}, {"perturbation", 0.05}, {"amplitude", 0.01}}},
  };
  return r;
}

}  // namespace

// Viscosity ----------------------------------------------------------------------

ViscosityModel ViscosityModel::constant(double v) {
  ViscosityModel m;
  m.kind = Kind::kConstant;
  m.value = v;
  return m;
}

ViscosityModel ViscosityModel::linear(double a, double b) {
  ViscosityModel m;
  m.kind = Kind::kLinear;
  m.a = a;
  m.b = b;
  return m;
}

ViscosityModel ViscosityModel::table(std::vector<double> rho, std::vector<double> mu) {
  ViscosityModel m;
  m.kind = Kind::kTable;
  m.rho = std::move(rho);
  m.mu = std::move(mu);
  return m;
}

void ViscosityModel::validate() const {
  switch (kind) {
    case Kind::kConstant:
      require(std::isfinite(value) && value > 0.0, "constant viscosity must be positive");
      break;
    case Kind::kLinear:
      require(std::isfinite(a) && std::isfinite(b), "linear viscosity coefficients must be finite");
      break;
    case Kind::kTable:
      require(rho.size() >= 2, "viscosity table needs at least two nodes");
      require(rho.size() == mu.size(), "viscosity table columns differ in length");
      for (std::size_t k = 0; k < rho.size(); ++k) {
        require(std::isfinite(rho[k]) && std::isfinite(mu[k]), "viscosity table entries must be finite");
        require(mu[k] > 0.0, "viscosity table values must be positive");
        require(k == 0 || rho[k] > rho[k - 1], "viscosity table densities must increase strictly");
      }
      break;
  }
}

double ViscosityModel::operator()(double r) const {
  switch (kind) {
    case Kind::kConstant:
      return value;
    case Kind::kLinear:
      return a + b * r;
    case Kind::kTable: {
      if (r <= rho.front()) return mu.front();
      if (r >= rho.back()) return mu.back();
      const auto it = std::upper_bound(rho.begin(), rho.end(), r);
      const std::size_t k = static_cast<std::size_t>(it - rho.begin());
      const double w = (r - rho[k - 1]) / (rho[k] - rho[k - 1]);
      return (1 - w) * mu[k - 1] + w * mu[k];
    }
  }
  return value;
}

ViscosityLaw ViscosityModel::law() const {
  return [m = *this](double r) { return m(r); };
}

std::pair<double, double> ViscosityModel::bounds(double lo, double hi) const {
  std::vector<double> samples{(*this)(lo), (*this)(hi)};
  if (kind == Kind::kTable) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
      if (rho[k] > lo && rho[k] < hi) samples.push_back(mu[k]);
    }
  }
  const auto [a_, b_] = std::minmax_element(samples.begin(), samples.end());
  return {*a_, *b_};
}

// MMS-A --------------------------------------------------------------------------

namespace mms_a {

Vec3 velocity(double amp, double t, const Vec3& x) {
  const double c = amp * std::cos(t);
  return {c * g0(x[0]) * g1(x[1]), -c * g1(x[0]) * g0(x[1]), 0.0};
}

double pressure(double, const Vec3& x) { return std::sin(kPi * x[0]) * std::cos(kPi * x[1]); }

Vec3 forcing(double amp, double rho, double mu, double t, const Vec3& x) {
  const double a0 = g0(x[0]), a1 = g1(x[0]), a2 = g2(x[0]), a3 = g3(x[0]);
  const double b0 = g0(x[1]), b1 = g1(x[1]), b2 = g2(x[1]), b3 = g3(x[1]);
  const double c = amp * std::cos(t), s = amp * std::sin(t);
  const double u1 = c * a0 * b1, u2 = -c * a1 * b0;
  const double du1_dt = -s * a0 * b1, du2_dt = s * a1 * b0;
  const double du1_dx = c * a1 * b1, du1_dy = c * a0 * b2;
  const double du2_dx = -c * a2 * b0, du2_dy = -c * a1 * b1;
  const double lap1 = c * (a2 * b1 + a0 * b3);
  const double lap2 = -c * (a3 * b0 + a1 * b2);
  const double dp_dx = kPi * std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
  const double dp_dy = -kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
  return {rho * (du1_dt + u1 * du1_dx + u2 * du1_dy) - 0.5 * mu * lap1 + dp_dx,
          rho * (du2_dt + u1 * du2_dx + u2 * du2_dy) - 0.5 * mu * lap2 + dp_dy, 0.0};
}

}  // namespace mms_a

// Registry -----------------------------------------------------------------------

std::vector<std::string> problem_names() {
  std::vector<std::string> out;
  for (const auto& [name, defaults] : registry()) out.push_back(name);
  return out;
}

ParameterMap problem_defaults(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown problem '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

FlowProblem make_problem(const std::string& name, const ParameterMap& params, const Box& box,
                         const ViscosityModel& viscosity, const Vec3& gravity) {
  ParameterMap p = problem_defaults(name);
  for (const auto& [key, v] : params) {
    require(p.count(key) == 1, "unknown parameter '" + key + "' for problem '" + name + "'");
    require(std::isfinite(v), "parameter '" + key + "' must be finite");
    p[key] = v;
  }
  viscosity.validate();
  require(box.dim == 2, "built-in problems are two-dimensional");
  for (int a = 0; a < box.dim; ++a) require(box.upper[a] > box.lower[a], "domain upper bound must exceed lower bound");

  FlowProblem fp;
  fp.name = name;
  fp.mu = viscosity.law();
  fp.forcing.gravity = gravity;
  double rho_lo = 0.0, rho_hi = 0.0;

  if (name == "quiescent") {
    const double rho = p["rho"];
    require(rho > 0.0, "rho must be positive");
    fp.rho0 = [rho](const Vec3&) { return rho; };
    fp.u0 = [](const Vec3&) { return Vec3{}; };
    rho_lo = rho_hi = rho;
  } else if (name == "mms-a") {
    require(is_unit_square(box), "mms-a is defined on the unit square");
    require(viscosity.kind == ViscosityModel::Kind::kConstant, "mms-a needs a constant viscosity law");
    const double rho = p["rho"], amp = p["amplitude"], mu = viscosity.value;
    require(rho > 0.0, "rho must be positive");
    fp.rho0 = [rho](const Vec3&) { return rho; };
    fp.u0 = [amp](const Vec3& x) { return mms_a::velocity(amp, 0.0, x); };
    fp.forcing.body = [amp, rho, mu](double t, const Vec3& x) { return mms_a::forcing(amp, rho, mu, t, x); };
    ExactSolution ex;
    ex.u = [amp](double t, const Vec3& x) { return mms_a::velocity(amp, t, x); };
    ex.p = mms_a::pressure;
    ex.rho = [rho](double, const Vec3&) { return rho; };
    fp.exact = ex;
    rho_lo = rho_hi = rho;
  } else if (name == "mms-b") {
    const double in = p["rho_in"], out = p["rho_out"], r = p["radius"], cx = p["center_x"], cy = p["center_y"];
    const double amp = p["amplitude"], force = p["forcing"];
    require(in > 0.0 && out > 0.0, "densities must be positive");
    require(r > 0.0, "radius must be positive");
    fp.rho0 = [=](const Vec3& x) {
      const double xi = (x[0] - box.lower[0]) / (box.upper[0] - box.lower[0]) - cx;
      const double zeta = (x[1] - box.lower[1]) / (box.upper[1] - box.lower[1]) - cy;
      return xi * xi + zeta * zeta < r * r ? in : out;
    };
    fp.u0 = [=](const Vec3& x) { return box_vortex(box, amp, x); };
    if (force != 0.0) {
      // Divergence-free swirl, curl of sin^2(pi xi) sin^2(pi zeta), fading as cos t.
      fp.forcing.body = [=](double t, const Vec3& x) {
        const double lx = box.upper[0] - box.lower[0], ly = box.upper[1] - box.lower[1];
        const double xi = (x[0] - box.lower[0]) / lx, zeta = (x[1] - box.lower[1]) / ly;
        const double c = force * std::cos(t);
        const double sx = std::sin(kPi * xi), sy = std::sin(kPi * zeta);
        return Vec3{c * kPi / ly * sx * sx * std::sin(2 * kPi * zeta), -c * kPi / lx * std::sin(2 * kPi * xi) * sy * sy,
                    0.0};
      };
    }
    rho_lo = std::min(in, out);
    rho_hi = std::max(in, out);
  } else if (name == "rayleigh-taylor") {
    const double heavy = p["rho_heavy"], light = p["rho_light"], w = p["width"], pert = p["perturbation"];
    const double amp = p["amplitude"];
    require(heavy > 0.0 && light > 0.0, "densities must be positive");
    require(w > 0.0, "width must be positive");
    fp.rho0 = [=](const Vec3& x) {
      const double lx = box.upper[0] - box.lower[0];
      const double y0 = 0.5 * (box.lower[1] + box.upper[1]) + pert * std::cos(2 * kPi * (x[0] - box.lower[0]) / lx);
      return light + (heavy - light) * 0.5 * (1.0 + std::tanh((x[1] - y0) / w));
    };
    fp.u0 = [=](const Vec3& x) { return box_vortex(box, amp, x); };
    rho_lo = std::min(heavy, light);
    rho_hi = std::max(heavy, light);
  }
  const auto [lo, hi] = viscosity.bounds(rho_lo, rho_hi);
  require(lo > 0.0, "viscosity law must be positive over the density range");
  fp.mu_min = lo;
  fp.mu_max = hi;
  return fp;
}

}  // namespace macflow
