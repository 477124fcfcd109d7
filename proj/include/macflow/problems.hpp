#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "macflow/mesh.hpp"
#include "macflow/simulation.hpp"

namespace macflow {

/// mu(rho) laws selectable from a configuration.
struct ViscosityModel {
  enum class Kind { kConstant, kLinear, kTable };

  Kind kind = Kind::kConstant;
  double value = 1.0;        // constant
  double a = 0.0, b = 0.0;   // linear: a + b rho
  std::vector<double> rho;   // table nodes, strictly increasing
  std::vector<double> mu;    // table values; clamped outside the nodes

  static ViscosityModel constant(double v);
  static ViscosityModel linear(double a, double b);
  static ViscosityModel table(std::vector<double> rho, std::vector<double> mu);

  /// Throws std::invalid_argument on malformed parameters.
  void validate() const;
  double operator()(double r) const;
  ViscosityLaw law() const;
  /// Exact min and max of the law over [lo, hi].
  std::pair<double, double> bounds(double lo, double hi) const;
};

struct Box {
  int dim = 2;
  Vec3 lower{0.0, 0.0, 0.0};
  Vec3 upper{1.0, 1.0, 1.0};
};

using ParameterMap = std::map<std::string, double>;

/// Names of the built-in problems.
std::vector<std::string> problem_names();

/// Parameters accepted by a problem, with their defaults. Throws
/// std::invalid_argument for an unknown name.
ParameterMap problem_defaults(const std::string& name);

/// Builds a named problem. Missing parameters take their defaults; unknown
/// ones, an unsuitable domain or an unsupported viscosity law throw
/// std::invalid_argument.
FlowProblem make_problem(const std::string& name, const ParameterMap& params, const Box& box,
                         const ViscosityModel& viscosity, const Vec3& gravity);

// Manufactured solution on the unit square with constant density and
// viscosity: psi = A x^2 (1-x)^2 y^2 (1-y)^2 cos t, u = (d_y psi, -d_x psi),
// p = sin(pi x) cos(pi y).
namespace mms_a {
Vec3 velocity(double amplitude, double t, const Vec3& x);
double pressure(double t, const Vec3& x);
/// rho (u_t + u . grad u) - mu/2 lap u + grad p.
Vec3 forcing(double amplitude, double rho, double mu, double t, const Vec3& x);
}  // namespace mms_a

}  // namespace macflow
