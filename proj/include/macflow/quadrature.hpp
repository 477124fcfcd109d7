#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "macflow/mesh.hpp"

namespace macflow {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre rule on [-1, 1] with `order` points.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

/// Tensor-product Gauss average of f over the axis-aligned box [lo, hi].
/// Axes with lo[a] == hi[a] are treated as degenerate (face averages).
/// Throws QuadratureError if any sample is non-finite.
double box_average(const std::function<double(const Vec3&)>& f, const Vec3& lo, const Vec3& hi,
                   int dim, const GaussRule& rule);

}  // namespace macflow
