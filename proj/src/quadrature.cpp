#include "macflow/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace macflow {

GaussRule gauss_legendre(int order) {
  if (order < 1 || order > 64) {
    throw std::invalid_argument("Gauss-Legendre order must lie in [1, 64], got " + std::to_string(order));
  }
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int k = 0; k < (order + 1) / 2; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= order; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      const double pn = order == 1 ? x : p1;
      const double pnm1 = order == 1 ? 1.0 : p0;
      dp = order * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[k] = -x;
    rule.nodes[order - 1 - k] = x;
    rule.weights[k] = w;
    rule.weights[order - 1 - k] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

double box_average(const std::function<double(const Vec3&)>& f, const Vec3& lo, const Vec3& hi,
                   int dim, const GaussRule& rule) {
  const int q = static_cast<int>(rule.nodes.size());
  std::array<int, kMaxDim> count{1, 1, 1};
  for (int a = 0; a < dim; ++a) count[a] = hi[a] > lo[a] ? q : 1;
  double sum = 0.0;
  double wsum = 0.0;
  Vec3 x{};
  for (int k2 = 0; k2 < count[2]; ++k2) {
    for (int k1 = 0; k1 < count[1]; ++k1) {
      for (int k0 = 0; k0 < count[0]; ++k0) {
        const std::array<int, kMaxDim> k{k0, k1, k2};
        double w = 1.0;
        for (int a = 0; a < kMaxDim; ++a) {
          if (a >= dim) {
            x[a] = 0.0;
          } else if (count[a] == 1) {
            x[a] = lo[a];
          } else {
            x[a] = 0.5 * (lo[a] + hi[a]) + 0.5 * (hi[a] - lo[a]) * rule.nodes[k[a]];
            w *= 0.5 * rule.weights[k[a]];
          }
        }
        const double v = f(x);
        if (!std::isfinite(v)) {
          throw QuadratureError("non-finite sample at (" + std::to_string(x[0]) + ", " +
                                std::to_string(x[1]) + ", " + std::to_string(x[2]) + ")");
        }
        sum += w * v;
        wsum += w;
      }
    }
  }
  return sum / wsum;
}

}  // namespace macflow
