#pragma once

#include <random>

#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"

namespace testing_support {

using namespace macflow;

inline MacMesh mesh_from(std::vector<double> x, std::vector<double> y) {
  const std::array<AxisPartition, 2> axes{AxisPartition{std::move(x)}, AxisPartition{std::move(y)}};
  return MacMesh(axes);
}

/// 3x3 grid with unequal widths along both axes.
inline MacMesh nonuniform_3x3() { return mesh_from({0.0, 0.2, 0.55, 1.0}, {0.0, 0.4, 0.7, 1.0}); }

inline CellScalarField random_cells(const MacMesh& m, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  CellScalarField q = CellScalarField::zeros(m);
  for (auto& v : q.values) v = d(rng);
  return q;
}

inline VelocityField random_velocity(const MacMesh& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VelocityField u = VelocityField::zeros(m);
  for (int i = 0; i < m.dim(); ++i) {
    for (auto& v : u.comp[i]) v = d(rng);
  }
  u.apply_dirichlet(m);
  return u;
}

/// Discretely divergence-free velocity from random stream-function values on
/// the interior nodes of a 2D mesh: |sigma| u_sigma is the jump of psi along
/// the face, so every cell balance telescopes to zero.
inline VelocityField stream_velocity(const MacMesh& m, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  const int nx = m.cells_along(0), ny = m.cells_along(1);
  std::vector<double> psi((nx + 1) * (ny + 1), 0.0);
  for (int b = 1; b < ny; ++b) {
    for (int a = 1; a < nx; ++a) psi[a + (nx + 1) * b] = d(rng);
  }
  auto at = [&](int a, int b) { return psi[a + (nx + 1) * b]; };
  VelocityField u = VelocityField::zeros(m);
  for (std::size_t s = 0; s < m.num_faces(0); ++s) {
    const Index3 f = m.face_index(0, static_cast<int>(s));
    u.comp[0][s] = (at(f[0], f[1] + 1) - at(f[0], f[1])) / m.face(0, static_cast<int>(s)).area;
  }
  for (std::size_t s = 0; s < m.num_faces(1); ++s) {
    const Index3 f = m.face_index(1, static_cast<int>(s));
    u.comp[1][s] = -(at(f[0] + 1, f[1]) - at(f[0], f[1])) / m.face(1, static_cast<int>(s)).area;
  }
  return u;
}

inline double max_abs_diff(const VelocityField& a, const VelocityField& b) {
  double e = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    for (std::size_t s = 0; s < a.comp[i].size(); ++s) e = std::max(e, std::abs(a.comp[i][s] - b.comp[i][s]));
  }
  return e;
}

inline double max_abs_diff(const CellScalarField& a, const CellScalarField& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

}  // namespace testing_support
