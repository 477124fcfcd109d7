#include "macflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace macflow {

AxisPartition AxisPartition::uniform(double lo, double hi, int cells) {
  return stretched(lo, hi, cells, 1.0);
}

AxisPartition AxisPartition::stretched(double lo, double hi, int cells, double ratio) {
  if (cells < 1) throw std::invalid_argument("axis partition needs at least one cell");
  if (!(hi > lo)) throw std::invalid_argument("axis partition needs hi > lo");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw std::invalid_argument("stretch ratio must be positive and finite");
  }
  AxisPartition p;
  p.breakpoints.resize(cells + 1);
  const double q = cells > 1 ? std::pow(ratio, 1.0 / (cells - 1)) : 1.0;
  double total = 0.0;
  double w = 1.0;
  for (int k = 0; k < cells; ++k) {
    total += w;
    w *= q;
  }
  p.breakpoints[0] = lo;
  w = (hi - lo) / total;
  for (int k = 0; k < cells; ++k) {
    p.breakpoints[k + 1] = p.breakpoints[k] + w;
    w *= q;
  }
  p.breakpoints[cells] = hi;
  return p;
}

MacMesh::MacMesh(std::span<const AxisPartition> partitions) {
  dim_ = static_cast<int>(partitions.size());
  if (dim_ != 2 && dim_ != 3) {
    throw std::invalid_argument("mesh dimension must be 2 or 3, got " + std::to_string(dim_));
  }
  for (int a = 0; a < kMaxDim; ++a) {
    if (a < dim_) {
      const auto& bp = partitions[a].breakpoints;
      if (bp.size() < 2) {
        throw std::invalid_argument("axis " + std::to_string(a) + ": need at least two breakpoints");
      }
      for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        if (!(bp[k + 1] > bp[k]) || !std::isfinite(bp[k]) || !std::isfinite(bp[k + 1])) {
          throw std::invalid_argument("axis " + std::to_string(a) +
                                      ": breakpoints must be finite and strictly increasing (index " +
                                      std::to_string(k + 1) + ")");
        }
      }
      nodes_[a] = bp;
    } else {
      nodes_[a] = {0.0, 1.0};
    }
    n_[a] = static_cast<int>(nodes_[a].size()) - 1;
    centers_[a].resize(n_[a]);
    for (int k = 0; k < n_[a]; ++k) centers_[a][k] = 0.5 * (nodes_[a][k] + nodes_[a][k + 1]);
  }

  auto width = [&](int axis, int k) { return nodes_[axis][k + 1] - nodes_[axis][k]; };

  // Primal cells.
  const Index3 cshape = n_;
  cells_.resize(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]);
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const Index3 m = multi_index(static_cast<int>(k), cshape);
    CellInfo& c = cells_[k];
    c.volume = 1.0;
    for (int a = 0; a < dim_; ++a) {
      c.width[a] = width(a, m[a]);
      c.center[a] = centers_[a][m[a]];
      c.volume *= c.width[a];
    }
    for (int i = 0; i < dim_; ++i) {
      Index3 f = m;
      c.faces[i][0] = linear_index(f, face_shape(i));
      f[i] += 1;
      c.faces[i][1] = linear_index(f, face_shape(i));
    }
  }

  // Faces and their dual cells.
  for (int i = 0; i < dim_; ++i) {
    const Index3 fshape = face_shape(i);
    auto& faces = faces_[i];
    faces.resize(static_cast<std::size_t>(fshape[0]) * fshape[1] * fshape[2]);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const Index3 m = multi_index(static_cast<int>(s), fshape);
      FaceInfo& f = faces[s];
      const int a = m[i];
      f.area = 1.0;
      for (int k = 0; k < dim_; ++k) {
        if (k == i) continue;
        f.area *= width(k, m[k]);
        f.center[k] = centers_[k][m[k]];
      }
      f.center[i] = nodes_[i][a];
      if (a > 0) {
        Index3 c = m;
        c[i] = a - 1;
        f.lo_cell = cell_id(c);
        f.half_lo = 0.5 * cells_[f.lo_cell].volume;
      }
      if (a < n_[i]) {
        f.hi_cell = cell_id(m);
        f.half_hi = 0.5 * cells_[f.hi_cell].volume;
      }
      f.dual_volume = f.half_lo + f.half_hi;
      f.interior = f.lo_cell >= 0 && f.hi_cell >= 0;

      // Parallel dual faces sit at the centres of the adjacent cells.
      if (f.lo_cell >= 0) f.dual[f.dual_count++] = {i, f.lo_cell, -1};
      if (f.hi_cell >= 0) f.dual[f.dual_count++] = {i, f.hi_cell, +1};
      // Transverse dual faces sit on the primal grid lines along e_j.
      for (int j = 0; j < dim_; ++j) {
        if (j == i) continue;
        const Index3 dshape = dual_shape(i, j);
        Index3 q = m;
        f.dual[f.dual_count++] = {j, linear_index(q, dshape), -1};
        q[j] += 1;
        f.dual[f.dual_count++] = {j, linear_index(q, dshape), +1};
      }
    }
  }

  // Dual-dual partitions.
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      const Index3 dshape = dual_shape(i, j);
      const Index3 fshape = face_shape(i);
      auto& duals = dual_[i * kMaxDim + j];
      duals.resize(static_cast<std::size_t>(dshape[0]) * dshape[1] * dshape[2]);
      for (std::size_t t = 0; t < duals.size(); ++t) {
        const Index3 q = multi_index(static_cast<int>(t), dshape);
        DualFaceInfo& d = duals[t];
        if (i == j) {
          const CellInfo& c = cells_[t];
          d.kind = DualCase::kParallel;
          d.cell = static_cast<int>(t);
          d.lo_face = c.faces[i][0];
          d.hi_face = c.faces[i][1];
          d.volume = c.volume;
          d.dist = c.width[i];
          d.area = c.volume / c.width[i];
          d.center = c.center;
          d.interior = true;
          d.cells[0] = d.cell;
          d.overlap[0] = c.volume;
          d.cell_count = 1;
          continue;
        }
        d.kind = DualCase::kTransverse;
        double volume = 1.0;
        double extent_j = 0.0;
        for (int k = 0; k < dim_; ++k) {
          if (k == i || k == j) {
            const auto [lo, hi] = node_extent(k, q[k]);
            volume *= hi - lo;
            d.center[k] = nodes_[k][q[k]];
            if (k == j) extent_j = hi - lo;
          } else {
            volume *= width(k, q[k]);
            d.center[k] = centers_[k][q[k]];
          }
        }
        d.volume = volume;
        d.dist = extent_j;
        d.area = volume / extent_j;
        if (q[j] > 0) {
          Index3 f = q;
          f[j] -= 1;
          d.lo_face = linear_index(f, fshape);
        }
        if (q[j] < n_[j]) d.hi_face = linear_index(q, fshape);
        d.interior = d.lo_face >= 0 && d.hi_face >= 0;

        const Index3 tshape = face_shape(j);
        if (q[i] > 0) {
          Index3 f = q;
          f[i] -= 1;
          d.tau_lo = linear_index(f, tshape);
        }
        if (q[i] < n_[i]) d.tau_hi = linear_index(q, tshape);

        // Overlapping primal cells: quarter cells around the (i, j) edge.
        for (int di = -1; di <= 0; ++di) {
          for (int dj = -1; dj <= 0; ++dj) {
            Index3 c = q;
            c[i] += di;
            c[j] += dj;
            if (c[i] < 0 || c[i] >= n_[i] || c[j] < 0 || c[j] >= n_[j]) continue;
            const int id = cell_id(c);
            d.cells[d.cell_count] = id;
            d.overlap[d.cell_count] = 0.25 * cells_[id].volume;
            ++d.cell_count;
          }
        }
      }
    }
  }
}

Index3 MacMesh::face_shape(int i) const {
  Index3 s = n_;
  s[i] += 1;
  return s;
}

Index3 MacMesh::dual_shape(int i, int j) const {
  Index3 s = n_;
  if (i != j) {
    s[i] += 1;
    s[j] += 1;
  }
  return s;
}

std::array<double, 2> MacMesh::node_extent(int axis, int a) const {
  const double lo = a == 0 ? nodes_[axis][0] : centers_[axis][a - 1];
  const double hi = a == n_[axis] ? nodes_[axis][n_[axis]] : centers_[axis][a];
  return {lo, hi};
}

Vec3 MacMesh::lower() const {
  Vec3 v{};
  for (int a = 0; a < dim_; ++a) v[a] = nodes_[a].front();
  return v;
}

Vec3 MacMesh::upper() const {
  Vec3 v{};
  for (int a = 0; a < dim_; ++a) v[a] = nodes_[a].back();
  return v;
}

double MacMesh::domain_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= nodes_[a].back() - nodes_[a].front();
  return v;
}

double MacMesh::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double l = nodes_[a].back() - nodes_[a].front();
    s += l * l;
  }
  return std::sqrt(s);
}

int MacMesh::cell_id(const Index3& m) const { return linear_index(m, n_); }
Index3 MacMesh::cell_index(int k) const { return multi_index(k, n_); }
int MacMesh::face_id(int i, const Index3& m) const { return linear_index(m, face_shape(i)); }
Index3 MacMesh::face_index(int i, int s) const { return multi_index(s, face_shape(i)); }

std::span<const DualRef> MacMesh::dual_faces_of(int i, int s) const {
  if (i < 0 || i >= dim_ || s < 0 || static_cast<std::size_t>(s) >= faces_[i].size()) {
    throw std::out_of_range("unknown face (" + std::to_string(i) + ", " + std::to_string(s) + ")");
  }
  const FaceInfo& f = faces_[i][s];
  return {f.dual.data(), static_cast<std::size_t>(f.dual_count)};
}

MacMesh build_mesh(std::span<const AxisPartition> partitions) { return MacMesh(partitions); }

MeshMetrics mesh_metrics(const MacMesh& mesh) {
  MeshMetrics m;
  std::array<double, kMaxDim> amax{}, amin{};
  for (int i = 0; i < mesh.dim(); ++i) {
    amax[i] = 0.0;
    amin[i] = std::numeric_limits<double>::infinity();
    for (const FaceInfo& f : mesh.faces(i)) {
      amax[i] = std::max(amax[i], f.area);
      amin[i] = std::min(amin[i], f.area);
    }
  }
  m.eta = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      if (i != j) m.eta = std::max(m.eta, amax[i] / amin[j]);
    }
  }
  for (const CellInfo& c : mesh.cells()) {
    double s = 0.0;
    for (int a = 0; a < mesh.dim(); ++a) s += c.width[a] * c.width[a];
    m.h = std::max(m.h, std::sqrt(s));
  }
  return m;
}

MacMesh unit_square_mesh(int nx, int ny, double stretch) {
  const std::array<AxisPartition, 2> axes{AxisPartition::stretched(0.0, 1.0, nx, stretch),
                                          AxisPartition::stretched(0.0, 1.0, ny, stretch)};
  return MacMesh(axes);
}

}  // namespace macflow
