#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace macflow {

inline constexpr int kMaxDim = 3;

using Index3 = std::array<int, kMaxDim>;
using Vec3 = std::array<double, kMaxDim>;

/// Breakpoints of one axis of the tensor-product grid.
struct AxisPartition {
  std::vector<double> breakpoints;

  static AxisPartition uniform(double lo, double hi, int cells);

  /// Geometric grading with widths growing by a constant factor so that
  /// (largest width) / (smallest width) == ratio. ratio == 1 is uniform.
  static AxisPartition stretched(double lo, double hi, int cells, double ratio);

  int cells() const { return static_cast<int>(breakpoints.size()) - 1; }
};

/// Which of the two dual-face configurations a dual-dual cell belongs to.
enum class DualCase { kParallel, kTransverse };

/// A dual face seen from one velocity control volume D_sigma.
struct DualRef {
  int j = 0;      // normal direction of the dual face
  int id = -1;    // index into the (i, j) dual-dual set
  int sign = 0;   // n_{sigma, dual} . e_j
};

struct CellInfo {
  double volume = 0.0;
  Vec3 center{};
  Vec3 width{};
  // faces[i] = {lower face, upper face} in E^(i)
  std::array<std::array<int, 2>, kMaxDim> faces{};
};

struct FaceInfo {
  int lo_cell = -1;  // cell on the -e_i side, -1 on the boundary
  int hi_cell = -1;  // cell on the +e_i side, -1 on the boundary
  double area = 0.0;
  double dual_volume = 0.0;  // |D_sigma|
  double half_lo = 0.0;      // |D_{lo,sigma}|
  double half_hi = 0.0;      // |D_{hi,sigma}|
  Vec3 center{};
  bool interior = false;
  std::array<DualRef, 2 * kMaxDim> dual{};
  int dual_count = 0;
};

/// Dual-dual cell D_dual of the (i, j) partition together with its face.
///
/// The face separates D_lo (below, along e_j) from D_hi. Either side is -1
/// when the dual face lies on the domain boundary.
struct DualFaceInfo {
  int lo_face = -1;  // in E^(i)
  int hi_face = -1;  // in E^(i)
  double area = 0.0;    // |dual face|
  double dist = 0.0;    // d_dual, extent of D_dual along e_j
  double volume = 0.0;  // |D_dual|
  Vec3 center{};
  bool interior = false;
  DualCase kind = DualCase::kParallel;
  int cell = -1;  // enclosing primal cell (parallel case)
  // Transverse case: primal faces of E^(j) whose halves make up the dual
  // face, taken from the cells below and above along e_i.
  int tau_lo = -1;
  int tau_hi = -1;
  // Primal cells overlapping D_dual and the overlap measures.
  std::array<int, 4> cells{-1, -1, -1, -1};
  std::array<double, 4> overlap{};
  int cell_count = 0;
};

struct MeshMetrics {
  double eta = 1.0;  // max |sigma| / |sigma'| over faces of different directions
  double h = 0.0;    // max cell diameter
};

/// Staggered MAC grid on a box: primal cells, d face sets, their dual
/// cells, and the d*d dual-dual partitions. Immutable once built.
class MacMesh {
 public:
  explicit MacMesh(std::span<const AxisPartition> partitions);

  int dim() const { return dim_; }
  int cells_along(int axis) const { return n_[axis]; }
  const std::vector<double>& nodes(int axis) const { return nodes_[axis]; }
  const std::vector<double>& centers(int axis) const { return centers_[axis]; }
  Vec3 lower() const;
  Vec3 upper() const;
  double domain_volume() const;
  double diameter() const;

  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_faces(int i) const { return faces_[i].size(); }
  std::size_t num_dual(int i, int j) const { return dual_[i * kMaxDim + j].size(); }

  const CellInfo& cell(int k) const { return cells_[k]; }
  const FaceInfo& face(int i, int s) const { return faces_[i][s]; }
  const DualFaceInfo& dual(int i, int j, int t) const { return dual_[i * kMaxDim + j][t]; }

  std::span<const CellInfo> cells() const { return cells_; }
  std::span<const FaceInfo> faces(int i) const { return faces_[i]; }
  std::span<const DualFaceInfo> duals(int i, int j) const { return dual_[i * kMaxDim + j]; }

  int cell_id(const Index3& m) const;
  Index3 cell_index(int k) const;
  int face_id(int i, const Index3& m) const;
  Index3 face_index(int i, int s) const;

  /// Dual faces bounding D_sigma for sigma in E^(i). Throws std::out_of_range
  /// for an unknown face id.
  std::span<const DualRef> dual_faces_of(int i, int s) const;

 private:
  Index3 face_shape(int i) const;
  Index3 dual_shape(int i, int j) const;
  // Extent [lo, hi] of the staggered interval around node a of an axis.
  std::array<double, 2> node_extent(int axis, int a) const;

  int dim_ = 2;
  Index3 n_{1, 1, 1};
  std::array<std::vector<double>, kMaxDim> nodes_;
  std::array<std::vector<double>, kMaxDim> centers_;
  std::vector<CellInfo> cells_;
  std::array<std::vector<FaceInfo>, kMaxDim> faces_;
  std::array<std::vector<DualFaceInfo>, kMaxDim * kMaxDim> dual_;
};

MacMesh build_mesh(std::span<const AxisPartition> partitions);
MeshMetrics mesh_metrics(const MacMesh& mesh);

/// Convenience: uniform (or graded) grid on [0, 1]^d.
MacMesh unit_square_mesh(int nx, int ny, double stretch = 1.0);

/// Lexicographic id within a box of the given shape (axis 0 fastest).
inline int linear_index(const Index3& m, const Index3& shape) {
  return m[0] + shape[0] * (m[1] + shape[1] * m[2]);
}

inline Index3 multi_index(int id, const Index3& shape) {
  Index3 m{};
  m[0] = id % shape[0];
  id /= shape[0];
  m[1] = id % shape[1];
  m[2] = id / shape[1];
  return m;
}

}  // namespace macflow
