#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <iosfwd>
#include <vector>

#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"
#include "macflow/operators.hpp"

namespace macflow {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Numbering of velocity unknowns. id[i][s] is the row/column of face s of
/// E^(i), or -1 when that face carries no unknown.
struct DofMap {
  std::array<std::vector<int>, kMaxDim> id;
  int size = 0;

  /// Every face of every direction, direction-major.
  static DofMap all_faces(const MacMesh& mesh);
  /// Interior faces only (boundary values are the Dirichlet zeros).
  static DofMap interior_faces(const MacMesh& mesh);

  Eigen::VectorXd gather(const VelocityField& u) const;
  /// Faces without an unknown are set to zero.
  VelocityField scatter(const MacMesh& mesh, const Eigen::VectorXd& x) const;
};

Eigen::VectorXd to_vector(const CellScalarField& q);
CellScalarField to_cells(const Eigen::VectorXd& x);

// Triplet generators. Every generator emits the same (row, col) positions
// for a given mesh and scheme regardless of the field values, so matrices
// rebuilt from new data keep their sparsity pattern. `integrated` multiplies
// each row by the control-volume measure (|K| or |D_sigma|); `scale`
// multiplies every entry. Rows and columns with id -1 are skipped, which for
// columns means the unknown is fixed at zero.

void append_divergence(const MacMesh& mesh, const DofMap& cols, int row_offset, bool integrated, double scale,
                       Triplets& out);
void append_gradient(const MacMesh& mesh, const DofMap& rows, int col_offset, bool integrated, double scale,
                     Triplets& out);
void append_diffusion(const MacMesh& mesh, const ViscosityTensorField& mu, const DofMap& dofs, bool integrated,
                      double scale, Triplets& out);
void append_convection(const MacMesh& mesh, const MassFluxSet& fluxes, AdvectionScheme scheme,
                       const DofMap& dofs, bool integrated, double scale, Triplets& out);
/// Diagonal term coeff[i][s] on each mapped face (times |D_sigma| if integrated).
void append_face_diagonal(const MacMesh& mesh, const FaceField& coeff, const DofMap& dofs, bool integrated,
                          double scale, Triplets& out);

// Assembled operators on the all-faces numbering, matching the matrix-free
// kernels row for row.

SparseMatrix divergence_matrix(const MacMesh& mesh);
SparseMatrix gradient_matrix(const MacMesh& mesh);
SparseMatrix diffusion_matrix(const MacMesh& mesh, const ViscosityTensorField& mu);
/// Diffusion on an arbitrary numbering. On the interior numbering with
/// integrated rows this is the (symmetric) viscous block of the momentum system.
SparseMatrix diffusion_matrix(const MacMesh& mesh, const ViscosityTensorField& mu, const DofMap& dofs,
                              bool integrated);
SparseMatrix convection_matrix(const MacMesh& mesh, const MassFluxSet& fluxes, AdvectionScheme scheme);
/// diag(|D_sigma|) on the all-faces numbering.
SparseMatrix face_mass_matrix(const MacMesh& mesh);

/// Implicit upwind transport, integrated over the cells:
/// (|K|/dt) rho_K + sum_sigma |sigma| rho_sigma u_{K,sigma}.
SparseMatrix transport_matrix(const MacMesh& mesh, const VelocityField& u, double dt);

/// Coordinate text dump, one "row col value" line per stored entry.
void write_coo(std::ostream& os, const SparseMatrix& a);

}  // namespace macflow
