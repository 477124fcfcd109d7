#include "macflow/assembly.hpp"

#include <iomanip>
#include <ostream>

namespace macflow {

DofMap DofMap::all_faces(const MacMesh& mesh) {
  DofMap m;
  for (int i = 0; i < mesh.dim(); ++i) {
    m.id[i].resize(mesh.num_faces(i));
    for (auto& v : m.id[i]) v = m.size++;
  }
  return m;
}

DofMap DofMap::interior_faces(const MacMesh& mesh) {
  DofMap m;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    m.id[i].assign(faces.size(), -1);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (faces[s].interior) m.id[i][s] = m.size++;
    }
  }
  return m;
}

Eigen::VectorXd DofMap::gather(const VelocityField& u) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size);
  for (int i = 0; i < u.dim; ++i) {
    for (std::size_t s = 0; s < id[i].size(); ++s) {
      if (id[i][s] >= 0) x[id[i][s]] = u.comp[i][s];
    }
  }
  return x;
}

VelocityField DofMap::scatter(const MacMesh& mesh, const Eigen::VectorXd& x) const {
  VelocityField u = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (std::size_t s = 0; s < id[i].size(); ++s) {
      if (id[i][s] >= 0) u.comp[i][s] = x[id[i][s]];
    }
  }
  return u;
}

Eigen::VectorXd to_vector(const CellScalarField& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.values.data(), static_cast<Eigen::Index>(q.size()));
}

CellScalarField to_cells(const Eigen::VectorXd& x) { return {std::vector<double>(x.data(), x.data() + x.size())}; }

void append_divergence(const MacMesh& mesh, const DofMap& cols, int row_offset, bool integrated, double scale,
                       Triplets& out) {
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    const double w = scale / (integrated ? 1.0 : c.volume);
    for (int i = 0; i < mesh.dim(); ++i) {
      for (int side = 0; side < 2; ++side) {
        const int s = c.faces[i][side];
        const int col = cols.id[i][s];
        if (col < 0) continue;
        const double sgn = side == 1 ? 1.0 : -1.0;
        out.emplace_back(row_offset + static_cast<int>(k), col, sgn * w * mesh.face(i, s).area);
      }
    }
  }
}

void append_gradient(const MacMesh& mesh, const DofMap& rows, int col_offset, bool integrated, double scale,
                     Triplets& out) {
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      const int row = rows.id[i][s];
      if (row < 0 || !f.interior) continue;
      const double w = scale * f.area / (integrated ? 1.0 : f.dual_volume);
      out.emplace_back(row, col_offset + f.lo_cell, -w);
      out.emplace_back(row, col_offset + f.hi_cell, w);
    }
  }
}

void append_diffusion(const MacMesh& mesh, const ViscosityTensorField& mu, const DofMap& dofs, bool integrated,
                      double scale, Triplets& out) {
  auto emit = [&](int row, int dir, int face, double v) {
    if (face < 0) return;
    const int col = dofs.id[dir][face];
    if (col >= 0) out.emplace_back(row, col, v);
  };
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      const int row = dofs.id[i][s];
      if (row < 0 || !f.interior) continue;
      const double w = scale / (integrated ? 1.0 : f.dual_volume);
      for (int k = 0; k < f.dual_count; ++k) {
        const DualRef& r = f.dual[k];
        const int j = r.j;
        const DualFaceInfo& d = mesh.dual(i, j, r.id);
        const double c = w * r.sign * d.area * mu.dual(i, j)[r.id];
        if (i == j) {
          emit(row, i, d.hi_face, c / d.dist);
          emit(row, i, d.lo_face, -c / d.dist);
        } else {
          const DualFaceInfo& e = mesh.dual(j, i, r.id);
          emit(row, i, d.hi_face, 0.5 * c / d.dist);
          emit(row, i, d.lo_face, -0.5 * c / d.dist);
          emit(row, j, e.hi_face, 0.5 * c / e.dist);
          emit(row, j, e.lo_face, -0.5 * c / e.dist);
        }
      }
    }
  }
}

void append_convection(const MacMesh& mesh, const MassFluxSet& fs, AdvectionScheme scheme, const DofMap& dofs,
                       bool integrated, double scale, Triplets& out) {
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      const int row = dofs.id[i][s];
      if (row < 0 || !f.interior) continue;
      const double w = scale / (integrated ? 1.0 : f.dual_volume);
      for (int k = 0; k < f.dual_count; ++k) {
        const DualRef& r = f.dual[k];
        const DualFaceInfo& d = mesh.dual(i, r.j, r.id);
        const double flux = w * r.sign * fs.dual(i, r.j)[r.id];
        const int other = r.sign > 0 ? d.hi_face : d.lo_face;
        const int other_col = other >= 0 ? dofs.id[i][other] : -1;
        double own_coef, other_coef;
        if (scheme == AdvectionScheme::kCentered) {
          own_coef = other_coef = 0.5 * flux;
        } else {
          own_coef = flux >= 0.0 ? flux : 0.0;
          other_coef = flux >= 0.0 ? 0.0 : flux;
        }
        const int own_col = dofs.id[i][s];
        if (own_col >= 0) out.emplace_back(row, own_col, own_coef);
        if (other_col >= 0) out.emplace_back(row, other_col, other_coef);
      }
    }
  }
}

void append_face_diagonal(const MacMesh& mesh, const FaceField& coeff, const DofMap& dofs, bool integrated,
                          double scale, Triplets& out) {
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const int row = dofs.id[i][s];
      if (row < 0) continue;
      const double w = integrated ? faces[s].dual_volume : 1.0;
      out.emplace_back(row, row, scale * w * coeff.comp[i][s]);
    }
  }
}

namespace {

SparseMatrix build(int rows, int cols, const Triplets& t) {
  SparseMatrix a(rows, cols);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

}  // namespace

SparseMatrix divergence_matrix(const MacMesh& mesh) {
  const DofMap dofs = DofMap::all_faces(mesh);
  Triplets t;
  append_divergence(mesh, dofs, 0, false, 1.0, t);
  return build(static_cast<int>(mesh.num_cells()), dofs.size, t);
}

SparseMatrix gradient_matrix(const MacMesh& mesh) {
  const DofMap dofs = DofMap::all_faces(mesh);
  Triplets t;
  append_gradient(mesh, dofs, 0, false, 1.0, t);
  return build(dofs.size, static_cast<int>(mesh.num_cells()), t);
}

SparseMatrix diffusion_matrix(const MacMesh& mesh, const ViscosityTensorField& mu) {
  const DofMap dofs = DofMap::all_faces(mesh);
  Triplets t;
  append_diffusion(mesh, mu, dofs, false, 1.0, t);
  return build(dofs.size, dofs.size, t);
}

SparseMatrix diffusion_matrix(const MacMesh& mesh, const ViscosityTensorField& mu, const DofMap& dofs,
                              bool integrated) {
  Triplets t;
  append_diffusion(mesh, mu, dofs, integrated, 1.0, t);
  return build(dofs.size, dofs.size, t);
}

SparseMatrix convection_matrix(const MacMesh& mesh, const MassFluxSet& fluxes, AdvectionScheme scheme) {
  const DofMap dofs = DofMap::all_faces(mesh);
  Triplets t;
  append_convection(mesh, fluxes, scheme, dofs, false, 1.0, t);
  return build(dofs.size, dofs.size, t);
}

SparseMatrix face_mass_matrix(const MacMesh& mesh) {
  const DofMap dofs = DofMap::all_faces(mesh);
  FaceField ones = FaceField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) ones.comp[i].assign(mesh.num_faces(i), 1.0);
  Triplets t;
  append_face_diagonal(mesh, ones, dofs, true, 1.0, t);
  return build(dofs.size, dofs.size, t);
}

SparseMatrix transport_matrix(const MacMesh& mesh, const VelocityField& u, double dt) {
  Triplets t;
  const int n = static_cast<int>(mesh.num_cells());
  t.reserve(n + 4 * static_cast<std::size_t>(n) * mesh.dim());
  for (int k = 0; k < n; ++k) t.emplace_back(k, k, mesh.cell(k).volume / dt);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      if (!f.interior) continue;
      const double q = f.area * u.comp[i][s];
      // Flux q rho_donor leaves lo and enters hi.
      const double from_lo = q >= 0.0 ? q : 0.0;
      const double from_hi = q >= 0.0 ? 0.0 : q;
      t.emplace_back(f.lo_cell, f.lo_cell, from_lo);
      t.emplace_back(f.lo_cell, f.hi_cell, from_hi);
      t.emplace_back(f.hi_cell, f.lo_cell, -from_lo);
      t.emplace_back(f.hi_cell, f.hi_cell, -from_hi);
    }
  }
  return build(n, n, t);
}

void write_coo(std::ostream& os, const SparseMatrix& a) {
  os << std::setprecision(17);
  for (int c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

}  // namespace macflow
