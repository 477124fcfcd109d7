#include "macflow/reference.hpp"

namespace macflow::reference {

CellScalarField divergence(const MacMesh& mesh, const VelocityField& u) {
  CellScalarField out = CellScalarField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const double flux = faces[s].area * u.comp[i][s];
      if (faces[s].lo_cell >= 0) out[faces[s].lo_cell] += flux;
      if (faces[s].hi_cell >= 0) out[faces[s].hi_cell] -= flux;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] /= mesh.cell(static_cast<int>(k)).volume;
  return out;
}

VelocityField pressure_gradient(const MacMesh& mesh, const CellScalarField& p) {
  VelocityField out = VelocityField::zeros(mesh);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    for (int i = 0; i < mesh.dim(); ++i) {
      out.comp[i][c.faces[i][0]] += p[k];
      out.comp[i][c.faces[i][1]] -= p[k];
    }
  }
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      out.comp[i][s] = faces[s].interior ? out.comp[i][s] * faces[s].area / faces[s].dual_volume : 0.0;
    }
  }
  return out;
}

DualTensorField velocity_gradient(const MacMesh& mesh, const VelocityField& u) {
  DualTensorField g = DualTensorField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      for (const DualRef& r : mesh.dual_faces_of(i, static_cast<int>(s))) {
        // The upper side adds u, the lower side subtracts it.
        g(i, r.j)[r.id] -= r.sign * u.comp[i][s] / mesh.dual(i, r.j, r.id).dist;
      }
    }
  }
  return g;
}

VelocityField diffusion_apply(const MacMesh& mesh, const ViscosityTensorField& mu, const VelocityField& u) {
  const DualTensorField g = reference::velocity_gradient(mesh, u);
  VelocityField out = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      for (std::size_t t = 0; t < duals.size(); ++t) {
        const DualFaceInfo& d = duals[t];
        const double flux = d.area * mu.dual(i, j)[t] * 0.5 * (g(i, j)[t] + g(j, i)[t]);
        if (d.lo_face >= 0) out.comp[i][d.lo_face] += flux;
        if (d.hi_face >= 0) out.comp[i][d.hi_face] -= flux;
      }
    }
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      out.comp[i][s] = faces[s].interior ? out.comp[i][s] / faces[s].dual_volume : 0.0;
    }
  }
  return out;
}

MassFluxSet mass_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u) {
  MassFluxSet fs;
  fs.rho_face = FaceField::zeros(mesh);
  fs.flux = FaceField::zeros(mesh);
  // Outward fluxes per cell; each face is visited from both sides and the
  // lower cell's view is stored.
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    for (int i = 0; i < mesh.dim(); ++i) {
      for (int side = 0; side < 2; ++side) {
        const int s = c.faces[i][side];
        const FaceInfo& f = mesh.face(i, s);
        const double outward = side == 1 ? 1.0 : -1.0;
        const double u_out = outward * u.comp[i][s];
        const int other = side == 1 ? f.hi_cell : f.lo_cell;
        const double r = (u_out >= 0.0 || other < 0) ? rho[k] : rho[other];
        if (side == 1) {
          fs.rho_face.comp[i][s] = r;
          fs.flux.comp[i][s] = f.interior ? f.area * r * u_out : 0.0;
        } else if (other < 0) {
          fs.rho_face.comp[i][s] = r;
        }
      }
    }
  }

  fs.dual = DualTensorField::zeros(mesh);
  fs.dual_rho = DualTensorField::zeros(mesh);
  fs.dual_u = DualTensorField::zeros(mesh);
  DualTensorField w = DualTensorField::zeros(mesh);
  DualTensorField wr = DualTensorField::zeros(mesh);
  DualTensorField wru = DualTensorField::zeros(mesh);
  const Index3 n{mesh.cells_along(0), mesh.cells_along(1), mesh.dim() > 2 ? mesh.cells_along(2) : 1};
  auto deposit = [&](int i, int j, int t, double area, double r, double uf, double flux) {
    fs.dual(i, j)[t] += 0.5 * flux;
    w(i, j)[t] += area;
    wr(i, j)[t] += area * r;
    wru(i, j)[t] += area * r * uf;
  };
  for (int dir = 0; dir < mesh.dim(); ++dir) {
    const auto faces = mesh.faces(dir);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      const double r = fs.rho_face.comp[dir][s];
      const double uf = u.comp[dir][s];
      const double flux = fs.flux.comp[dir][s];
      // Parallel case: the two cells sharing the face.
      if (f.lo_cell >= 0) deposit(dir, dir, f.lo_cell, f.area, r, uf, flux);
      if (f.hi_cell >= 0) deposit(dir, dir, f.hi_cell, f.area, r, uf, flux);
      // Transverse case: the face is a tau face of (i, dir) dual faces.
      const Index3 m = mesh.face_index(dir, static_cast<int>(s));
      for (int i = 0; i < mesh.dim(); ++i) {
        if (i == dir) continue;
        Index3 shape = n;
        shape[i] += 1;
        shape[dir] += 1;
        Index3 q = m;
        deposit(i, dir, linear_index(q, shape), f.area, r, uf, flux);
        q[i] += 1;
        deposit(i, dir, linear_index(q, shape), f.area, r, uf, flux);
      }
    }
  }
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      for (std::size_t t = 0; t < w(i, j).size(); ++t) {
        fs.dual_rho(i, j)[t] = wr(i, j)[t] / w(i, j)[t];
        fs.dual_u(i, j)[t] = wr(i, j)[t] != 0.0 ? wru(i, j)[t] / wr(i, j)[t] : 0.0;
      }
    }
  }
  return fs;
}

VelocityField convection_apply(const MacMesh& mesh, const MassFluxSet& fs, const VelocityField& v,
                               AdvectionScheme scheme) {
  VelocityField out = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto& vi = v.comp[i];
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      for (std::size_t t = 0; t < duals.size(); ++t) {
        const DualFaceInfo& d = duals[t];
        const double g = fs.dual(i, j)[t];
        const double vlo = d.lo_face >= 0 ? vi[d.lo_face] : 0.0;
        const double vhi = d.hi_face >= 0 ? vi[d.hi_face] : 0.0;
        const double vd = scheme == AdvectionScheme::kCentered ? 0.5 * (vlo + vhi) : (g >= 0.0 ? vlo : vhi);
        if (d.lo_face >= 0) out.comp[i][d.lo_face] += g * vd;
        if (d.hi_face >= 0) out.comp[i][d.hi_face] -= g * vd;
      }
    }
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      out.comp[i][s] = faces[s].interior ? out.comp[i][s] / faces[s].dual_volume : 0.0;
    }
  }
  return out;
}

}  // namespace macflow::reference
