#include "macflow/operators.hpp"

#include <cmath>
#include <string>

namespace macflow {

namespace {

inline double value_or_zero(const std::vector<double>& v, int id) { return id >= 0 ? v[id] : 0.0; }

// Signed loop bound for OpenMP.
inline long long count(std::size_t n) { return static_cast<long long>(n); }

}  // namespace

CellScalarField divergence(const MacMesh& mesh, const VelocityField& u, Exec exec) {
  CellScalarField out = CellScalarField::zeros(mesh);
  const int dim = mesh.dim();
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
  for (long long k = 0; k < count(mesh.num_cells()); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      const int lo = c.faces[i][0];
      const int hi = c.faces[i][1];
      s += mesh.face(i, hi).area * u.comp[i][hi] - mesh.face(i, lo).area * u.comp[i][lo];
    }
    out[k] = s / c.volume;
  }
  return out;
}

VelocityField pressure_gradient(const MacMesh& mesh, const CellScalarField& p, Exec exec) {
  VelocityField out = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    auto& g = out.comp[i];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
    for (long long s = 0; s < count(faces.size()); ++s) {
      const FaceInfo& f = faces[s];
      if (f.interior) g[s] = f.area / f.dual_volume * (p[f.hi_cell] - p[f.lo_cell]);
    }
  }
  return out;
}

DualGridField velocity_gradient(const MacMesh& mesh, const FaceScalars& ui, int j, Exec exec) {
  const int i = ui.direction;
  DualGridField out = DualGridField::zeros(mesh, i, j);
  const auto duals = mesh.duals(i, j);
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
  for (long long t = 0; t < count(duals.size()); ++t) {
    const DualFaceInfo& d = duals[t];
    out.values[t] = (value_or_zero(ui.values, d.hi_face) - value_or_zero(ui.values, d.lo_face)) / d.dist;
  }
  return out;
}

DualTensorField velocity_gradient(const MacMesh& mesh, const VelocityField& u, Exec exec) {
  DualTensorField g;
  g.dim = mesh.dim();
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) g(i, j) = velocity_gradient(mesh, u.component(i), j, exec).values;
  }
  return g;
}

DualTensorField strain_tensor(const MacMesh& mesh, const VelocityField& u, Exec exec) {
  const DualTensorField g = velocity_gradient(mesh, u, exec);
  DualTensorField s = DualTensorField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      auto& out = s(i, j);
      const auto& a = g(i, j);
      const auto& b = g(j, i);
      for (std::size_t t = 0; t < out.size(); ++t) out[t] = 0.5 * (a[t] + b[t]);
    }
  }
  return s;
}

ViscosityTensorField viscosity_from_cells(const MacMesh& mesh, const CellScalarField& mu, Exec exec) {
  ViscosityTensorField out;
  out.cell = mu;
  out.dual = DualTensorField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = i; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      auto& m = out.dual(i, j);
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
      for (long long t = 0; t < count(duals.size()); ++t) {
        const DualFaceInfo& d = duals[t];
        double num = 0.0;
        double den = 0.0;
        for (int c = 0; c < d.cell_count; ++c) {
          num += d.overlap[c] * mu[d.cells[c]];
          den += d.overlap[c];
        }
        m[t] = num / den;
      }
      // Same geometric cells; copy so the two partitions agree bit for bit.
      if (j != i) out.dual(j, i) = m;
    }
  }
  return out;
}

ViscosityTensorField viscosity_tensor(const MacMesh& mesh, const CellScalarField& rho, const ViscosityLaw& law,
                                      Exec exec) {
  CellScalarField mu = CellScalarField::zeros(mesh);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double m = law(rho[k]);
    if (!std::isfinite(m) || !(m > 0.0)) {
      throw ViscosityError("viscosity law returned " + std::to_string(m) + " for density " +
                           std::to_string(rho[k]) + " in cell " + std::to_string(k));
    }
    mu[k] = m;
  }
  return viscosity_from_cells(mesh, mu, exec);
}

VelocityField diffusion_apply(const MacMesh& mesh, const ViscosityTensorField& mu, const VelocityField& u,
                              Exec exec) {
  const DualTensorField strain = strain_tensor(mesh, u, exec);
  VelocityField out = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    auto& r = out.comp[i];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
    for (long long s = 0; s < count(faces.size()); ++s) {
      const FaceInfo& f = faces[s];
      if (!f.interior) continue;
      double acc = 0.0;
      for (int k = 0; k < f.dual_count; ++k) {
        const DualRef& ref = f.dual[k];
        const double area = mesh.dual(i, ref.j, ref.id).area;
        acc += ref.sign * area * mu.dual(i, ref.j)[ref.id] * strain(i, ref.j)[ref.id];
      }
      r[s] = acc / f.dual_volume;
    }
  }
  return out;
}

double MassFluxSet::outward(const MacMesh& mesh, int k, int i, int s) const {
  return mesh.face(i, s).lo_cell == k ? flux.comp[i][s] : -flux.comp[i][s];
}

MassFluxSet primal_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u, Exec exec) {
  MassFluxSet fs;
  fs.rho_face = FaceField::zeros(mesh);
  fs.flux = FaceField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    const auto& ui = u.comp[i];
    auto& rf = fs.rho_face.comp[i];
    auto& fl = fs.flux.comp[i];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
    for (long long s = 0; s < count(faces.size()); ++s) {
      const FaceInfo& f = faces[s];
      double r;
      if (f.lo_cell < 0) {
        r = rho[f.hi_cell];
      } else if (f.hi_cell < 0) {
        r = rho[f.lo_cell];
      } else {
        r = ui[s] >= 0.0 ? rho[f.lo_cell] : rho[f.hi_cell];
      }
      rf[s] = r;
      fl[s] = f.interior ? f.area * r * ui[s] : 0.0;
    }
  }
  return fs;
}

void dual_fluxes(const MacMesh& mesh, const VelocityField& u, MassFluxSet& fs, Exec exec) {
  fs.dual = DualTensorField::zeros(mesh);
  fs.dual_rho = DualTensorField::zeros(mesh);
  fs.dual_u = DualTensorField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      auto& g = fs.dual(i, j);
      auto& dr = fs.dual_rho(i, j);
      auto& du = fs.dual_u(i, j);
      // Faces whose fluxes are averaged: direction i along e_i for the
      // parallel case, direction j (the tau faces) otherwise.
      const int dir = i == j ? i : j;
      const auto& flux = fs.flux.comp[dir];
      const auto& rf = fs.rho_face.comp[dir];
      const auto& uf = u.comp[dir];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
      for (long long t = 0; t < count(duals.size()); ++t) {
        const DualFaceInfo& d = duals[t];
        const int a = i == j ? d.lo_face : d.tau_lo;
        const int b = i == j ? d.hi_face : d.tau_hi;
        double gs = 0.0, w = 0.0, wr = 0.0, wru = 0.0;
        for (const int s : {a, b}) {
          if (s < 0) continue;
          const double area = mesh.face(dir, s).area;
          gs += flux[s];
          w += area;
          wr += area * rf[s];
          wru += area * rf[s] * uf[s];
        }
        g[t] = 0.5 * gs;
        dr[t] = wr / w;
        du[t] = wr != 0.0 ? wru / wr : 0.0;
      }
    }
  }
}

MassFluxSet mass_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u, Exec exec) {
  MassFluxSet fs = primal_fluxes(mesh, rho, u, exec);
  dual_fluxes(mesh, u, fs, exec);
  return fs;
}

FaceField dual_cell_density(const MacMesh& mesh, const CellScalarField& rho, Exec exec) {
  FaceField out = FaceField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    auto& r = out.comp[i];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
    for (long long s = 0; s < count(faces.size()); ++s) {
      const FaceInfo& f = faces[s];
      double m = 0.0;
      if (f.lo_cell >= 0) m += f.half_lo * rho[f.lo_cell];
      if (f.hi_cell >= 0) m += f.half_hi * rho[f.hi_cell];
      r[s] = m / f.dual_volume;
    }
  }
  return out;
}

AdvectionScheme parse_advection_scheme(std::string_view name) {
  if (name == "centered") return AdvectionScheme::kCentered;
  if (name == "upwind") return AdvectionScheme::kUpwind;
  throw std::invalid_argument("unknown advection scheme '" + std::string(name) +
                              "' (expected centered or upwind)");
}

std::string to_string(AdvectionScheme scheme) {
  return scheme == AdvectionScheme::kCentered ? "centered" : "upwind";
}

VelocityField convection_apply(const MacMesh& mesh, const MassFluxSet& fs, const VelocityField& v,
                               AdvectionScheme scheme, Exec exec) {
  VelocityField out = VelocityField::zeros(mesh);
  const bool centered = scheme == AdvectionScheme::kCentered;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    const auto& vi = v.comp[i];
    auto& r = out.comp[i];
#pragma omp parallel for num_threads(exec.threads) if (exec.threads > 1)
    for (long long s = 0; s < count(faces.size()); ++s) {
      const FaceInfo& f = faces[s];
      if (!f.interior) continue;
      double acc = 0.0;
      for (int k = 0; k < f.dual_count; ++k) {
        const DualRef& ref = f.dual[k];
        const DualFaceInfo& d = mesh.dual(i, ref.j, ref.id);
        const double flux = ref.sign * fs.dual(i, ref.j)[ref.id];
        const double other = value_or_zero(vi, ref.sign > 0 ? d.hi_face : d.lo_face);
        double vd;
        if (centered) {
          vd = 0.5 * (vi[s] + other);
        } else {
          vd = flux >= 0.0 ? vi[s] : other;
        }
        acc += flux * vd;
      }
      r[s] = acc / f.dual_volume;
    }
  }
  return out;
}

double trilinear(const MacMesh& mesh, const MassFluxSet& fs, const VelocityField& v, const VelocityField& w,
                 AdvectionScheme scheme, Exec exec) {
  const VelocityField cv = convection_apply(mesh, fs, v, scheme, exec);
  return integrate(mesh, cv, w);
}

double convection_dual_form(const MacMesh& mesh, const MassFluxSet& fs, const VelocityField& v,
                            const VelocityField& w, AdvectionScheme scheme) {
  double s = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto& vi = v.comp[i];
    const auto& wi = w.comp[i];
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      const auto& g = fs.dual(i, j);
      for (std::size_t t = 0; t < duals.size(); ++t) {
        const DualFaceInfo& d = duals[t];
        const double vlo = value_or_zero(vi, d.lo_face);
        const double vhi = value_or_zero(vi, d.hi_face);
        double vd;
        if (scheme == AdvectionScheme::kCentered) {
          vd = 0.5 * (vlo + vhi);
        } else {
          vd = g[t] >= 0.0 ? vlo : vhi;
        }
        s -= g[t] * vd * (value_or_zero(wi, d.hi_face) - value_or_zero(wi, d.lo_face));
      }
    }
  }
  return s;
}

double trilinear_reconstructed(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u,
                               const VelocityField& v, const VelocityField& w, AdvectionScheme scheme) {
  // Upwind densities on every face, recomputed here from (rho, u).
  std::array<FaceScalars, kMaxDim> rho_up;
  for (int j = 0; j < mesh.dim(); ++j) {
    rho_up[j] = FaceScalars::zeros(mesh, j);
    const auto faces = mesh.faces(j);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& f = faces[s];
      const bool take_lo = f.hi_cell < 0 || (f.lo_cell >= 0 && u.comp[j][s] >= 0.0);
      rho_up[j][s] = rho[take_lo ? f.lo_cell : f.hi_cell];
    }
  }
  double total = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      const DualGridField dw = velocity_gradient(mesh, w.component(i), j);
      for (std::size_t t = 0; t < duals.size(); ++t) {
        // rho and u_j are reconstructed from E^(j) onto the (j, i) partition,
        // whose cell t is the same set as cell t of the (i, j) partition.
        const DualFaceInfo& dj = mesh.dual(j, i, static_cast<int>(t));
        double wsum = 0.0, rsum = 0.0, rusum = 0.0;
        for (const int s : {dj.lo_face, dj.hi_face}) {
          if (s < 0) continue;
          const double a = mesh.face(j, s).area;
          wsum += a;
          rsum += a * rho_up[j][s];
          rusum += a * rho_up[j][s] * u.comp[j][s];
        }
        const double r = rsum / wsum;
        const double uhat = rsum != 0.0 ? rusum / rsum : 0.0;
        const DualFaceInfo& d = duals[t];
        const double vlo = d.lo_face >= 0 ? v.comp[i][d.lo_face] : 0.0;
        const double vhi = d.hi_face >= 0 ? v.comp[i][d.hi_face] : 0.0;
        double alpha = 0.5;
        if (scheme == AdvectionScheme::kUpwind) alpha = r * uhat >= 0.0 ? 1.0 : 0.0;
        const double vd = alpha * vlo + (1.0 - alpha) * vhi;
        total -= d.volume * r * uhat * vd * dw.values[t];
      }
    }
  }
  return total;
}

}  // namespace macflow
