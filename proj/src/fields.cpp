#include "macflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "macflow/quadrature.hpp"

namespace macflow {

VelocityField VelocityField::zeros(const MacMesh& mesh) {
  VelocityField u;
  u.dim = mesh.dim();
  for (int i = 0; i < mesh.dim(); ++i) u.comp[i].assign(mesh.num_faces(i), 0.0);
  return u;
}

void VelocityField::apply_dirichlet(const MacMesh& mesh) {
  for (int i = 0; i < dim; ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (!faces[s].interior) comp[i][s] = 0.0;
    }
  }
}

bool VelocityField::satisfies_dirichlet(const MacMesh& mesh) const {
  for (int i = 0; i < dim; ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      if (!faces[s].interior && comp[i][s] != 0.0) return false;
    }
  }
  return true;
}

DualTensorField DualTensorField::zeros(const MacMesh& mesh) {
  DualTensorField t;
  t.dim = mesh.dim();
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) t(i, j).assign(mesh.num_dual(i, j), 0.0);
  }
  return t;
}

CellScalarField project_cell(const MacMesh& mesh, const ScalarFunction& f, int quadrature_order) {
  const GaussRule rule = gauss_legendre(quadrature_order);
  CellScalarField q = CellScalarField::zeros(mesh);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    Vec3 lo{}, hi{};
    for (int a = 0; a < mesh.dim(); ++a) {
      lo[a] = c.center[a] - 0.5 * c.width[a];
      hi[a] = c.center[a] + 0.5 * c.width[a];
    }
    q[k] = box_average(f, lo, hi, mesh.dim(), rule);
  }
  return q;
}

VelocityField project_face(const MacMesh& mesh, const VectorFunction& f, FaceProjection kind,
                           int quadrature_order) {
  const GaussRule rule = gauss_legendre(quadrature_order);
  VelocityField u = VelocityField::zeros(mesh);
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto component = [&f, i](const Vec3& x) { return f(x)[i]; };
    const auto faces = mesh.faces(i);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const FaceInfo& face = faces[s];
      if (!face.interior) continue;
      Vec3 lo{}, hi{};
      for (int a = 0; a < mesh.dim(); ++a) {
        if (a == i) continue;
        const double w = mesh.cell(face.hi_cell).width[a];
        lo[a] = face.center[a] - 0.5 * w;
        hi[a] = face.center[a] + 0.5 * w;
      }
      if (kind == FaceProjection::kDualMean) {
        lo[i] = mesh.cell(face.lo_cell).center[i];
        hi[i] = mesh.cell(face.hi_cell).center[i];
      } else {
        lo[i] = hi[i] = face.center[i];
      }
      u.comp[i][s] = box_average(component, lo, hi, mesh.dim(), rule);
    }
  }
  return u;
}

FaceScalars reconstruct_cell_to_face(const MacMesh& mesh, const CellScalarField& q, int i) {
  FaceScalars out = FaceScalars::zeros(mesh, i);
  const auto faces = mesh.faces(i);
  for (std::size_t s = 0; s < faces.size(); ++s) {
    const FaceInfo& f = faces[s];
    if (f.lo_cell < 0) {
      out[s] = q[f.hi_cell];
    } else if (f.hi_cell < 0) {
      out[s] = q[f.lo_cell];
    } else {
      const double alpha = f.half_lo / f.dual_volume;
      out[s] = alpha * q[f.lo_cell] + (1.0 - alpha) * q[f.hi_cell];
    }
  }
  return out;
}

CellScalarField reconstruct_face_to_cell(const MacMesh& mesh, const FaceScalars& v) {
  const int i = v.direction;
  CellScalarField out = CellScalarField::zeros(mesh);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const auto& faces = mesh.cell(static_cast<int>(k)).faces[i];
    out[k] = 0.5 * (v[faces[0]] + v[faces[1]]);
  }
  return out;
}

DualGridField reconstruct_face_to_dual(const MacMesh& mesh, const FaceScalars& v, int j,
                                       const std::vector<double>& alpha) {
  const int i = v.direction;
  DualGridField out = DualGridField::zeros(mesh, i, j);
  if (!alpha.empty() && alpha.size() != out.values.size()) {
    throw std::invalid_argument("reconstruction weights do not match the dual-dual partition");
  }
  const auto duals = mesh.duals(i, j);
  for (std::size_t t = 0; t < duals.size(); ++t) {
    const DualFaceInfo& d = duals[t];
    const double a = alpha.empty() ? 0.5 : alpha[t];
    if (d.lo_face >= 0 && d.hi_face >= 0) {
      out.values[t] = a * v[d.lo_face] + (1.0 - a) * v[d.hi_face];
    } else {
      out.values[t] = a * v[d.lo_face >= 0 ? d.lo_face : d.hi_face];
    }
  }
  return out;
}

namespace {

template <class Measure, class Value>
double lp_sum(std::size_t n, double p, Measure measure, Value value) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(value(k)));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += measure(k) * std::pow(std::abs(value(k)), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

double norm_lp(const MacMesh& mesh, const CellScalarField& q, double p) {
  return lp_sum(
      q.size(), p, [&](std::size_t k) { return mesh.cell(static_cast<int>(k)).volume; },
      [&](std::size_t k) { return q[k]; });
}

double norm_lp(const MacMesh& mesh, const FaceScalars& v, double p) {
  const auto faces = mesh.faces(v.direction);
  return lp_sum(
      v.size(), p, [&](std::size_t s) { return faces[s].dual_volume; }, [&](std::size_t s) { return v[s]; });
}

double norm_lp(const MacMesh& mesh, const DualGridField& v, double p) {
  const auto duals = mesh.duals(v.i, v.j);
  return lp_sum(
      v.values.size(), p, [&](std::size_t t) { return duals[t].volume; },
      [&](std::size_t t) { return v.values[t]; });
}

double norm_l2(const MacMesh& mesh, const CellScalarField& q) { return norm_lp(mesh, q, 2.0); }

double norm_l2(const MacMesh& mesh, const VelocityField& u) { return std::sqrt(integrate(mesh, u, u)); }

double norm_h1(const MacMesh& mesh, const VelocityField& u) {
  double s = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto& ui = u.comp[i];
    for (int j = 0; j < mesh.dim(); ++j) {
      for (const DualFaceInfo& d : mesh.duals(i, j)) {
        const double lo = d.lo_face >= 0 ? ui[d.lo_face] : 0.0;
        const double hi = d.hi_face >= 0 ? ui[d.hi_face] : 0.0;
        s += d.area / d.dist * (hi - lo) * (hi - lo);
      }
    }
  }
  return std::sqrt(s);
}

double integrate(const MacMesh& mesh, const CellScalarField& a, const CellScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += mesh.cell(static_cast<int>(k)).volume * a[k] * b[k];
  return s;
}

double integrate(const MacMesh& mesh, const VelocityField& u, const VelocityField& v) {
  double s = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    const auto faces = mesh.faces(i);
    for (std::size_t f = 0; f < faces.size(); ++f) s += faces[f].dual_volume * u.comp[i][f] * v.comp[i][f];
  }
  return s;
}

double integrate(const MacMesh& mesh, const DualTensorField& a, const DualTensorField& b) {
  double s = 0.0;
  for (int i = 0; i < mesh.dim(); ++i) {
    for (int j = 0; j < mesh.dim(); ++j) {
      const auto duals = mesh.duals(i, j);
      for (std::size_t t = 0; t < duals.size(); ++t) s += duals[t].volume * a(i, j)[t] * b(i, j)[t];
    }
  }
  return s;
}

double mean(const MacMesh& mesh, const CellScalarField& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += mesh.cell(static_cast<int>(k)).volume * q[k];
  return s / mesh.domain_volume();
}

double reconstruction_constant(double eta) { return 1.0 + eta * eta; }

}  // namespace macflow
