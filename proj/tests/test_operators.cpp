#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "macflow/operators.hpp"
#include "macflow/reference.hpp"
#include "support.hpp"

using namespace macflow;
using namespace testing_support;

namespace {

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a + b) / s : 0.0;
}

std::vector<MacMesh> test_meshes() {
  std::vector<MacMesh> out;
  out.push_back(unit_square_mesh(8, 8));
  out.push_back(unit_square_mesh(16, 16, 3.0));
  out.push_back(nonuniform_3x3());
  out.push_back(mesh_from({0.0, 0.1, 0.5, 0.6, 2.0}, {-1.0, 0.0, 0.3, 1.0}));
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("divergence of a single cell") {
  const MacMesh m = unit_square_mesh(2, 2);
  VelocityField u = VelocityField::zeros(m);
  const int k = m.cell_id({0, 0, 0});
  u.comp[0][m.cell(k).faces[0][1]] = 1.0;
  u.comp[1][m.cell(k).faces[1][1]] = 0.0;
  CHECK(divergence(m, u)[k] == doctest::Approx(2.0));
}

TEST_CASE("divergence of a constant field vanishes away from the walls") {
  const MacMesh m = unit_square_mesh(5, 5);
  VelocityField u = VelocityField::zeros(m);
  for (int i = 0; i < 2; ++i) u.comp[i].assign(m.num_faces(i), 0.7);
  u.apply_dirichlet(m);
  const CellScalarField d = divergence(m, u);
  for (int y = 1; y < 4; ++y) {
    for (int x = 1; x < 4; ++x) CHECK(std::abs(d[m.cell_id({x, y, 0})]) <= 1e-14);
  }
}

TEST_CASE("divergence matches a brute-force flux loop") {
  std::mt19937_64 rng(1);
  const MacMesh m = nonuniform_3x3();
  const auto& xs = m.nodes(0);
  const auto& ys = m.nodes(1);
  for (int trial = 0; trial < 10; ++trial) {
    const VelocityField u = random_velocity(m, rng);
    const CellScalarField d = divergence(m, u);
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        const double wx = xs[x + 1] - xs[x];
        const double wy = ys[y + 1] - ys[y];
        const double ue = u.comp[0][m.face_id(0, {x + 1, y, 0})];
        const double uw = u.comp[0][m.face_id(0, {x, y, 0})];
        const double un = u.comp[1][m.face_id(1, {x, y + 1, 0})];
        const double us = u.comp[1][m.face_id(1, {x, y, 0})];
        const double expect = (wy * (ue - uw) + wx * (un - us)) / (wx * wy);
        CHECK(d[m.cell_id({x, y, 0})] == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("pressure gradient") {
  const MacMesh m = unit_square_mesh(2, 2);
  const VelocityField flat = pressure_gradient(m, CellScalarField::constant(m, 3.0));
  for (int i = 0; i < 2; ++i) {
    for (double v : flat.comp[i]) CHECK(v == 0.0);
  }
  CellScalarField p = CellScalarField::zeros(m);
  p[m.cell_id({0, 0, 0})] = 1.0;
  p[m.cell_id({1, 0, 0})] = 2.0;
  const VelocityField g = pressure_gradient(m, p);
  CHECK(g.comp[0][m.face_id(0, {1, 0, 0})] == doctest::Approx(2.0));
  CHECK(g.satisfies_dirichlet(m));
}

TEST_CASE("div-grad duality") {
  std::mt19937_64 rng(2);
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 100; ++trial) {
      const CellScalarField q = random_cells(m, rng);
      const VelocityField v = random_velocity(m, rng);
      const double a = integrate(m, q, divergence(m, v));
      const double b = integrate(m, pressure_gradient(m, q), v);
      CHECK(rel(a, b) <= 1e-12);
    }
  }
}

TEST_CASE("velocity gradient difference quotients") {
  const MacMesh m = unit_square_mesh(2, 2);
  const DualTensorField zero = strain_tensor(m, VelocityField::zeros(m));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(max_abs(zero(i, j)) == 0.0);
  }
  // Interior pair along y: u = 0 below, 1 above, centres 0.5 apart.
  VelocityField u = VelocityField::zeros(m);
  u.comp[0][m.face_id(0, {1, 1, 0})] = 1.0;
  const DualGridField g = velocity_gradient(m, u.component(0), 1);
  int hits = 0;
  for (std::size_t t = 0; t < g.values.size(); ++t) {
    const DualFaceInfo& d = m.dual(0, 1, static_cast<int>(t));
    if (d.center[0] == 0.5 && d.center[1] == 0.5) {
      CHECK(g.values[t] == doctest::Approx(2.0));
      ++hits;
    }
    if (d.center[0] == 0.5 && d.center[1] == 1.0) {
      // Wall above: (0 - 1) / 0.25.
      CHECK(g.values[t] == doctest::Approx(-4.0));
      ++hits;
    }
  }
  CHECK(hits == 2);
}

TEST_CASE("discrete Korn inequality and the divergence identity") {
  std::mt19937_64 rng(4);
  for (const MacMesh& m : {unit_square_mesh(8, 8), unit_square_mesh(10, 6, 4.0)}) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const VelocityField u = random_velocity(m, rng);
      const DualTensorField s = strain_tensor(m, u);
      worst = std::max(worst, norm_h1(m, u) / std::sqrt(integrate(m, s, s)));
      if (trial < 50) {
        const DualTensorField g = velocity_gradient(m, u);
        DualTensorField gt = DualTensorField::zeros(m);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) gt(i, j) = g(j, i);
        }
        const CellScalarField d = divergence(m, u);
        CHECK(integrate(m, g, gt) == doctest::Approx(integrate(m, d, d)).epsilon(1e-12));
      }
    }
    CHECK(worst <= std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("viscosity tensor averages") {
  const MacMesh m = unit_square_mesh(2, 2);
  const ViscosityTensorField c =
      viscosity_tensor(m, CellScalarField::constant(m, 1.7), [](double r) { return r; });
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (double v : c.dual(i, j)) CHECK(v == doctest::Approx(1.7));
    }
  }
  CellScalarField mu = CellScalarField::zeros(m);
  mu[m.cell_id({0, 0, 0})] = 1.0;
  mu[m.cell_id({1, 0, 0})] = 2.0;
  mu[m.cell_id({0, 1, 0})] = 3.0;
  mu[m.cell_id({1, 1, 0})] = 4.0;
  const ViscosityTensorField v = viscosity_from_cells(m, mu);
  for (std::size_t t = 0; t < m.num_dual(0, 1); ++t) {
    const DualFaceInfo& d = m.dual(0, 1, static_cast<int>(t));
    if (d.center[0] == 0.5 && d.center[1] == 0.5) CHECK(v.dual(0, 1)[t] == doctest::Approx(2.5));
    // Bottom wall between cells with mu 1 and 2, top wall between 3 and 4.
    if (d.center[0] == 0.5 && d.center[1] == 0.0) CHECK(v.dual(0, 1)[t] == doctest::Approx(1.5));
    if (d.center[0] == 0.5 && d.center[1] == 1.0) CHECK(v.dual(0, 1)[t] == doctest::Approx(3.5));
  }
  CellScalarField two = CellScalarField::zeros(m);
  two[m.cell_id({0, 0, 0})] = 1.0;
  two[m.cell_id({1, 0, 0})] = 3.0;
  two[m.cell_id({0, 1, 0})] = 1.0;
  two[m.cell_id({1, 1, 0})] = 3.0;
  const ViscosityTensorField w = viscosity_from_cells(m, two);
  for (std::size_t t = 0; t < m.num_dual(0, 1); ++t) {
    const DualFaceInfo& d = m.dual(0, 1, static_cast<int>(t));
    if (d.center[0] == 0.5 && d.center[1] == 0.0) CHECK(w.dual(0, 1)[t] == doctest::Approx(2.0));
  }
}

TEST_CASE("viscosity bounds and symmetry on random densities") {
  std::mt19937_64 rng(6);
  const auto law = [](double r) { return 0.01 + 0.3 * r; };
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 50; ++trial) {
      const CellScalarField rho = random_cells(m, rng, 0.5, 3.0);
      const ViscosityTensorField v = viscosity_tensor(m, rho, law);
      const double lo = *std::min_element(v.cell.values.begin(), v.cell.values.end());
      const double hi = *std::max_element(v.cell.values.begin(), v.cell.values.end());
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (double x : v.dual(i, j)) {
            CHECK(x >= lo * (1 - 1e-15));
            CHECK(x <= hi * (1 + 1e-15));
          }
          CHECK(v.dual(i, j) == v.dual(j, i));
        }
      }
    }
  }
}

TEST_CASE("invalid viscosity laws are rejected") {
  const MacMesh m = unit_square_mesh(2, 2);
  const CellScalarField rho = CellScalarField::constant(m, 1.0);
  CHECK_THROWS_AS(viscosity_tensor(m, rho, [](double) { return 0.0; }), ViscosityError);
  CHECK_THROWS_AS(viscosity_tensor(m, rho, [](double) { return -1.0; }), ViscosityError);
  CHECK_THROWS_AS(viscosity_tensor(m, rho, [](double) { return std::nan(""); }), ViscosityError);
}

TEST_CASE("diffusion duality") {
  std::mt19937_64 rng(8);
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 100; ++trial) {
      const ViscosityTensorField mu = viscosity_from_cells(m, random_cells(m, rng, 0.1, 2.0));
      const VelocityField u = random_velocity(m, rng);
      const VelocityField v = random_velocity(m, rng);
      const double a = integrate(m, diffusion_apply(m, mu, u), v);
      DualTensorField su = strain_tensor(m, u);
      const DualTensorField sv = strain_tensor(m, v);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (std::size_t t = 0; t < su(i, j).size(); ++t) su(i, j)[t] *= mu.dual(i, j)[t];
        }
      }
      CHECK(rel(a, integrate(m, su, sv)) <= 1e-12);
    }
  }
  const MacMesh m = unit_square_mesh(3, 3);
  const VelocityField z = diffusion_apply(m, viscosity_from_cells(m, CellScalarField::constant(m, 1.0)),
                                          VelocityField::zeros(m));
  CHECK(max_abs(z.comp[0]) == 0.0);
}

TEST_CASE("primal fluxes use the upwind density") {
  const MacMesh m = mesh_from({0.0, 0.5, 1.0}, {0.0, 0.5});
  CellScalarField rho = CellScalarField::zeros(m);
  rho[0] = 1.0;
  rho[1] = 5.0;
  VelocityField u = VelocityField::zeros(m);
  const MassFluxSet zero = primal_fluxes(m, rho, u);
  CHECK(zero.rho_face.comp[0][1] == 1.0);
  u.comp[0][1] = -2.0;
  const MassFluxSet fs = primal_fluxes(m, rho, u);
  CHECK(fs.rho_face.comp[0][1] == 5.0);
  CHECK(fs.outward(m, 0, 0, 1) == doctest::Approx(-5.0));
  CHECK(fs.outward(m, 1, 0, 1) == doctest::Approx(5.0));
}

TEST_CASE("flux conservativity on random data") {
  std::mt19937_64 rng(10);
  for (const MacMesh& m : test_meshes()) {
    const CellScalarField rho = random_cells(m, rng, 0.5, 2.0);
    const VelocityField u = random_velocity(m, rng);
    const MassFluxSet fs = mass_fluxes(m, rho, u);
    for (int i = 0; i < 2; ++i) {
      for (std::size_t s = 0; s < m.num_faces(i); ++s) {
        const FaceInfo& f = m.face(i, static_cast<int>(s));
        if (!f.interior) continue;
        CHECK(std::abs(fs.outward(m, f.lo_cell, i, static_cast<int>(s)) +
                       fs.outward(m, f.hi_cell, i, static_cast<int>(s))) <= 1e-14);
      }
      // Dual fluxes seen from both sides of every interior dual face.
      for (int j = 0; j < 2; ++j) {
        for (std::size_t s = 0; s < m.num_faces(i); ++s) {
          for (const DualRef& r : m.dual_faces_of(i, static_cast<int>(s))) {
            const DualFaceInfo& d = m.dual(i, r.j, r.id);
            if (!d.interior || r.j != j) continue;
            const int other = r.sign > 0 ? d.hi_face : d.lo_face;
            double other_sign = 0.0;
            for (const DualRef& q : m.dual_faces_of(i, other)) {
              if (q.j == r.j && q.id == r.id) other_sign = q.sign;
            }
            const double g = fs.dual(i, j)[r.id];
            CHECK(std::abs(r.sign * g + other_sign * g) <= 1e-14);
          }
        }
      }
    }
  }
}

TEST_CASE("dual flux and dual unknowns for the parallel case") {
  const MacMesh m = unit_square_mesh(3, 1);
  const int k = m.cell_id({1, 0, 0});
  const int left = m.cell(k).faces[0][0];
  const int right = m.cell(k).faces[0][1];
  MassFluxSet fs;
  fs.rho_face = FaceField::zeros(m);
  fs.flux = FaceField::zeros(m);
  VelocityField u = VelocityField::zeros(m);
  // F_{K,right} = -3 and F_{K,left} = 5.
  fs.flux.comp[0][right] = -3.0;
  fs.flux.comp[0][left] = -5.0;
  fs.rho_face.comp[0][left] = 1.0;
  fs.rho_face.comp[0][right] = 3.0;
  for (int i = 0; i < 2; ++i) {
    for (auto& r : fs.rho_face.comp[i]) r = r == 0.0 ? 1.0 : r;
  }
  u.comp[0][left] = 2.0;
  u.comp[0][right] = 0.0;
  dual_fluxes(m, u, fs);
  // The dual face inside K bounds D_right on its -e_x side.
  double f = 0.0;
  for (const DualRef& r : m.dual_faces_of(0, right)) {
    if (r.j == 0 && r.id == k) f = r.sign * fs.dual(0, 0)[k];
  }
  CHECK(f == doctest::Approx(4.0));
  CHECK(fs.dual_rho(0, 0)[k] == doctest::Approx(2.0));
  CHECK(fs.dual_u(0, 0)[k] == doctest::Approx(0.5));
}

TEST_CASE("dual flux equals area times rho-hat times u-hat") {
  std::mt19937_64 rng(12);
  for (const MacMesh& m : test_meshes()) {
    const MassFluxSet fs = mass_fluxes(m, random_cells(m, rng, 0.5, 2.0), random_velocity(m, rng));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (std::size_t t = 0; t < m.num_dual(i, j); ++t) {
          const double a = m.dual(i, j, static_cast<int>(t)).area;
          CHECK(fs.dual(i, j)[t] == doctest::Approx(a * fs.dual_rho(i, j)[t] * fs.dual_u(i, j)[t]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("dual mass balance follows from the primal one") {
  std::mt19937_64 rng(14);
  const double dt = 0.01;
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 20; ++trial) {
      const CellScalarField rho = random_cells(m, rng, 0.5, 2.0);
      const VelocityField u = random_velocity(m, rng);
      const MassFluxSet fs = mass_fluxes(m, rho, u);
      // Old density chosen so that the primal balance holds exactly.
      CellScalarField rho_old = rho;
      for (std::size_t k = 0; k < m.num_cells(); ++k) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) {
          for (int side = 0; side < 2; ++side) {
            const int f = m.cell(static_cast<int>(k)).faces[i][side];
            s += fs.outward(m, static_cast<int>(k), i, f);
          }
        }
        rho_old[k] = rho[k] + dt * s / m.cell(static_cast<int>(k)).volume;
      }
      const FaceField rd = dual_cell_density(m, rho);
      const FaceField rd_old = dual_cell_density(m, rho_old);
      for (int i = 0; i < 2; ++i) {
        for (std::size_t s = 0; s < m.num_faces(i); ++s) {
          const FaceInfo& f = m.face(i, static_cast<int>(s));
          if (!f.interior) continue;
          double div = 0.0;
          for (const DualRef& r : m.dual_faces_of(i, static_cast<int>(s))) div += r.sign * fs.dual(i, r.j)[r.id];
          const double res = (rd.comp[i][s] - rd_old.comp[i][s]) / dt + div / f.dual_volume;
          CHECK(std::abs(res) * dt <= 1e-12 * 2.0);
        }
      }
    }
  }
}

TEST_CASE("dual cell density") {
  const MacMesh m = unit_square_mesh(2, 1);
  CellScalarField rho = CellScalarField::zeros(m);
  rho[0] = 1.0;
  rho[1] = 3.0;
  CHECK(dual_cell_density(m, rho).comp[0][1] == doctest::Approx(2.0));
  const FaceField flat = dual_cell_density(m, CellScalarField::constant(m, 1.25));
  for (double v : flat.comp[1]) CHECK(v == doctest::Approx(1.25));
  std::mt19937_64 rng(16);
  const MacMesh s = unit_square_mesh(7, 5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const CellScalarField r = random_cells(s, rng, 0.2, 4.0);
    const double lo = *std::min_element(r.values.begin(), r.values.end());
    const double hi = *std::max_element(r.values.begin(), r.values.end());
    const FaceField d = dual_cell_density(s, r);
    for (int i = 0; i < 2; ++i) {
      for (double v : d.comp[i]) {
        CHECK(v >= lo * (1 - 1e-15));
        CHECK(v <= hi * (1 + 1e-15));
      }
    }
  }
}

TEST_CASE("advection scheme flags") {
  CHECK(parse_advection_scheme("centered") == AdvectionScheme::kCentered);
  CHECK(parse_advection_scheme("upwind") == AdvectionScheme::kUpwind);
  CHECK_THROWS_AS(parse_advection_scheme("central"), std::invalid_argument);
  CHECK(to_string(AdvectionScheme::kUpwind) == "upwind");
}

TEST_CASE("convection of a zero field") {
  std::mt19937_64 rng(18);
  const MacMesh m = nonuniform_3x3();
  const MassFluxSet fs = mass_fluxes(m, random_cells(m, rng, 0.5, 2.0), random_velocity(m, rng));
  for (AdvectionScheme s : {AdvectionScheme::kCentered, AdvectionScheme::kUpwind}) {
    const VelocityField c = convection_apply(m, fs, VelocityField::zeros(m), s);
    CHECK(max_abs(c.comp[0]) == 0.0);
    CHECK(max_abs(c.comp[1]) == 0.0);
  }
}

TEST_CASE("convection duality and the reconstructed trilinear form") {
  std::mt19937_64 rng(20);
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 100; ++trial) {
      const CellScalarField rho = random_cells(m, rng, 0.5, 2.0);
      const VelocityField u = random_velocity(m, rng);
      const VelocityField v = random_velocity(m, rng);
      const VelocityField w = random_velocity(m, rng);
      const MassFluxSet fs = mass_fluxes(m, rho, u);
      for (AdvectionScheme s : {AdvectionScheme::kCentered, AdvectionScheme::kUpwind}) {
        const double b = trilinear(m, fs, v, w, s);
        CHECK(std::isfinite(b));
        CHECK(rel(b, -convection_dual_form(m, fs, v, w, s)) <= 1e-12);
        CHECK(rel(b, -trilinear_reconstructed(m, rho, u, v, w, s)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("gather kernels agree with the scatter reference") {
  std::mt19937_64 rng(22);
  for (const MacMesh& m : test_meshes()) {
    for (int trial = 0; trial < 10; ++trial) {
      const CellScalarField rho = random_cells(m, rng, 0.5, 2.0);
      const CellScalarField p = random_cells(m, rng);
      const VelocityField u = random_velocity(m, rng);
      const VelocityField v = random_velocity(m, rng);
      const ViscosityTensorField mu = viscosity_from_cells(m, random_cells(m, rng, 0.1, 1.0));
      CHECK(max_abs_diff(divergence(m, u), reference::divergence(m, u)) <= 1e-12);
      CHECK(max_abs_diff(pressure_gradient(m, p), reference::pressure_gradient(m, p)) <= 1e-12);
      CHECK(max_abs_diff(diffusion_apply(m, mu, u), reference::diffusion_apply(m, mu, u)) <= 1e-11);
      const MassFluxSet a = mass_fluxes(m, rho, u);
      const MassFluxSet b = reference::mass_fluxes(m, rho, u);
      CHECK(max_abs_diff(a.flux, b.flux) <= 1e-14);
      CHECK(max_abs_diff(a.rho_face, b.rho_face) == 0.0);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (std::size_t t = 0; t < a.dual(i, j).size(); ++t) {
            CHECK(std::abs(a.dual(i, j)[t] - b.dual(i, j)[t]) <= 1e-14);
            CHECK(std::abs(a.dual_rho(i, j)[t] - b.dual_rho(i, j)[t]) <= 1e-14);
            CHECK(std::abs(a.dual_u(i, j)[t] - b.dual_u(i, j)[t]) <= 1e-13);
          }
        }
      }
      for (AdvectionScheme s : {AdvectionScheme::kCentered, AdvectionScheme::kUpwind}) {
        CHECK(max_abs_diff(convection_apply(m, a, v, s), reference::convection_apply(m, a, v, s)) <= 1e-11);
      }
    }
  }
}

TEST_CASE("threaded kernels are bit-identical to serial ones") {
  std::mt19937_64 rng(24);
  const MacMesh m = unit_square_mesh(16, 16, 3.0);
  const Exec par{4};
  const CellScalarField rho = random_cells(m, rng, 0.5, 2.0);
  const VelocityField u = random_velocity(m, rng);
  const ViscosityTensorField mu = viscosity_from_cells(m, random_cells(m, rng, 0.1, 1.0));
  CHECK(max_abs_diff(divergence(m, u), divergence(m, u, par)) == 0.0);
  CHECK(max_abs_diff(diffusion_apply(m, mu, u), diffusion_apply(m, mu, u, par)) == 0.0);
  const MassFluxSet a = mass_fluxes(m, rho, u);
  const MassFluxSet b = mass_fluxes(m, rho, u, par);
  CHECK(a.dual(0, 1) == b.dual(0, 1));
  CHECK(max_abs_diff(convection_apply(m, a, u, AdvectionScheme::kCentered),
                     convection_apply(m, a, u, AdvectionScheme::kCentered, par)) == 0.0);
}
