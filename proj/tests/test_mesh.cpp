#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "macflow/mesh.hpp"
#include "support.hpp"

using namespace macflow;
using testing_support::mesh_from;

TEST_CASE("counts for a two-cell strip") {
  const MacMesh m = mesh_from({0.0, 0.5, 1.0}, {0.0, 1.0});
  CHECK(m.num_cells() == 2);
  CHECK(m.num_faces(0) == 3);
  CHECK(m.num_faces(1) == 4);
}

TEST_CASE("uniform 2x2 measures") {
  const MacMesh m = unit_square_mesh(2, 2);
  for (const CellInfo& c : m.cells()) CHECK(c.volume == doctest::Approx(0.25));
  for (int i = 0; i < 2; ++i) {
    for (const FaceInfo& f : m.faces(i)) {
      if (f.interior) CHECK(f.dual_volume == doctest::Approx(0.25));
    }
  }
}

TEST_CASE("dual cell of an interior face sums unequal halves") {
  const MacMesh m = mesh_from({0.0, 0.25, 1.0}, {0.0, 1.0});
  const FaceInfo& f = m.face(0, 1);
  REQUIRE(f.interior);
  CHECK(f.half_lo == doctest::Approx(0.125));
  CHECK(f.half_hi == doctest::Approx(0.375));
  CHECK(f.dual_volume == doctest::Approx(0.5));
}

TEST_CASE("metrics") {
  CHECK(mesh_metrics(unit_square_mesh(2, 2)).eta == doctest::Approx(1.0));
  CHECK(mesh_metrics(mesh_from({0.0, 0.25, 1.0}, {0.0, 1.0})).eta == doctest::Approx(4.0));
  CHECK(mesh_metrics(mesh_from({0.0, 0.5, 1.0}, {0.0, 1.0})).h == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("eta matches an exhaustive pairwise maximum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x{0.0}, y{0.0};
    for (int k = 0; k < 4; ++k) x.push_back(x.back() + w(rng));
    for (int k = 0; k < 5; ++k) y.push_back(y.back() + w(rng));
    const MacMesh m = mesh_from(x, y);
    double eta = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (i == j) continue;
        for (const FaceInfo& a : m.faces(i)) {
          for (const FaceInfo& b : m.faces(j)) eta = std::max(eta, a.area / b.area);
        }
      }
    }
    double h = 0.0;
    for (const CellInfo& c : m.cells()) h = std::max(h, std::hypot(c.width[0], c.width[1]));
    const MeshMetrics mm = mesh_metrics(m);
    CHECK(mm.eta == doctest::Approx(eta).epsilon(1e-14));
    CHECK(mm.eta >= 1.0);
    CHECK(mm.h == doctest::Approx(h).epsilon(1e-14));
  }
}

TEST_CASE("dual faces of an interior x-face") {
  const MacMesh m = unit_square_mesh(2, 2);
  const int s = m.face_id(0, {1, 0, 0});
  const auto refs = m.dual_faces_of(0, s);
  REQUIRE(refs.size() == 4);
  int parallel = 0, transverse = 0;
  for (const DualRef& r : refs) {
    const DualFaceInfo& d = m.dual(0, r.j, r.id);
    if (r.j == 0) {
      ++parallel;
      CHECK(d.kind == DualCase::kParallel);
      CHECK(d.cell >= 0);
    } else {
      ++transverse;
      CHECK(d.kind == DualCase::kTransverse);
      CHECK(d.tau_lo >= 0);
      CHECK(d.tau_hi >= 0);
    }
  }
  CHECK(parallel == 2);
  CHECK(transverse == 2);
}

TEST_CASE("x-face on the wall next to a corner has an exterior transverse dual face") {
  const MacMesh m = unit_square_mesh(2, 2);
  const int s = m.face_id(0, {0, 0, 0});
  REQUIRE_FALSE(m.face(0, s).interior);
  int exterior = 0;
  for (const DualRef& r : m.dual_faces_of(0, s)) {
    const DualFaceInfo& d = m.dual(0, r.j, r.id);
    if (r.j == 1 && !d.interior) {
      ++exterior;
      CHECK(d.center[1] == doctest::Approx(0.0));
    }
  }
  CHECK(exterior == 1);
}

TEST_CASE("transverse dual face on a uniform mesh has the length of one cell") {
  const MacMesh m = unit_square_mesh(2, 2);
  for (const DualFaceInfo& d : m.duals(0, 1)) {
    if (d.interior && d.tau_lo >= 0 && d.tau_hi >= 0) {
      const double expect = 0.5 * m.face(1, d.tau_lo).area + 0.5 * m.face(1, d.tau_hi).area;
      CHECK(d.area == doctest::Approx(0.5));
      CHECK(d.area == doctest::Approx(expect));
    }
  }
}

TEST_CASE("invalid breakpoints are rejected with the axis index") {
  CHECK_THROWS_WITH_AS(mesh_from({0.0, 1.0}, {0.0, 0.5, 0.5}), doctest::Contains("axis 1"), std::invalid_argument);
  CHECK_THROWS_AS(mesh_from({0.0}, {0.0, 1.0}), std::invalid_argument);
  const MacMesh m = unit_square_mesh(2, 2);
  CHECK_THROWS_AS(m.dual_faces_of(0, 99), std::out_of_range);
  CHECK_THROWS_AS(m.dual_faces_of(2, 0), std::out_of_range);
}

TEST_CASE("stretched partition hits the requested width ratio") {
  const AxisPartition p = AxisPartition::stretched(0.0, 2.0, 16, 3.0);
  double wmin = 1e9, wmax = 0.0;
  for (int k = 0; k < p.cells(); ++k) {
    const double w = p.breakpoints[k + 1] - p.breakpoints[k];
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  CHECK(wmax / wmin == doctest::Approx(3.0));
  CHECK(p.breakpoints.front() == 0.0);
  CHECK(p.breakpoints.back() == 2.0);
}

namespace {

void check_partitions(const MacMesh& m) {
  const double vol = m.domain_volume();
  double cells = 0.0;
  for (const CellInfo& c : m.cells()) cells += c.volume;
  CHECK(std::abs(cells - vol) <= 1e-12 * vol);
  for (int i = 0; i < m.dim(); ++i) {
    double dual = 0.0;
    for (const FaceInfo& f : m.faces(i)) {
      dual += f.dual_volume;
      CHECK(f.area > 0.0);
      if (f.interior) {
        CHECK(f.lo_cell >= 0);
        CHECK(f.hi_cell >= 0);
      }
    }
    CHECK(std::abs(dual - vol) <= 1e-12 * vol);
    for (int j = 0; j < m.dim(); ++j) {
      double dd = 0.0;
      for (const DualFaceInfo& d : m.duals(i, j)) {
        dd += d.volume;
        CHECK(d.dist > 0.0);
      }
      CHECK(std::abs(dd - vol) <= 1e-12 * vol);
      // (i, j) and (j, i) describe the same cells.
      REQUIRE(m.num_dual(i, j) == m.num_dual(j, i));
      for (std::size_t t = 0; t < m.num_dual(i, j); ++t) {
        const DualFaceInfo& a = m.dual(i, j, static_cast<int>(t));
        const DualFaceInfo& b = m.dual(j, i, static_cast<int>(t));
        CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-14));
        for (int k = 0; k < m.dim(); ++k) CHECK(a.center[k] == doctest::Approx(b.center[k]).epsilon(1e-14));
      }
    }
    // (i, i) reproduces the primal cells, and |sigma| / |K| = 1 / d.
    for (std::size_t t = 0; t < m.num_cells(); ++t) {
      const DualFaceInfo& d = m.dual(i, i, static_cast<int>(t));
      CHECK(d.volume == doctest::Approx(m.cell(static_cast<int>(t)).volume).epsilon(1e-14));
      CHECK(m.face(i, d.lo_face).area / d.volume == doctest::Approx(1.0 / d.dist).epsilon(1e-13));
    }
  }
}

}  // namespace

TEST_CASE("measure partitions and transversal symmetry on random grids") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> n(1, 7);
  std::uniform_real_distribution<double> r(1.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    check_partitions(unit_square_mesh(n(rng), n(rng), r(rng)));
  }
}

TEST_CASE("three-dimensional grids go through the same construction") {
  const std::array<AxisPartition, 3> axes{AxisPartition::stretched(0.0, 1.0, 2, 2.0),
                                          AxisPartition::uniform(0.0, 2.0, 3),
                                          AxisPartition::stretched(-1.0, 1.0, 2, 1.5)};
  const MacMesh m(axes);
  CHECK(m.num_cells() == 12);
  CHECK(m.num_faces(2) == 2 * 3 * 3);
  CHECK(m.dual_faces_of(0, m.face_id(0, {1, 1, 1})).size() == 6);
  check_partitions(m);
}
