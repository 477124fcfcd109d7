#include "macflow/io.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace macflow {

void write_vtk(std::ostream& os, const MacMesh& mesh, const TimeState& s, const std::string& title) {
  const int d = mesh.dim();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\n" << title << " step " << s.step << " t " << s.t << "\nASCII\n";
  os << "DATASET RECTILINEAR_GRID\n";
  os << "DIMENSIONS " << mesh.nodes(0).size() << " " << (d > 1 ? mesh.nodes(1).size() : 1) << " "
     << (d > 2 ? mesh.nodes(2).size() : 1) << "\n";
  const char* names[] = {"X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"};
  for (int a = 0; a < kMaxDim; ++a) {
    if (a < d) {
      os << names[a] << " " << mesh.nodes(a).size() << " double\n";
      for (double x : mesh.nodes(a)) os << x << " ";
      os << "\n";
    } else {
      os << names[a] << " 1 double\n0\n";
    }
  }
  const std::size_t nc = mesh.num_cells();
  os << "CELL_DATA " << nc << "\n";
  os << "SCALARS density double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < nc; ++k) os << s.rho[k] << "\n";
  os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < nc; ++k) os << s.p[k] << "\n";
  os << "VECTORS velocity double\n";
  for (std::size_t k = 0; k < nc; ++k) {
    const CellInfo& c = mesh.cell(static_cast<int>(k));
    for (int a = 0; a < kMaxDim; ++a) {
      const double v = a < d ? 0.5 * (s.u.comp[a][c.faces[a][0]] + s.u.comp[a][c.faces[a][1]]) : 0.0;
      os << v << (a + 1 < kMaxDim ? " " : "\n");
    }
  }
  os.precision(old_prec);
}

void write_raw_fields(std::ostream& os, const MacMesh& mesh, const TimeState& s) {
  const auto old_prec = os.precision();
  os << std::setprecision(17) << "field,id,x,y,z,value\n";
  auto row = [&](const std::string& field, std::size_t id, const Vec3& x, double v) {
    os << field << "," << id << "," << x[0] << "," << x[1] << "," << x[2] << "," << v << "\n";
  };
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) row("rho", k, mesh.cell(static_cast<int>(k)).center, s.rho[k]);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) row("p", k, mesh.cell(static_cast<int>(k)).center, s.p[k]);
  for (int i = 0; i < mesh.dim(); ++i) {
    const std::string name = "u" + std::to_string(i);
    for (std::size_t f = 0; f < mesh.num_faces(i); ++f) {
      row(name, f, mesh.face(i, static_cast<int>(f)).center, s.u.comp[i][f]);
    }
  }
  os.precision(old_prec);
}

CsvSink::CsvSink(std::ostream& os) : os_(&os) { write_diagnostics_header(os); }

void CsvSink::record(const DiagnosticsRecord& r) { write_diagnostics_row(*os_, r); }

VtkSnapshotSink::VtkSnapshotSink(const MacMesh& mesh, std::filesystem::path dir)
    : mesh_(&mesh), dir_(std::move(dir)) {}

void VtkSnapshotSink::snapshot(const TimeState& s) {
  char name[64];
  std::snprintf(name, sizeof name, "snapshot_%06d.vtk", s.step);
  std::ofstream out = open_output(dir_ / name);
  write_vtk(out, *mesh_, s);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace macflow
