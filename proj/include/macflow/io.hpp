#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>

#include "macflow/mesh.hpp"
#include "macflow/simulation.hpp"

namespace macflow {

/// Legacy ASCII VTK rectilinear grid. Cell data: density, pressure and the
/// velocity averaged from the two faces of each cell (for viewing only).
void write_vtk(std::ostream& os, const MacMesh& mesh, const TimeState& s, const std::string& title = "macflow");

/// Raw unknowns, one row per entity:
///   field,id,x,y,z,value
/// with field in {rho, p} at cell centres and u0, u1, u2 at face centres.
void write_raw_fields(std::ostream& os, const MacMesh& mesh, const TimeState& s);

/// Streams records as headered CSV.
class CsvSink : public SimulationSink {
 public:
  explicit CsvSink(std::ostream& os);
  void record(const DiagnosticsRecord& r) override;

 private:
  std::ostream* os_;
};

/// Writes snapshot_<step>.vtk into a directory.
class VtkSnapshotSink : public SimulationSink {
 public:
  VtkSnapshotSink(const MacMesh& mesh, std::filesystem::path dir);
  void snapshot(const TimeState& s) override;

 private:
  const MacMesh* mesh_;
  std::filesystem::path dir_;
};

/// Forwards to several sinks.
class TeeSink : public SimulationSink {
 public:
  void add(SimulationSink* s) { sinks_.push_back(s); }
  void record(const DiagnosticsRecord& r) override {
    for (auto* s : sinks_) s->record(r);
  }
  void snapshot(const TimeState& st) override {
    for (auto* s : sinks_) s->snapshot(st);
  }

 private:
  std::vector<SimulationSink*> sinks_;
};

/// Opens a file for writing or throws std::runtime_error naming it.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace macflow
