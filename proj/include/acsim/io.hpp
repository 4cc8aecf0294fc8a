#pragma once

#include <string>

#include "acsim/config.hpp"
#include "acsim/ensemble.hpp"

namespace acsim {

inline constexpr const char* kCodeVersion = "acsim 0.1.0";

// Shortest round-trip decimal representation ('.' decimal point).
std::string format_double(double v);

void write_run_record_csv(const std::string& path, const RunRecord& record);
void write_stats_csv(const std::string& path, const EnsembleStats& stats);
void write_coupling_csv(const std::string& path, const CouplingRecord& record);

// Snapshot of the nodal field as a (n+1) x (n+1) row-major CSV grid.
void write_snapshot_csv(const std::string& path, const Mesh& mesh,
                        const Field& u);
// 8-bit ASCII PGM raster, u scaled to 0..255.
void write_snapshot_pgm(const std::string& path, const Mesh& mesh,
                        const Field& u);
// Legacy-VTK structured points, for external visualization tools.
void write_snapshot_vtk(const std::string& path, const Mesh& mesh,
                        const Field& u, double time);

// Full resolved configuration + code version, key=value. Identical manifests
// imply byte-identical outputs.
void write_manifest(const std::string& path, const RunConfig& config);

std::string snapshot_basename(double time);

}  // namespace acsim
