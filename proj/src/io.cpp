#include "acsim/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace acsim {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error("io: cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_run_record_csv(const std::string& path, const RunRecord& record) {
  auto out = open_out(path);
  out << "time,total_damage,u_min,u_max,free_energy,sq_h_norm,newton_iters,"
         "jump_count\n";
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    out << format_double(record.times[k]) << ','
        << format_double(record.total_damage[k]) << ','
        << format_double(record.u_min[k]) << ','
        << format_double(record.u_max[k]) << ','
        << format_double(record.free_energy[k]) << ','
        << format_double(record.sq_h_norm[k]) << ','
        << (k > 0 ? record.newton_iters[k - 1] : 0) << ','
        << (k > 0 ? record.jump_counts[k - 1] : 0) << '\n';
  }
}

void write_stats_csv(const std::string& path, const EnsembleStats& stats) {
  auto out = open_out(path);
  out << "time,mean_total_damage,std_total_damage,mean_umin,min_umin,"
         "mean_umax,max_umax,mean_sq_h_norm\n";
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    out << format_double(stats.times[k]) << ','
        << format_double(stats.mean_total_damage[k]) << ','
        << format_double(stats.std_total_damage[k]) << ','
        << format_double(stats.mean_umin[k]) << ','
        << format_double(stats.min_umin[k]) << ','
        << format_double(stats.mean_umax[k]) << ','
        << format_double(stats.max_umax[k]) << ','
        << format_double(stats.mean_sq_h_norm[k]) << '\n';
  }
}

void write_coupling_csv(const std::string& path, const CouplingRecord& record) {
  auto out = open_out(path);
  out << "time,mean_sq_distance\n";
  for (std::size_t k = 0; k < record.times.size(); ++k)
    out << format_double(record.times[k]) << ','
        << format_double(record.mean_sq_distance[k]) << '\n';
}

void write_snapshot_csv(const std::string& path, const Mesh& mesh,
                        const Field& u) {
  auto out = open_out(path);
  const int m = mesh.n + 1;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (i) out << ',';
      out << format_double(u[mesh.node_index(i, j)]);
    }
    out << '\n';
  }
}

void write_snapshot_pgm(const std::string& path, const Mesh& mesh,
                        const Field& u) {
  auto out = open_out(path);
  const int m = mesh.n + 1;
  out << "P2\n" << m << ' ' << m << "\n255\n";
  for (int j = m - 1; j >= 0; --j) {  // image rows run top-down
    for (int i = 0; i < m; ++i) {
      const double v = std::clamp(u[mesh.node_index(i, j)], 0.0, 1.0);
      out << static_cast<int>(std::lround(v * 255.0));
      out << (i + 1 < m ? ' ' : '\n');
    }
  }
}

void write_snapshot_vtk(const std::string& path, const Mesh& mesh,
                        const Field& u, double time) {
  auto out = open_out(path);
  const int m = mesh.n + 1;
  out << "# vtk DataFile Version 3.0\n";
  out << "damage field t=" << format_double(time) << "\n";
  out << "ASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << m << ' ' << m << " 1\n";
  out << "ORIGIN 0 0 0\n";
  out << "SPACING " << format_double(mesh.h) << ' ' << format_double(mesh.h)
      << " 1\n";
  out << "POINT_DATA " << m * m << "\n";
  out << "SCALARS u double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      out << format_double(u[mesh.node_index(i, j)]) << '\n';
}

void write_manifest(const std::string& path, const RunConfig& config) {
  auto out = open_out(path);
  out << "code_version = " << kCodeVersion << "\n";
  out << serialize_config(config);
}

std::string snapshot_basename(double time) {
  std::string t = format_double(time);
  return "snap_t" + t + ".csv";
}

}  // namespace acsim
