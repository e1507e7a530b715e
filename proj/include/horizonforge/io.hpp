#pragma once

#include <map>
#include <string>
#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/schwarzschild.hpp"

namespace hf::io {

// Shared JSON profile document. kind selects the payload:
//   warped_closed / tube_profile: grid + values
//   phase_plane:                  n + x + y
//   collar:                       n, epsilon, A, t_grid, g (per-t [q..,p..]
//                                 or [r]), u, rho, tau
struct ProfileDocument {
  int schema_version = 1;
  std::string kind;
  int n = 2;
  RadialGrid grid;
  std::vector<double> values;
  std::vector<double> x, y;
  std::map<std::string, std::string> metadata;
  double epsilon = 0.0, A = 1.0;
  std::vector<double> t_grid, rho, tau;
  std::vector<std::vector<double>> g, u;
};

std::string serialize(const ProfileDocument& doc);
ProfileDocument deserialize(const std::string& bytes);

ProfileDocument from_metric(const geom::WarpedMetric& m);
geom::WarpedMetric to_metric(const ProfileDocument& doc);
ProfileDocument from_planar(const schw::PlanarProfile& p);
schw::PlanarProfile to_planar(const ProfileDocument& doc);
ProfileDocument from_collar(const geom::CollarMetric& c);
geom::CollarMetric to_collar(const ProfileDocument& doc);

// Strict run configuration for the pipeline entry point.
struct RunConfig {
  std::string command;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> inputs;   // named input files
  std::map<std::string, std::string> outputs;  // named output files
  std::map<std::string, double> params;
  int grid_points = 2048;
};

RunConfig parse_run_config(const std::string& bytes);

std::string format_double(double v); // 17 significant digits
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// CSV with deterministic 17-digit formatting.
std::string to_csv(const std::vector<std::string>& headers,
                   const std::vector<std::vector<double>>& columns);

} // namespace hf::io
