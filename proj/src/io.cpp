#include "horizonforge/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hf::io {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_nonfinite(const std::vector<double>& vs, const char* field) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (!std::isfinite(vs[i]))
      throw ValidationError(std::string("document rejects non-finite value in '") +
                            field + "' at index " + std::to_string(i));
}

void check_keys(const ordered_json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok)
      throw ValidationError("unknown key '" + it.key() + "' in " + where);
  }
}

std::vector<double> get_array(const ordered_json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number())
      throw ValidationError(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

} // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize(const ProfileDocument& doc) {
  reject_nonfinite(doc.values, "values");
  reject_nonfinite(doc.x, "x");
  reject_nonfinite(doc.y, "y");
  ordered_json j;
  j["schema_version"] = doc.schema_version;
  j["kind"] = doc.kind;
  j["n"] = doc.n;
  if (doc.kind == "warped_closed" || doc.kind == "tube_profile") {
    j["grid"] = {{"a", doc.grid.a}, {"b", doc.grid.b}, {"points", doc.grid.points}};
    j["values"] = doc.values;
  } else if (doc.kind == "phase_plane") {
    j["x"] = doc.x;
    j["y"] = doc.y;
  } else if (doc.kind == "collar") {
    j["epsilon"] = doc.epsilon;
    j["A"] = doc.A;
    j["grid"] = {{"a", doc.grid.a}, {"b", doc.grid.b}, {"points", doc.grid.points}};
    j["t_grid"] = doc.t_grid;
    j["g"] = doc.g;
    j["u"] = doc.u;
    j["rho"] = doc.rho;
    j["tau"] = doc.tau;
  } else {
    throw ValidationError("serialize: unsupported document kind '" + doc.kind + "'");
  }
  if (!doc.metadata.empty()) j["metadata"] = doc.metadata;
  return j.dump(2) + "\n";
}

ProfileDocument deserialize(const std::string& bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("JSON parse failure: ") + e.what());
  }
  if (!j.contains("schema_version"))
    throw ValidationError("document missing schema_version");
  int ver = j.at("schema_version").get<int>();
  if (ver != 1)
    throw ValidationError("unsupported schema_version " + std::to_string(ver));
  check_keys(j, {"schema_version", "kind", "n", "grid", "values", "x", "y",
                 "metadata", "epsilon", "A", "t_grid", "g", "u", "rho", "tau"},
             "profile document");
  ProfileDocument doc;
  doc.schema_version = ver;
  doc.kind = j.at("kind").get<std::string>();
  doc.n = j.at("n").get<int>();
  if (j.contains("grid")) {
    check_keys(j.at("grid"), {"a", "b", "points"}, "grid");
    doc.grid.a = j.at("grid").at("a").get<double>();
    doc.grid.b = j.at("grid").at("b").get<double>();
    doc.grid.points = j.at("grid").at("points").get<int>();
  }
  doc.values = get_array(j, "values");
  doc.x = get_array(j, "x");
  doc.y = get_array(j, "y");
  if (j.contains("epsilon")) doc.epsilon = j.at("epsilon").get<double>();
  if (j.contains("A")) doc.A = j.at("A").get<double>();
  doc.t_grid = get_array(j, "t_grid");
  doc.rho = get_array(j, "rho");
  doc.tau = get_array(j, "tau");
  if (j.contains("g"))
    for (const auto& row : j.at("g")) doc.g.push_back(row.get<std::vector<double>>());
  if (j.contains("u"))
    for (const auto& row : j.at("u")) doc.u.push_back(row.get<std::vector<double>>());
  if (j.contains("metadata"))
    for (auto it = j.at("metadata").begin(); it != j.at("metadata").end(); ++it)
      doc.metadata[it.key()] = it.value().get<std::string>();
  reject_nonfinite(doc.values, "values");
  reject_nonfinite(doc.x, "x");
  reject_nonfinite(doc.y, "y");
  return doc;
}

ProfileDocument from_metric(const geom::WarpedMetric& m) {
  ProfileDocument doc;
  doc.kind = m.kind == geom::MetricKind::closed_sphere ? "warped_closed" : "tube_profile";
  doc.n = m.n;
  doc.grid = m.grid;
  doc.values = m.profile;
  return doc;
}

geom::WarpedMetric to_metric(const ProfileDocument& doc) {
  geom::WarpedMetric m;
  if (doc.kind == "warped_closed") {
    m.kind = geom::MetricKind::closed_sphere;
    m.pole_closure = true;
  } else if (doc.kind == "tube_profile") {
    m.kind = geom::MetricKind::tube;
  } else {
    throw ValidationError("to_metric: document kind '" + doc.kind + "' is not a metric");
  }
  m.n = doc.n;
  m.grid = doc.grid;
  m.profile = doc.values;
  if (int(m.profile.size()) != m.grid.points)
    throw ValidationError("to_metric: values length != grid.points");
  return m;
}

ProfileDocument from_planar(const schw::PlanarProfile& p) {
  ProfileDocument doc;
  doc.kind = "phase_plane";
  doc.n = p.n;
  doc.x = p.x;
  doc.y = p.y;
  return doc;
}

schw::PlanarProfile to_planar(const ProfileDocument& doc) {
  if (doc.kind != "phase_plane")
    throw ValidationError("to_planar: document kind is not phase_plane");
  schw::PlanarProfile p;
  p.n = doc.n;
  p.x = doc.x;
  p.y = doc.y;
  p.recompute_margin();
  return p;
}

ProfileDocument from_collar(const geom::CollarMetric& c) {
  ProfileDocument doc;
  doc.kind = "collar";
  doc.n = c.slices.m;
  doc.epsilon = c.epsilon;
  doc.A = c.A;
  doc.t_grid = c.slices.t;
  doc.rho = c.rho;
  doc.tau = c.tau;
  doc.grid = c.slices.round ? RadialGrid{0.0, 1.0, 8} : c.slices.x;
  const int nt = c.slices.nt();
  for (int it = 0; it < nt; ++it) {
    if (c.slices.round) {
      doc.g.push_back({c.slices.r[it]});
    } else {
      std::vector<double> row = c.slices.q[it];
      row.insert(row.end(), c.slices.p[it].begin(), c.slices.p[it].end());
      doc.g.push_back(std::move(row));
    }
    doc.u.push_back(c.lapse[it]);
  }
  return doc;
}

geom::CollarMetric to_collar(const ProfileDocument& doc) {
  if (doc.kind != "collar")
    throw ValidationError("to_collar: document kind is not collar");
  geom::CollarMetric c;
  c.epsilon = doc.epsilon;
  c.A = doc.A;
  c.rho = doc.rho;
  c.tau = doc.tau;
  c.slices.m = doc.n;
  c.slices.t = doc.t_grid;
  c.lapse = doc.u;
  if (doc.g.empty()) throw ValidationError("to_collar: missing slice data");
  if (doc.g.front().size() == 1) {
    c.slices.round = true;
    for (const auto& row : doc.g) c.slices.r.push_back(row.at(0));
  } else {
    c.slices.round = false;
    c.slices.x = doc.grid;
    const int nx = doc.grid.points;
    for (const auto& row : doc.g) {
      if (int(row.size()) != 2 * nx)
        throw ValidationError("to_collar: slice row length != 2 grid.points");
      c.slices.q.emplace_back(row.begin(), row.begin() + nx);
      c.slices.p.emplace_back(row.begin() + nx, row.end());
    }
  }
  return c;
}

RunConfig parse_run_config(const std::string& bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config parse failure: ") + e.what());
  }
  check_keys(j, {"command", "tolerances", "inputs", "outputs", "params",
                 "grid_points"},
             "run config");
  RunConfig cfg;
  if (!j.contains("command"))
    throw ValidationError("run config missing 'command'");
  cfg.command = j.at("command").get<std::string>();
  if (j.contains("tolerances")) {
    Tolerances probe = Tolerances::defaults();
    for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it) {
      // reuse the strict tolerance-key validation
      probe = Tolerances::parse(it.key() + "=" + format_double(it.value().get<double>()), probe);
      cfg.tolerances[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("inputs"))
    for (auto it = j.at("inputs").begin(); it != j.at("inputs").end(); ++it)
      cfg.inputs[it.key()] = it.value().get<std::string>();
  if (j.contains("outputs"))
    for (auto it = j.at("outputs").begin(); it != j.at("outputs").end(); ++it)
      cfg.outputs[it.key()] = it.value().get<std::string>();
  if (j.contains("params"))
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it)
      cfg.params[it.key()] = it.value().get<double>();
  if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<int>();
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open for writing: " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string to_csv(const std::vector<std::string>& headers,
                   const std::vector<std::vector<double>>& columns) {
  std::ostringstream out;
  for (std::size_t c = 0; c < headers.size(); ++c)
    out << headers[c] << (c + 1 < headers.size() ? "," : "\n");
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << format_double(columns[c][r]) << (c + 1 < columns.size() ? "," : "\n");
  return out.str();
}

} // namespace hf::io
