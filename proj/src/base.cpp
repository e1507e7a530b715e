#include "horizonforge/base.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "horizonforge/kernels.hpp"

namespace hf {

Tolerances Tolerances::defaults() {
  Tolerances t;
  if (const char* env = std::getenv("HORIZONFORGE_TOL"))
    t = parse(env, t);
  return t;
}

Tolerances Tolerances::parse(const std::string& spec, Tolerances base) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ValidationError("tolerance entry missing '=': " + item);
    std::string key = item.substr(0, eq);
    double val = std::stod(item.substr(eq + 1));
    if (key == "eigen_residual") base.eigen_residual = val;
    else if (key == "membership") base.membership = val;
    else if (key == "closure") base.closure = val;
    else if (key == "orbit_drift") base.orbit_drift = val;
    else if (key == "twist_volume") base.twist_volume = val;
    else if (key == "boundary_match") base.boundary_match = val;
    else throw ValidationError("unknown tolerance key: " + key);
  }
  return base;
}

std::map<std::string, double> Tolerances::as_map() const {
  return {{"eigen_residual", eigen_residual}, {"membership", membership},
          {"closure", closure},               {"orbit_drift", orbit_drift},
          {"twist_volume", twist_volume},     {"boundary_match", boundary_match}};
}

double unit_sphere_volume(int n) {
  if (n < 1) throw ValidationError("unit_sphere_volume: n >= 1 required");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = kern::sum(kern::cspan(f.data() + 1, f.size() - 2));
  return h * (s + 0.5 * (f.front() + f.back()));
}

} // namespace hf
