#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hf {

// Validation failures map to CLI exit code 2, solver failures to 3.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform 1D sample grid; samples sit at a + i*h exactly.
struct RadialGrid {
  double a = 0.0;
  double b = 1.0;
  int points = 2048;

  double h() const { return (b - a) / double(points - 1); }
  double x(int i) const { return a + double(i) * h(); }
  std::vector<double> samples() const {
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = x(i);
    xs.back() = b;
    return xs;
  }
  void validate() const {
    if (!(a < b)) throw ValidationError("RadialGrid: requires a < b");
    if (points < 8) throw ValidationError("RadialGrid: requires points >= 8");
  }
  bool operator==(const RadialGrid&) const = default;
};

// Central tolerance record. Defaults can be overridden via the
// HORIZONFORGE_TOL environment variable ("key=value,key=value").
struct Tolerances {
  double eigen_residual = 1e-10;
  double membership = 1e-8;
  double closure = 1e-2;
  double orbit_drift = 1e-7;
  double twist_volume = 1e-8;
  double boundary_match = 1e-12;

  static Tolerances defaults();
  static Tolerances parse(const std::string& spec, Tolerances base);
  std::map<std::string, double> as_map() const;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Volume of the unit n-sphere in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double unit_sphere_volume(int n);

// Composite trapezoid rule on a uniform grid.
double trapezoid(const std::vector<double>& f, double h);

} // namespace hf
