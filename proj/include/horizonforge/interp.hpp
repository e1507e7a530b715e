#pragma once

#include <vector>

namespace hf::interp {

// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing knots.
// Preserves monotone data, C^1; used for reparametrizations and resampling.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;
  double derivative(double x) const;

 private:
  std::vector<double> x_, y_, d_; // knots, values, knot slopes
  std::size_t locate(double x) const;
};

// Natural cubic spline (C^2) on strictly increasing knots.
class Spline {
 public:
  Spline() = default;
  Spline(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, m_; // knots, values, second derivatives
  std::size_t locate(double x) const;
};

// Cumulative trapezoid of f on a uniform grid with spacing h; out[0] = 0.
std::vector<double> cumtrapz(const std::vector<double>& f, double h);

std::vector<double> linspace(double a, double b, int n);

} // namespace hf::interp
