#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"

namespace hf::schw {

// Phase-plane curve (x, y(x)) = (slice radius, profile slope) of a
// mean-convex round normal foliation. y may vanish only at the first sample
// (a horizon); the PSC margin (1-y^2)/(xy) - 2/(n-1) y' is kept per sample.
struct PlanarProfile {
  std::vector<double> x;
  std::vector<double> y;
  int n = 2; // slice dimension
  std::vector<double> margin;

  void validate() const;
  void recompute_margin();
  double x_front() const { return x.front(); }
  double x_back() const { return x.back(); }
};

struct SchwarzschildOrbit {
  double C = 0.0;
  int n = 2;

  double mass() const { return 0.5 * C; }
  double horizon_radius() const;
  double y(double xv) const;      // sqrt(1 - C x^{1-n})
  double slope(double xv) const;  // dy/dx along the orbit
  PlanarProfile band(double x0, double x1, int points) const;
};

// Orbit through the phase-plane point (x0, y0): C = x0^{n-1}(1 - y0^2).
SchwarzschildOrbit orbit(double x0, double y0, int n);

// Refined-gluing feasibility: condition (2'), strictly.
bool gluing_feasible(const PlanarProfile& p1, const PlanarProfile& p2);

// Merge p1, p2 across a monotone bridge that crosses the orbit flowlines;
// the inputs are kept verbatim and the strict PSC inequality is verified at
// every interior bridge sample.
PlanarProfile glue_profiles(const PlanarProfile& p1, const PlanarProfile& p2,
                            int bridge_points = 257);

// Bend-and-glue two exterior Schwarzschild manifolds: the mass-m1 region
// below rho1 and the mass-m2 region above rho2 survive verbatim. The profile
// starts at the mass-m1 horizon (y = 0) and ends at x_out.
PlanarProfile bend_and_glue(double m1, double m2, double rho1, double rho2,
                            int n, double x_out = 0.0,
                            int points_per_segment = 513);

struct TorpedoCap {
  double alpha = 0.0, beta = 0.0, r1 = 0.0;
  std::vector<double> r, u; // dense near the vertical tangent at r = alpha
  double eval(double rv) const;
  double eval_d1(double rv) const;
};

// Convex cap solving kappa = sin(theta)/(2 rho) with u(r1) = beta; alpha is
// the closing radius where the tangent turns vertical.
TorpedoCap torpedo_cap(double alpha, double beta, double r1, int points = 1025);

// Mass read from the terminal exact-Schwarzschild segment (last tail_frac of
// the x-range); errors out if the orbit constant drifts there.
double adm_mass(const PlanarProfile& p,
                const Tolerances& tol = Tolerances::defaults(),
                double tail_frac = 0.1);

// (1/2) (volume / sigma_n)^{(n-1)/n}.
double penrose_bound(double volume, int n);

// Arclength tube profile f(t) for the mean-convex part of the curve
// (requires y > 0 throughout).
geom::WarpedMetric to_tube_profile(const PlanarProfile& p, int points);

} // namespace hf::schw
