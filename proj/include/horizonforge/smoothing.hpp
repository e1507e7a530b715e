#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"

namespace hf::smoothing {

// Boundary-collar conventions here follow the outward normal -d/dt, so
// H_t = -(1/2) tr g'_t; quantities convert at the module boundary.

enum class CutoffKind { log_cutoff, chi };

struct CutoffFunction {
  CutoffKind kind = CutoffKind::log_cutoff;
  double delta = 0.0, eps = 0.0; // log_cutoff(delta, eps)
  double eps1 = 0.0;             // chi(eps1)
  RadialGrid grid;
  std::vector<double> value, d1, d2;
  double c0 = 0.0; // recorded derivative constant for chi
};

// log_cutoff: 1 on [0, delta eps], 0 on [eps, inf), t|tau'||log delta| <= 2.
// chi: chi(t) = t near 0, 0 beyond sqrt(eps1), chi' <= 1,
//      chi'' in [-2/eps1, 0] on [0, eps1].
CutoffFunction build_cutoff(CutoffKind kind, double a, double b = 0.0,
                            int points = 2049);

// Round-slice boundary collar g_t = r(t)^2 g_{S^m} + dt^2 in Fermi form.
struct BoundaryCollar {
  int m = 2;                 // slice dimension
  std::vector<double> t;     // t = 0 is the boundary
  std::vector<double> G;     // metric coefficient G(t) = r(t)^2
  double sff0() const;       // w.r.t. -d/dt: -(1/2) G'(0) / G(0) * ... scalar coeff
  geom::CollarMetric as_collar() const;
  std::vector<double> ambient_scalar() const;
  std::vector<double> mean_curvature() const; // H_t w.r.t. -d/dt
};

BoundaryCollar schwarzschild_boundary_collar(double mass, double x0, int n,
                                             double depth, int points);
BoundaryCollar product_boundary_collar(double radius, int m, double depth,
                                       int points);

struct CNormalCollar {
  double G0 = 1.0;   // boundary metric coefficient (slice radius squared)
  double sff0 = 0.0; // boundary sff scalar (tensor = sff0 * g0), -d/dt normal
  double C = 0.0;
  int m = 2;
  std::vector<double> t;
  std::vector<double> G; // exact C-normal samples G0 (1 - C t^2) - 2 t sff0 G0-normalized
};

struct CNormalResult {
  CNormalCollar cnormal;
  BoundaryCollar deformed;    // hat g on the full input window
  double achieved_c1_dev = 0.0;
  double min_R_drop = 0.0;    // min over the window of R_hat - R
  double C0 = 0.0;            // threshold from the input's second derivative
};

// Prop F.3: deform a boundary collar to exact C-normal form near t = 0
// without changing the boundary metric or sff; curvature drops at most eta.
// The curvature control of the log-cutoff realization scales like
// (C + |g''_0|) / |log delta|, so eta bounds the usable deformation size on
// a finite grid.
CNormalResult make_c_normal(const BoundaryCollar& collar, double C, double eta,
                            double window,
                            const Tolerances& tol = Tolerances::defaults());

// A collar that is C-normal on its whole depth (the natural input of
// prescribe_sff): G(t) = G0 (1 - C t^2) - 2 t sff0 G0.
CNormalResult exact_c_normal_collar(double G0, double sff0, double C, int m,
                                    double depth, int points);

struct PrescribeSffResult {
  BoundaryCollar deformed;
  double boundary_sff = 0.0; // achieved sff scalar at t = 0
  double min_H_t = 0.0;      // min over the window of H_t (-d/dt normal)
  double min_R_drop = 0.0;
  double max_c0_dev = 0.0;
};

// Prop F.5: interpolate the boundary second fundamental form to k_target
// inside a C-normal collar; tr k <= H_0 required.
PrescribeSffResult prescribe_sff(const CNormalResult& cnormal, double k_target,
                                 double eta, double eps1,
                                 const Tolerances& tol = Tolerances::defaults());

struct BarrierResult {
  std::vector<double> value;
  std::vector<double> laplacian; // defining right side (0 or -1)
  double d_left = 0.0, d_right = 0.0; // one-sided normal derivatives
};

enum class BarrierMode { harmonic, torsion };

// Radial conformal barriers on an annular tube band: harmonic 0 -> 1, or
// the torsion problem Delta zeta = -1 with zero boundary values.
BarrierResult radial_conformal_barrier(const geom::WarpedMetric& annulus,
                                       BarrierMode mode);

} // namespace hf::smoothing
