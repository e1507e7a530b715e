#pragma once

#include <optional>
#include <vector>

#include "horizonforge/base.hpp"

namespace hf::geom {

enum class MetricKind { closed_sphere, tube };

// Rotationally symmetric metric on a single manifold:
//   closed_sphere: d rho^2 + phi(rho)^2 g_{S^{n-1}} on S^n, profile = phi
//   tube:          f(t)^2 g_{S^n} + dt^2 on S^n x I,   profile = f
// For closed spheres n is the dimension of the sphere; for tubes n is the
// dimension of the slice sphere.
struct WarpedMetric {
  MetricKind kind = MetricKind::closed_sphere;
  int n = 2;
  RadialGrid grid;
  std::vector<double> profile;
  bool pole_closure = false;

  int slice_dim() const { return kind == MetricKind::tube ? n : n - 1; }
  double volume() const;
  void validate(const Tolerances& tol = Tolerances::defaults()) const;
};

WarpedMetric round_sphere(int n, double radius, int points);

// Per-slice extrinsic data plus the ambient scalar curvature along the
// foliation (outward normal +d/dt, H = (2u)^{-1} Tr dg/dt).
struct SliceGeometry {
  std::vector<double> sff_coeff;
  std::vector<double> H;
  std::vector<double> sff_norm_sq;
  std::vector<double> R;
  bool psc = false;
};

SliceGeometry tube_geometry(const WarpedMetric& m,
                            const Tolerances& tol = Tolerances::defaults());

// Scalar curvature of a closed warped sphere, pole limits by one-sided
// stencils on the odd/even symmetric extension. order = 2 or 4.
std::vector<double> warped_closed_scalar(
    const WarpedMetric& m, int order = 2,
    const Tolerances& tol = Tolerances::defaults());

struct ConformalResult {
  std::vector<double> R_bar;
  std::vector<double> H_bar;
};

// gbar = u^{4/(n-2)} g, n >= 3.
ConformalResult conformal_transform(const std::vector<double>& R_g,
                                    const std::vector<double>& u,
                                    const std::vector<double>& laplacian_u,
                                    int n,
                                    const std::vector<double>& normal_derivative_u,
                                    const std::vector<double>& H);

// ---------------------------------------------------------------------------
// Radial slice families and collars.

// One-parameter family of rotationally symmetric metrics on a slice S^m,
// sampled on a fixed coordinate grid:
//   warped: g_t = q(x,t)^2 dx^2 + p(x,t)^2 g_{S^{m-1}}
//   round:  g_t = r(t)^2 g_{S^m}
struct RadialFamily {
  int m = 2; // slice dimension
  RadialGrid x;
  std::vector<double> t;
  std::vector<std::vector<double>> q, p; // [t][x], warped variant
  std::vector<double> r;                 // [t], round variant
  bool round = false;
  bool closed = true; // warped slices close at both poles

  int nt() const { return int(t.size()); }
  int nx() const { return round ? 0 : x.points; }
  double dt() const { return t.size() > 1 ? (t.back() - t.front()) / double(t.size() - 1) : 0.0; }
  double slice_volume(int it) const;
  void validate() const;
};

// Metric g_t + lapse(x,t)^2 dt^2 on (slice) x [t0,t1]. The slice family is
// stored fully materialized (any (1+eps rho) scaling already applied).
struct CollarMetric {
  RadialFamily slices;
  std::vector<std::vector<double>> lapse; // [t][x]; single sample per t if round
  double A = 1.0;
  double epsilon = 0.0;
  std::vector<double> rho, tau; // schedule samples on the t grid (may be empty)

  void validate() const;
};

// Intrinsic scalar curvature samples of one slice of a family.
std::vector<double> family_slice_scalar(const RadialFamily& fam, int it,
                                        int order = 4);

// Measure-weighted radial Laplacian of a slice function, discretized with the
// same flux form the eigensolver uses (hat-function stiffness over lumped
// mass). For round slices of a radial function this is zero.
std::vector<double> radial_laplacian(const RadialFamily& fam, int it,
                                     const std::vector<double>& u);

SliceGeometry collar_slice_geometry(const CollarMetric& c, int it);

// slice_curvature for every slice; SliceGeometry::R holds the ambient scalar
// curvature R_h restricted to the slice.
std::vector<SliceGeometry> slice_curvature(const CollarMetric& c);

// Mean curvature of graph(f) in a unit-lapse collar, f a radial function of
// x with values in the collar's t-range.
std::vector<double> fermi_graph_mean_curvature(const CollarMetric& c,
                                               const std::vector<double>& f);

// ---------------------------------------------------------------------------
// Profile calculus helpers (closure-aware derivatives).

// Derivative of samples on a uniform grid. For closed profiles the ghosts
// use the symmetric extension phi(-rho) = -phi(rho) when parity = -1 (odd)
// or +1 (even) about both endpoints; parity = 0 falls back to one-sided rows.
std::vector<double> profile_d1(const std::vector<double>& f, double h,
                               int parity, int order = 2);
std::vector<double> profile_d2(const std::vector<double>& f, double h,
                               int parity, int order = 2);

// Reparametrize e^{2v} g to arclength warped form (closed spheres).
WarpedMetric conformal_to_warped(const WarpedMetric& base,
                                 const std::vector<double>& v);

// Reparametrize one slice of a family to a unit-speed warped metric.
WarpedMetric family_slice_to_warped(const RadialFamily& fam, int it);

} // namespace hf::geom
