#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/paths.hpp"

namespace hf::collar {

struct CollarReport {
  double min_R = 0.0;
  double min_R_x = 0.0, min_R_t = 0.0;
  std::vector<double> slice_H_min, slice_H_max; // per t-sample
  bool left_minimal = false;
  int right_H_sign = 0;
};

// A built collar plus everything needed to re-derive it: the twist, the
// per-slice eigenpairs, and the schedules with their exact derivatives.
struct CollarBuild {
  geom::CollarMetric collar;
  CollarReport report;
  paths::TwistResult twist;
  std::vector<double> lambda1_tau;               // at the path's t samples
  std::vector<std::vector<double>> u_tau;        // eigenfunctions, twisted slices
  std::vector<double> rho, rho_d1, rho_d2;       // schedules on the output grid
  std::vector<double> tau, tau_d1;
  double A = 1.0;
  double epsilon = 0.0;
  double k = 0.5;
};

// Minimal-slice collar h = g_t + A^2 u^2 dt^2 over the volume-normalized
// path; requires lambda1 > 0 along it. A is the minimal PSC amplitude,
// found by doubling plus bisection.
CollarBuild build_minimal_collar(const paths::MetricPath& path, double k = 0.5,
                                 const Tolerances& tol = Tolerances::defaults());

// Mean-convex collar h = (1 + eps rho(t)) g_{tau(t)} + A^2 u(tau(t))^2 dt^2:
// interior slices strictly mean-convex toward t = 0, the t = 0 slice
// minimal. Degenerate ends (lambda1 = 0 with nonzero one-sided slope) switch
// to the parabolic schedules.
CollarBuild build_mean_convex_collar(
    const paths::MetricPath& path, double k, double epsilon,
    bool left_degenerate = false, bool right_degenerate = false,
    const Tolerances& tol = Tolerances::defaults());

// Term-by-term assembly of the ambient scalar curvature from the eigenvalue
// identity (route independent of geomcore::slice_curvature): per (t, x).
std::vector<std::vector<double>> scal_identity_assembly(const CollarBuild& b);

CollarReport make_report(const geom::CollarMetric& c,
                         const Tolerances& tol = Tolerances::defaults());

} // namespace hf::collar
