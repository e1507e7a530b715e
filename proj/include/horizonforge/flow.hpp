#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"

namespace hf::flow {

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<geom::WarpedMetric> states; // arclength-resampled closed S^3
  std::vector<double> lambda1_series;
  std::vector<double> volume_series;
  double k = 0.25;
  bool blew_up = false;

  void validate() const;
};

struct FlowOptions {
  double cfl = 0.2;
  double curvature_stop = 1e6;
  int monitor_every = 10;  // lambda1 cadence, in accepted steps
  double k = 0.25;
};

// Rotationally symmetric Ricci flow dg/dt = -2 Ric on closed warped S^3,
// integrated in a fixed coordinate gauge (q, phi) with RK2 and a CFL-limited
// step; records arclength-resampled states and the lambda1 monitor.
FlowTrajectory evolve(const geom::WarpedMetric& initial, double dt_max,
                      double T, const FlowOptions& opts = FlowOptions{},
                      const Tolerances& tol = Tolerances::defaults());

struct MonotonicityReport {
  std::vector<double> times;       // interior monitor times
  std::vector<double> dlambda1_dt; // centered differences
  bool strictly_positive = false;
};

// d/dt lambda1(-Delta + kR) along the trajectory; requires k >= 1/4 unless
// explicitly overridden for exploration.
MonotonicityReport monotonicity_report(const FlowTrajectory& traj,
                                       bool allow_low_k = false);

} // namespace hf::flow
