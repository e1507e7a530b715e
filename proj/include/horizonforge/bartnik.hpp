#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/collar.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/schwarzschild.hpp"

namespace hf::bartnik {

// One asymptotically flat extension: horizon-to-mean-convex collar, then a
// bent-and-glued bridge landing on an exact Schwarzschild end.
struct Extension {
  double epsilon = 0.0;
  collar::CollarBuild collar;
  schw::PlanarProfile bridge;
  double mass = 0.0;
  double min_R = 0.0;            // over the collar slices
  double min_psc_margin = 0.0;   // over the bridge interior
  double junction_H_mismatch = 0.0;
  double junction_radius = 0.0;
};

struct SequenceOptions {
  int path_samples = 33;
  double mass_bump_factor = 0.125; // m2 = m1 (1 + factor * eps)
};

// Minimizing sequence for the apparent-horizon Bartnik mass of a closed
// warped S^2 with lambda1(-Delta + R/2) >= 0; masses decrease toward the
// Penrose bound of the horizon area.
std::vector<Extension> minimizing_sequence(
    const geom::WarpedMetric& horizon, const std::vector<double>& epsilons,
    const SequenceOptions& opts = SequenceOptions{},
    const Tolerances& tol = Tolerances::defaults());

} // namespace hf::bartnik
