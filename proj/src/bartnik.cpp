#include "horizonforge/bartnik.hpp"

#include <algorithm>
#include <cmath>

#include "horizonforge/paths.hpp"
#include "horizonforge/spectral.hpp"

namespace hf::bartnik {

std::vector<Extension> minimizing_sequence(const geom::WarpedMetric& horizon,
                                           const std::vector<double>& epsilons,
                                           const SequenceOptions& opts,
                                           const Tolerances& tol) {
  if (horizon.kind != geom::MetricKind::closed_sphere || horizon.n != 2)
    throw ValidationError("minimizing_sequence: closed warped S^2 horizon required");
  horizon.validate(tol);
  auto lam0 = spectral::lambda1(horizon, 0.5, tol);
  if (lam0.lambda1 < -tol.membership)
    throw ValidationError("minimizing_sequence: horizon has lambda1 < 0 at k = 1/2");
  bool degenerate = std::abs(lam0.lambda1) <= 1e3 * tol.membership;

  const double area = horizon.volume();
  const double r0 = std::sqrt(area / (4.0 * kPi));
  const double bound = schw::penrose_bound(area, 2);
  auto round_end = geom::round_sphere(2, r0, horizon.grid.points);
  auto path = paths::profile_path(horizon, round_end, opts.path_samples);

  std::vector<Extension> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    Extension ext;
    ext.epsilon = eps;
    ext.collar = collar::build_mean_convex_collar(path, 0.5, eps, degenerate,
                                                  false, tol);

    // Outer slice: round of radius sqrt(1+eps) r0, mean curvature from the
    // schedule formula (cross-checked against the report's stencil value).
    const double Rc = std::sqrt(1.0 + eps) * r0;
    const double u1 = ext.collar.u_tau.back().front();
    const double H_out = 2.0 * eps * ext.collar.rho_d1.back() /
                         (2.0 * (1.0 + eps) * ext.collar.A * u1);
    const int nt = int(ext.collar.collar.slices.t.size());
    ext.junction_H_mismatch =
        std::abs(H_out - ext.collar.report.slice_H_max[nt - 1]);
    ext.junction_radius = Rc;
    double y_out = 0.5 * H_out * Rc;
    if (!(y_out > 0.0 && y_out < 1.0))
      throw ConvergenceError("minimizing_sequence: outer slope out of range");

    auto o1 = schw::orbit(Rc, y_out, 2);
    double m1 = o1.mass();
    double m2 = m1 * (1.0 + opts.mass_bump_factor * eps);
    ext.bridge = schw::bend_and_glue(m1, m2, Rc, 2.0 * Rc, 2, 4.0 * Rc);
    ext.mass = schw::adm_mass(ext.bridge, tol);

    ext.min_R = ext.collar.report.min_R;
    ext.min_psc_margin = 1e300;
    for (std::size_t i = 1; i + 1 < ext.bridge.x.size(); ++i)
      ext.min_psc_margin = std::min(ext.min_psc_margin, ext.bridge.margin[i]);

    if (ext.mass < bound - 1e-9)
      throw ConvergenceError(
          "minimizing_sequence: extension beats the Penrose bound (pipeline bug)");
    out.push_back(std::move(ext));
  }
  return out;
}

} // namespace hf::bartnik
