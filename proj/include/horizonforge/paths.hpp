#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"

namespace hf::paths {

// Path of closed warped metrics on a shared t grid. Metrics share n, kind
// and sample count; their arclength domains may differ (the radial family
// view below absorbs that into the coordinate speed q).
struct MetricPath {
  std::vector<double> t;
  std::vector<geom::WarpedMetric> metrics;
  std::vector<double> lambda1_cache; // per-t, filled by the collar builders

  void validate() const;
  // Fixed-coordinate view on x in [0,1]: q(x,t) = L(t), p = profile.
  geom::RadialFamily family() const;
};

// Endpoint-to-endpoint profile interpolation with exact pole closure.
MetricPath profile_path(const geom::WarpedMetric& gL,
                        const geom::WarpedMetric& gR, int t_points);

// Re-sample a discrete path at arbitrary parameters in [t.front, t.back]
// by affine interpolation of adjacent knot metrics (exact on affine paths).
MetricPath resample_path(const MetricPath& path,
                         const std::vector<double>& params);

struct RayleighLinearCheck {
  std::vector<double> t_samples;
  std::vector<double> energies;
  double affine_deviation = 0.0; // max deviation from the best affine fit
};

struct ConformalPath2dResult {
  geom::WarpedMetric metric; // e^{2(t u + (1-t))} g0, arclength form
  RayleighLinearCheck check;
};

// 2D conformal-exponential path off the round metric g0; the Rayleigh
// energy of any fixed test function is affine in t.
ConformalPath2dResult conformal_path_2d(const geom::WarpedMetric& g0,
                                        const std::vector<double>& u, double t,
                                        const std::vector<double>& test_fn);

// Energy of the conformal-path metric at parameter t against a test
// function, evaluated in the conformal frame (exactly affine in t).
double conformal_path_energy(const geom::WarpedMetric& g0,
                             const std::vector<double>& u, double k, double t,
                             const std::vector<double>& test_fn);

// [(1-t) + t u]^4 g with u the k = 1/8 principal eigenfunction (n = 3).
geom::WarpedMetric yamabe_contraction_path(const geom::WarpedMetric& m,
                                           double t,
                                           const Tolerances& tol = Tolerances::defaults());

struct TwistResult {
  std::vector<double> t;
  std::vector<double> rho;                           // scale schedule, rho(0)=1
  std::vector<std::vector<double>> reparametrization; // chi_t(x) per t
  std::vector<std::vector<double>> slice_volume_form; // density m(x,t)
  geom::RadialFamily twisted;                        // rho(t) chi_t^* g_t
  double max_volume_form_drift = 0.0;
};

// Moser volume normalization: scale fixed by total volume, radial
// reparametrization by the measure-weighted divergence equation.
TwistResult moser_twist(const MetricPath& path,
                        const Tolerances& tol = Tolerances::defaults());

struct IsotopyResult {
  std::vector<double> f_mu, h_mu; // tube profile and lapse at parameter mu
  double min_R = 0.0;
};

// Round-foliation isotopy of a tube metric with R >= theta n(n-1):
// conformal stage mu in [0,1/2], product stage mu in (1/2,1].
IsotopyResult round_isotopy(const geom::WarpedMetric& f0, double theta,
                            double mu,
                            const Tolerances& tol = Tolerances::defaults());

// Scalar curvature samples of f^2 g_{S^n} + h^2 dt^2 (general lapse tube).
std::vector<double> lapse_tube_scalar(const std::vector<double>& f,
                                      const std::vector<double>& h, int n,
                                      double dt);

} // namespace hf::paths
