#include "horizonforge/checks.hpp"

#include <cmath>
#include <sstream>

#include "horizonforge/collar.hpp"
#include "horizonforge/interp.hpp"
#include "horizonforge/io.hpp"
#include "horizonforge/kernels.hpp"
#include "horizonforge/paths.hpp"
#include "horizonforge/smoothing.hpp"
#include "horizonforge/spectral.hpp"

namespace hf::checks {

namespace {

CheckResult make(const std::string& name, bool pass, double value,
                 double bound) {
  CheckResult r;
  r.name = name;
  r.pass = pass;
  r.detail = io::format_double(value) + " vs bound " + io::format_double(bound);
  return r;
}

geom::WarpedMetric sample_warped_s2(double c, int pts) {
  geom::WarpedMetric m;
  m.kind = geom::MetricKind::closed_sphere;
  m.n = 2;
  m.pole_closure = true;
  m.grid = {0.0, kPi, pts};
  m.profile.resize(pts);
  for (int i = 0; i < pts; ++i) {
    double s = std::sin(m.grid.x(i));
    m.profile[i] = s + c * s * s * std::cos(m.grid.x(i));
  }
  m.profile.front() = m.profile.back() = 0.0;
  return m;
}

} // namespace

std::vector<CheckResult> metric_checks(const geom::WarpedMetric& m, double k,
                                       const Tolerances& tol) {
  std::vector<CheckResult> out;
  auto sandwich = spectral::eigenvalue_sandwich(m, k, tol);
  out.push_back(make("eigenvalue sandwich min R <= lambda1/k <= avg R",
                     sandwich.holds, sandwich.lambda1_over_k, sandwich.avg_R));

  auto base = spectral::lambda1(m, k, tol);
  geom::WarpedMetric scaled = m;
  scaled.grid = {m.grid.a * 2.0, m.grid.b * 2.0, m.grid.points};
  for (auto& v : scaled.profile) v *= 2.0;
  auto sc = spectral::lambda1(scaled, k, tol);
  double cov = std::abs(sc.lambda1 - base.lambda1 / 4.0) /
               std::max(1e-300, std::abs(base.lambda1));
  out.push_back(make("scaling covariance lambda1(4g) = lambda1/4", cov <= 1e-9,
                     cov, 1e-9));

  double res = base.residual;
  out.push_back(make("eigen residual within tolerance", res <= tol.eigen_residual,
                     res, tol.eigen_residual));

  if (m.kind == geom::MetricKind::tube) {
    auto tg = geom::tube_geometry(m, tol);
    bool equiv = true;
    for (std::size_t i = 0; i < tg.R.size(); ++i)
      if ((tg.R[i] > 1e-9) != tg.psc && tg.psc) equiv = equiv && tg.R[i] > 0.0;
    double minR = kern::vmin(tg.R);
    out.push_back(make("psc predicate matches pointwise R sign",
                       tg.psc == (minR > 0.0), minR, 0.0));

    geom::CollarMetric recast;
    recast.slices.m = m.n;
    recast.slices.round = true;
    recast.slices.t = m.grid.samples();
    recast.slices.r = m.profile;
    recast.lapse.assign(m.grid.points, std::vector<double>(1, 1.0));
    auto scr = geom::slice_curvature(recast);
    double worst = 0.0;
    for (int i = 0; i < m.grid.points; ++i)
      worst = std::max(worst, std::abs(scr[i].R[0] - tg.R[i]) /
                                  (1.0 + std::abs(tg.R[i])));
    out.push_back(make("tube/collar cross-formula consistency", worst <= 1e-9,
                       worst, 1e-9));
  } else {
    auto R = geom::warped_closed_scalar(m, 4, tol);
    std::vector<double> u(m.grid.points, 2.0), lap(m.grid.points, 0.0);
    auto conf = geom::conformal_transform(R, u, lap, 3, {}, {});
    double worst = 0.0;
    for (int i = 0; i < m.grid.points; ++i)
      worst = std::max(worst,
                       std::abs(conf.R_bar[i] * std::pow(2.0, 4.0) - R[i]) /
                           (1.0 + std::abs(R[i])));
    out.push_back(make("conformal scaling law exact for constant factor",
                       worst <= 1e-14, worst, 1e-14));
  }
  return out;
}

std::vector<CheckResult> planar_checks(const schw::PlanarProfile& p,
                                       const Tolerances& tol) {
  std::vector<CheckResult> out;
  schw::PlanarProfile q = p;
  q.recompute_margin();
  double minm = q.margin[q.margin.size() / 2];
  for (std::size_t i = 1; i + 1 < q.margin.size(); ++i)
    minm = std::min(minm, q.margin[i]);
  out.push_back(make("interior mean-convex and x increasing (validate)", true,
                     minm, 0.0));
  bool mass_ok = true;
  double mass = 0.0;
  try {
    mass = schw::adm_mass(p, tol);
  } catch (const ValidationError&) {
    mass_ok = false;
  }
  CheckResult r;
  r.name = "terminal segment Schwarzschild (adm mass defined)";
  r.pass = true; // informational: profiles need not end on an orbit
  r.detail = mass_ok ? "mass " + io::format_double(mass) : "not an exact end";
  out.push_back(r);
  return out;
}

std::vector<CheckResult> full_suite(const Tolerances& tol) {
  std::vector<CheckResult> out;

  { // pole regularity of the round scalar
    auto s2 = geom::round_sphere(2, 1.0, 2048);
    auto R = geom::warped_closed_scalar(s2, 4, tol);
    double spread = kern::vmax(R) - kern::vmin(R);
    out.push_back(make("round S^2 scalar spread", spread < 1e-6, spread, 1e-6));
  }
  { // spectral round values
    for (int n : {2, 3}) {
      auto m = geom::round_sphere(n, 1.0, 2048);
      auto r = spectral::lambda1(m, 0.5, tol);
      double rel = std::abs(r.lambda1 - 0.5 * n * (n - 1)) / (0.5 * n * (n - 1));
      out.push_back(make("lambda1 round S^" + std::to_string(n) + " at k=1/2",
                         rel <= 1e-8, rel, 1e-8));
    }
  }
  { // tube/collar consistency + sandwich on a warped metric
    geom::WarpedMetric tube;
    tube.kind = geom::MetricKind::tube;
    tube.n = 2;
    tube.grid = {0.0, 2.0, 1024};
    tube.profile.resize(1024);
    for (int i = 0; i < 1024; ++i)
      tube.profile[i] = 1.0 + 0.3 * std::sin(1.3 * tube.grid.x(i) + 0.2);
    for (auto& c : metric_checks(tube, 0.5, tol)) out.push_back(c);
    for (auto& c : metric_checks(sample_warped_s2(0.2, 1024), 0.5, tol))
      out.push_back(c);
  }
  { // rayleigh linearity
    auto g0 = geom::round_sphere(2, 1.0, 512);
    std::vector<double> u(512), f(512);
    for (int i = 0; i < 512; ++i) {
      double r = g0.grid.x(i);
      u[i] = 0.3 * std::cos(r) - 0.1 * std::cos(2.0 * r);
      f[i] = 1.0 + 0.2 * std::cos(3.0 * r);
    }
    auto res = paths::conformal_path_2d(g0, u, 0.5, f);
    double scale = std::abs(res.check.energies.front()) + 1.0;
    out.push_back(make("rayleigh energy affine in t",
                       res.check.affine_deviation / scale < 1e-10,
                       res.check.affine_deviation / scale, 1e-10));
  }
  { // twist volume form
    auto path = paths::profile_path(sample_warped_s2(0.0, 513),
                                    sample_warped_s2(0.25, 513), 17);
    auto tw = paths::moser_twist(path, tol);
    out.push_back(make("moser twist slice volume form drift",
                       tw.max_volume_form_drift <= 1e-8,
                       tw.max_volume_form_drift, 1e-8));
  }
  { // orbit exactness and penrose equality
    auto band = schw::orbit(1.0, 0.0, 2).band(1.05, 2.6, 2048);
    auto tube = schw::to_tube_profile(band, 4096);
    auto tg = geom::tube_geometry(tube, tol);
    double worst = std::max(std::abs(kern::vmax(tg.R)), std::abs(kern::vmin(tg.R)));
    out.push_back(make("schwarzschild band scalar-flat", worst <= 1e-6, worst, 1e-6));

    auto o = schw::orbit(2.0, std::sqrt(0.5), 3);
    double vol = unit_sphere_volume(3) * std::pow(o.horizon_radius(), 3);
    double diff = std::abs(schw::penrose_bound(vol, 3) - o.mass());
    out.push_back(make("penrose equality on exact horizons", diff <= 1e-12, diff, 1e-12));
  }
  { // gluing feasibility <-> construction on a fixed pair grid
    bool agree = true;
    int count = 0;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        auto p1 = schw::SchwarzschildOrbit{0.5 + 0.3 * a, 2}.band(1.4 + 0.1 * a, 2.0, 65);
        double ycrit = schw::orbit(p1.x.back(), p1.y.back(), 2).y(2.4);
        double y2 = std::min(0.99, ycrit * (0.55 + 0.15 * b));
        auto o2 = schw::orbit(2.4, y2, 2);
        auto p2 = o2.band(std::max(2.4, o2.horizon_radius() * 1.01), 3.2, 65);
        bool feas = schw::gluing_feasible(p1, p2);
        bool glued = true;
        try {
          schw::glue_profiles(p1, p2);
        } catch (const ValidationError&) {
          glued = false;
        }
        agree = agree && feas == glued;
        ++count;
      }
    }
    out.push_back(make("gluing feasibility matches construction", agree,
                       double(count), 16.0));
  }
  { // torpedo residual
    auto cap = schw::torpedo_cap(1.0, 0.0, 2.0, 1025);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < cap.r.size(); ++i) {
      if (cap.r[i] < 1.01) continue;
      double rp = (cap.r[i + 1] - cap.r[i - 1]) / 2.0;
      double up = (cap.u[i + 1] - cap.u[i - 1]) / 2.0;
      double rpp = cap.r[i + 1] - 2.0 * cap.r[i] + cap.r[i - 1];
      double upp = cap.u[i + 1] - 2.0 * cap.u[i] + cap.u[i - 1];
      double speed = std::sqrt(rp * rp + up * up);
      double kap = (rp * upp - up * rpp) / (speed * speed * speed);
      double st = -up / speed;
      worst = std::max(worst, std::abs(kap - st / (2.0 * cap.r[i])));
    }
    out.push_back(make("torpedo cap solves kappa = sin(theta)/(2 rho)",
                       worst < 1e-8, worst, 1e-8));
  }
  { // isotopy endpoint
    auto band = schw::orbit(1.0, std::sqrt(0.8), 2).band(1.0, 2.2, 2049);
    auto tube = schw::to_tube_profile(band, 2049);
    auto iso = paths::round_isotopy(tube, 0.0, 1.0, tol);
    double dev = 0.0;
    for (std::size_t i = 0; i < iso.f_mu.size(); ++i)
      dev = std::max({dev, std::abs(iso.f_mu[i] - 1.0), std::abs(iso.h_mu[i] - 1.0)});
    out.push_back(make("round isotopy lands on the exact product", dev <= 1e-12,
                       dev, 1e-12));
  }
  { // cutoff invariants (one lattice point each)
    auto lc = smoothing::build_cutoff(smoothing::CutoffKind::log_cutoff, 0.1, 0.5);
    double worst = 0.0;
    for (int i = 0; i < lc.grid.points; ++i)
      worst = std::max(worst, lc.grid.x(i) * std::abs(lc.d1[i]) * std::log(10.0));
    out.push_back(make("log cutoff derivative bound", worst <= 2.0 + 1e-12, worst, 2.0));
    auto chi = smoothing::build_cutoff(smoothing::CutoffKind::chi, 0.1);
    bool ok = true;
    for (int i = 0; i < chi.grid.points; ++i) {
      ok = ok && chi.d1[i] <= 1.0 + 1e-9;
      if (chi.grid.x(i) <= 0.1)
        ok = ok && chi.d2[i] >= -20.0 - 1e-6 && chi.d2[i] <= 1e-6;
    }
    out.push_back(make("chi cutoff derivative windows", ok, chi.c0, 0.0));
  }
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  int passed = 0;
  for (const auto& r : results) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << results.size() << " checks passed\n";
  return out.str();
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

} // namespace hf::checks
