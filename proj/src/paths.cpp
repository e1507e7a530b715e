#include "horizonforge/paths.hpp"

#include <algorithm>
#include <cmath>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"
#include "horizonforge/spectral.hpp"

namespace hf::paths {

void MetricPath::validate() const {
  if (t.size() < 2 || t.size() != metrics.size())
    throw ValidationError("MetricPath: t/metrics mismatch");
  const auto& m0 = metrics.front();
  for (const auto& m : metrics) {
    m.validate();
    if (m.kind != m0.kind || m.n != m0.n || m.grid.points != m0.grid.points)
      throw ValidationError("MetricPath: metrics must share kind, n and sample count");
  }
}

geom::RadialFamily MetricPath::family() const {
  validate();
  geom::RadialFamily fam;
  const auto& m0 = metrics.front();
  fam.m = m0.kind == geom::MetricKind::closed_sphere ? m0.n : m0.n + 1;
  fam.closed = m0.kind == geom::MetricKind::closed_sphere;
  fam.x = {0.0, 1.0, m0.grid.points};
  fam.t = t;
  fam.q.resize(t.size());
  fam.p.resize(t.size());
  for (std::size_t it = 0; it < t.size(); ++it) {
    double L = metrics[it].grid.b - metrics[it].grid.a;
    fam.q[it].assign(m0.grid.points, L);
    fam.p[it] = metrics[it].profile;
  }
  return fam;
}

MetricPath profile_path(const geom::WarpedMetric& gL,
                        const geom::WarpedMetric& gR, int t_points) {
  gL.validate();
  gR.validate();
  if (gL.kind != gR.kind || gL.n != gR.n || gL.grid.points != gR.grid.points)
    throw ValidationError("profile_path: endpoint metrics incompatible");
  MetricPath path;
  path.t = interp::linspace(0.0, 1.0, t_points);
  path.metrics.resize(t_points);
  double LA = gL.grid.b - gL.grid.a, LB = gR.grid.b - gR.grid.a;
  for (int it = 0; it < t_points; ++it) {
    double s = path.t[it];
    geom::WarpedMetric m = gL;
    m.grid = {0.0, (1.0 - s) * LA + s * LB, gL.grid.points};
    for (int i = 0; i < gL.grid.points; ++i)
      m.profile[i] = (1.0 - s) * gL.profile[i] + s * gR.profile[i];
    path.metrics[it] = std::move(m);
  }
  return path;
}

MetricPath resample_path(const MetricPath& path,
                         const std::vector<double>& params) {
  path.validate();
  MetricPath out;
  out.t = params;
  out.metrics.reserve(params.size());
  const auto& ts = path.t;
  for (double s : params) {
    if (s < ts.front() - 1e-12 || s > ts.back() + 1e-12)
      throw ValidationError("resample_path: parameter out of range");
    std::size_t j = 0;
    while (j + 2 < ts.size() && ts[j + 1] < s) ++j;
    double w = std::clamp((s - ts[j]) / (ts[j + 1] - ts[j]), 0.0, 1.0);
    const auto& A = path.metrics[j];
    const auto& B = path.metrics[j + 1];
    geom::WarpedMetric m = A;
    m.grid = {0.0,
              (1.0 - w) * (A.grid.b - A.grid.a) + w * (B.grid.b - B.grid.a),
              A.grid.points};
    for (int i = 0; i < A.grid.points; ++i)
      m.profile[i] = (1.0 - w) * A.profile[i] + w * B.profile[i];
    out.metrics.push_back(std::move(m));
  }
  return out;
}

namespace {

geom::RadialFamily one_slice_family(const geom::WarpedMetric& m) {
  geom::RadialFamily fam;
  fam.m = m.kind == geom::MetricKind::closed_sphere ? m.n : m.n + 1;
  fam.closed = m.kind == geom::MetricKind::closed_sphere;
  fam.x = m.grid;
  fam.t = {0.0, 1.0};
  std::vector<double> q(m.grid.points, 1.0);
  fam.q = {q, q};
  fam.p = {m.profile, m.profile};
  return fam;
}

} // namespace

double conformal_path_energy(const geom::WarpedMetric& g0,
                             const std::vector<double>& u, double k, double t,
                             const std::vector<double>& test_fn) {
  if (g0.kind != geom::MetricKind::closed_sphere || g0.n != 2)
    throw ValidationError("conformal_path_2d: round S^2 base required");
  const int np = g0.grid.points;
  if (int(u.size()) != np || int(test_fn.size()) != np)
    throw ValidationError("conformal_path_2d: sample length mismatch");
  const double h = g0.grid.h();
  auto fam = one_slice_family(g0);
  auto R0 = geom::warped_closed_scalar(g0, 4);
  auto lap_u = geom::radial_laplacian(fam, 0, u);
  auto fx = geom::profile_d1(test_fn, h, +1, 2);
  // 2D conformal invariance of the Dirichlet term:
  //   E(t) = int |grad f|^2 dmu0 + k int (R0 - 2 t Lap u) f^2 dmu0.
  std::vector<double> w(np);
  for (int i = 0; i < np; ++i) {
    double dens = g0.profile[i];
    w[i] = (fx[i] * fx[i] +
            k * (R0[i] - 2.0 * t * lap_u[i]) * test_fn[i] * test_fn[i]) * dens;
  }
  return 2.0 * kPi * trapezoid(w, h);
}

ConformalPath2dResult conformal_path_2d(const geom::WarpedMetric& g0,
                                        const std::vector<double>& u, double t,
                                        const std::vector<double>& test_fn) {
  ConformalPath2dResult out;
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = t * u[i] + (1.0 - t);
  out.metric = geom::conformal_to_warped(g0, v);

  out.check.t_samples = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double ts : out.check.t_samples)
    out.check.energies.push_back(conformal_path_energy(g0, u, 0.5, ts, test_fn));
  double E0 = out.check.energies.front(), E1 = out.check.energies.back();
  double dev = 0.0;
  for (std::size_t i = 0; i < out.check.t_samples.size(); ++i) {
    double ts = out.check.t_samples[i];
    dev = std::max(dev, std::abs(out.check.energies[i] -
                                 ((1.0 - ts) * E0 + ts * E1)));
  }
  out.check.affine_deviation = dev;
  return out;
}

geom::WarpedMetric yamabe_contraction_path(const geom::WarpedMetric& m,
                                           double t, const Tolerances& tol) {
  if (m.n != 3 || m.kind != geom::MetricKind::closed_sphere)
    throw ValidationError("yamabe_contraction_path: closed S^3 metric required");
  auto r = spectral::lambda1(m, 0.125, tol);
  std::vector<double> v(r.eigenfunction.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double w = (1.0 - t) + t * r.eigenfunction[i];
    if (!(w > 0.0))
      throw ConvergenceError("yamabe_contraction_path: factor not positive");
    v[i] = 2.0 * std::log(w);
  }
  return geom::conformal_to_warped(m, v);
}

TwistResult moser_twist(const MetricPath& path, const Tolerances& tol) {
  geom::RadialFamily fam = path.family();
  const int nt = fam.nt();
  const int nx = fam.nx();
  const int m = fam.m;
  const double h = fam.x.h();
  auto xs = fam.x.samples();

  TwistResult out;
  out.t = fam.t;
  out.rho.resize(nt);
  out.reparametrization.assign(nt, std::vector<double>(nx));
  out.slice_volume_form.assign(nt, std::vector<double>(nx));

  std::vector<double> vol(nt);
  for (int it = 0; it < nt; ++it) vol[it] = fam.slice_volume(it);
  for (int it = 0; it < nt; ++it)
    out.rho[it] = std::pow(vol[0] / vol[it], 2.0 / double(m));

  std::vector<double> mu0(nx);
  for (int i = 0; i < nx; ++i)
    mu0[i] = fam.q[0][i] * std::pow(fam.p[0][i], m - 1);
  auto M0 = interp::cumtrapz(mu0, h);

  geom::RadialFamily tw;
  tw.m = m;
  tw.closed = fam.closed;
  tw.x = fam.x;
  tw.t = fam.t;
  tw.q.assign(nt, std::vector<double>(nx));
  tw.p.assign(nt, std::vector<double>(nx));

  std::vector<double> dens(nx), M(nx);
  for (int it = 0; it < nt; ++it) {
    double rs = std::sqrt(out.rho[it]);
    for (int i = 0; i < nx; ++i)
      dens[i] = fam.q[it][i] * std::pow(fam.p[it][i], m - 1);
    M = interp::cumtrapz(dens, h);
    // Transport: rho^{m/2} M_t(chi(x)) = M0(x); the scale M_t(1)/M0(1)
    // realizes rho^{-m/2} exactly and pins chi(1) = 1.
    const double target_scale = M.back() / M0.back();
    // C^2 interpolants: C^1 kinks would contaminate later d/dt stencils of
    // the composites p(chi_t(x)). Natural ends are exact for the odd-about-
    // the-pole profile and the cumulative measure.
    interp::Spline Minv(M, xs);
    interp::Spline qi(xs, fam.q[it]);
    interp::Spline pi(xs, fam.p[it]);
    auto& chi = out.reparametrization[it];
    for (int i = 0; i < nx; ++i)
      chi[i] = std::clamp(Minv(target_scale * M0[i]), fam.x.a, fam.x.b);
    chi[0] = fam.x.a;
    chi[nx - 1] = fam.x.b;

    for (int i = 0; i < nx; ++i) {
      double qc = qi(chi[i]);
      double pc = std::max(pi(chi[i]), 0.0);
      double chix;
      if (fam.closed && (i == 0 || i == nx - 1)) {
        // Near a pole both densities vanish like q^m x^{m-1}; the transport
        // derivative reduces to the ratio of the leading coefficients.
        chix = std::pow(target_scale, 1.0 / double(m)) * fam.q[0][i] / qc;
      } else {
        chix = target_scale * mu0[i] / (qc * std::pow(pc, m - 1));
      }
      tw.q[it][i] = rs * qc * chix;
      tw.p[it][i] = rs * pc;
      out.slice_volume_form[it][i] =
          tw.q[it][i] * std::pow(tw.p[it][i], m - 1);
    }
  }

  double drift = 0.0;
  for (int it = 0; it < nt; ++it)
    for (int i = 1; i + 1 < nx; ++i)
      drift = std::max(drift, std::abs(out.slice_volume_form[it][i] -
                                       out.slice_volume_form[0][i]) /
                                  std::max(1e-300, out.slice_volume_form[0][i]));
  out.max_volume_form_drift = drift;
  out.twisted = std::move(tw);
  if (drift > 1e3 * tol.twist_volume)
    throw ConvergenceError("moser_twist: slice volume form drift too large");
  return out;
}

std::vector<double> lapse_tube_scalar(const std::vector<double>& f,
                                      const std::vector<double>& h, int n,
                                      double dt) {
  geom::RadialFamily fam;
  fam.m = n + 1;
  fam.closed = false;
  fam.x = {0.0, dt * double(f.size() - 1), int(f.size())};
  fam.t = {0.0, 1.0};
  fam.q = {h, h};
  fam.p = {f, f};
  return geom::family_slice_scalar(fam, 0, 2);
}

IsotopyResult round_isotopy(const geom::WarpedMetric& f0, double theta,
                            double mu, const Tolerances& tol) {
  if (f0.kind != geom::MetricKind::tube)
    throw ValidationError("round_isotopy: tube metric required");
  if (theta < 0.0 || theta > 1.0 || mu < 0.0 || mu > 1.0)
    throw ValidationError("round_isotopy: theta, mu must lie in [0,1]");
  f0.validate(tol);
  const int n = f0.n;
  auto g0 = geom::tube_geometry(f0, tol);
  double bound = theta * double(n) * double(n - 1);
  for (double R : g0.R)
    if (R < bound - 1e-7 * (1.0 + std::abs(bound)))
      throw ValidationError("round_isotopy: input violates R >= theta n(n-1)");

  const int np = f0.grid.points;
  IsotopyResult out;
  out.f_mu.resize(np);
  out.h_mu.resize(np);
  if (mu <= 0.5) {
    double e = 2.0 / double(n - 1);
    for (int i = 0; i < np; ++i) {
      double c = (1.0 - 2.0 * mu) +
                 2.0 * mu * std::pow(f0.profile[i], 0.5 * (1 - n));
      double fac = std::pow(c, e);
      out.f_mu[i] = fac * f0.profile[i];
      out.h_mu[i] = fac;
    }
  } else {
    for (int i = 0; i < np; ++i) {
      double fp = f0.profile[i];
      out.f_mu[i] = 1.0;
      out.h_mu[i] = std::sqrt((2.0 - 2.0 * mu) / (fp * fp) + 2.0 * mu - 1.0);
    }
  }
  auto R = lapse_tube_scalar(out.f_mu, out.h_mu, n, f0.grid.h());
  out.min_R = kern::vmin(R);
  return out;
}

} // namespace hf::paths
