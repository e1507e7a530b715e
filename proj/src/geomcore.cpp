#include "horizonforge/geomcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"

namespace hf::geom {

namespace {

using kern::cspan;
using kern::mspan;

std::vector<double> extend_with_ghosts(const std::vector<double>& f, int g,
                                       int parity) {
  const int n = int(f.size());
  std::vector<double> ext(n + 2 * g);
  std::copy(f.begin(), f.end(), ext.begin() + g);
  for (int k = 1; k <= g; ++k) {
    if (parity == -1) { // point reflection through the endpoint values
      ext[g - k] = 2.0 * f[0] - f[k];
      ext[g + n - 1 + k] = 2.0 * f[n - 1] - f[n - 1 - k];
    } else { // even reflection
      ext[g - k] = f[k];
      ext[g + n - 1 + k] = f[n - 1 - k];
    }
  }
  return ext;
}

} // namespace

std::vector<double> profile_d1(const std::vector<double>& f, double h,
                               int parity, int order) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  if (parity == 0) {
    if (order >= 4)
      kern::d1_o4(f, h, out);
    else
      kern::d1(f, h, out);
    return out;
  }
  if (order >= 4) {
    auto ext = extend_with_ghosts(f, 2, parity);
    cspan e(ext);
    const double c = 1.0 / (12.0 * h);
    kern::sub(e.subspan(3, n), e.subspan(1, n), out);
    kern::scale(out, 8.0 * c, out);
    kern::axpy(c, e.first(n), out);
    kern::axpy(-c, e.subspan(4, n), out);
  } else {
    auto ext = extend_with_ghosts(f, 1, parity);
    cspan e(ext);
    kern::sub(e.subspan(2, n), e.first(n), out);
    kern::scale(out, 1.0 / (2.0 * h), out);
  }
  return out;
}

std::vector<double> profile_d2(const std::vector<double>& f, double h,
                               int parity, int order) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  if (parity == 0) {
    if (order >= 4)
      kern::d2_o4(f, h, out);
    else
      kern::d2(f, h, out);
    return out;
  }
  if (order >= 4) {
    auto ext = extend_with_ghosts(f, 2, parity);
    cspan e(ext);
    const double c = 1.0 / (12.0 * h * h);
    kern::add(e.subspan(3, n), e.subspan(1, n), out);
    kern::scale(out, 16.0 * c, out);
    kern::axpy(-30.0 * c, e.subspan(2, n), out);
    kern::axpy(-c, e.first(n), out);
    kern::axpy(-c, e.subspan(4, n), out);
  } else {
    auto ext = extend_with_ghosts(f, 1, parity);
    cspan e(ext);
    kern::add(e.subspan(2, n), e.first(n), out);
    kern::axpy(-2.0, e.subspan(1, n), out);
    kern::scale(out, 1.0 / (h * h), out);
  }
  return out;
}

// ---------------------------------------------------------------------------

double WarpedMetric::volume() const {
  const int m = slice_dim();
  std::vector<double> w(profile.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(profile[i], m);
  return unit_sphere_volume(m) * trapezoid(w, grid.h());
}

void WarpedMetric::validate(const Tolerances& tol) const {
  grid.validate();
  if (int(profile.size()) != grid.points)
    throw ValidationError("WarpedMetric: profile length != grid.points");
  if (kind == MetricKind::tube) {
    if (n < 2) throw ValidationError("WarpedMetric: tube needs n >= 2");
    for (double v : profile)
      if (!(v > 0.0)) throw ValidationError("WarpedMetric: tube profile must be positive");
    return;
  }
  if (n < 2) throw ValidationError("WarpedMetric: closed sphere needs n >= 2");
  const int np = grid.points;
  for (int i = 1; i + 1 < np; ++i)
    if (!(profile[i] > 0.0))
      throw ValidationError("WarpedMetric: profile must be positive on the interior");
  if (pole_closure) {
    const double h = grid.h();
    if (std::abs(profile.front()) > tol.closure ||
        std::abs(profile.back()) > tol.closure)
      throw ValidationError("WarpedMetric: closed profile must vanish at the poles");
    double dl = (-3.0 * profile[0] + 4.0 * profile[1] - profile[2]) / (2.0 * h);
    double dr = (3.0 * profile[np - 1] - 4.0 * profile[np - 2] + profile[np - 3]) / (2.0 * h);
    if (std::abs(dl - 1.0) > tol.closure || std::abs(dr + 1.0) > tol.closure)
      throw ValidationError("WarpedMetric: pole closure requires phi' -> +-1");
  }
}

WarpedMetric round_sphere(int n, double radius, int points) {
  WarpedMetric m;
  m.kind = MetricKind::closed_sphere;
  m.n = n;
  m.grid = {0.0, kPi * radius, points};
  m.pole_closure = true;
  m.profile.resize(points);
  for (int i = 0; i < points; ++i)
    m.profile[i] = radius * std::sin(m.grid.x(i) / radius);
  m.profile.front() = 0.0;
  m.profile.back() = 0.0;
  return m;
}

// ---------------------------------------------------------------------------

SliceGeometry tube_geometry(const WarpedMetric& m, const Tolerances& tol) {
  if (m.kind != MetricKind::tube)
    throw ValidationError("tube_geometry: expected a tube metric");
  m.validate(tol);
  const int n = m.n;
  const double h = m.grid.h();
  const auto& f = m.profile;
  const std::size_t np = f.size();

  SliceGeometry out;
  auto fp = profile_d1(f, h, 0, 2);
  auto fpp = profile_d2(f, h, 0, 2);
  out.sff_coeff.resize(np);
  kern::div(fp, f, out.sff_coeff); // f'/f
  out.H.resize(np);
  kern::scale(out.sff_coeff, double(n), out.H);
  out.sff_norm_sq.resize(np);
  kern::mul(out.sff_coeff, out.sff_coeff, out.sff_norm_sq);
  kern::scale(out.sff_norm_sq, double(n), out.sff_norm_sq);
  out.R.resize(np);
  kern::tube_scalar(f, fp, fpp, n, out.R);

  // PSC predicate from the inequality itself: (1-f'^2)/f > 2/(n-1) f''.
  out.psc = true;
  for (std::size_t i = 0; i < np; ++i)
    if (!((1.0 - fp[i] * fp[i]) / f[i] > 2.0 / double(n - 1) * fpp[i])) {
      out.psc = false;
      break;
    }
  return out;
}

namespace {

// Scalar curvature of q^2 dx^2 + p^2 g_{S^{m-1}} (slice dimension m). When
// closed, the two pole rows carry the L'Hopital limit -+ m(m-1) z_ss.
std::vector<double> warped_scalar_qp(const std::vector<double>& q,
                                     const std::vector<double>& p, int m,
                                     double h, bool closed, int order) {
  const std::size_t n = p.size();
  const int par_odd = closed ? -1 : 0;
  const int par_even = closed ? +1 : 0;

  auto px = profile_d1(p, h, par_odd, order);
  std::vector<double> z(n);
  kern::div(px, q, z); // Dp
  auto zx = profile_d1(z, h, par_even, order);
  std::vector<double> w(n);
  kern::div(zx, q, w); // D^2 p

  std::vector<double> R(n);
  const double c1 = double(m - 1) * double(m - 2);
  const double c2 = 2.0 * double(m - 1);
  for (std::size_t i = 0; i < n; ++i)
    R[i] = c1 * (1.0 - z[i] * z[i]) / (p[i] * p[i]) - c2 * w[i] / p[i];

  if (closed) {
    auto wx = profile_d1(w, h, -1, order);
    const double zss_l = wx.front() / q.front();
    const double zss_r = wx.back() / q.back();
    R.front() = -double(m) * double(m - 1) * zss_l;
    R.back() = double(m) * double(m - 1) * zss_r;
  }
  return R;
}

} // namespace

std::vector<double> warped_closed_scalar(const WarpedMetric& m, int order,
                                         const Tolerances& tol) {
  if (m.kind != MetricKind::closed_sphere || !m.pole_closure)
    throw ValidationError("warped_closed_scalar: expected a closed warped sphere");
  m.validate(tol);
  std::vector<double> q(m.profile.size(), 1.0);
  return warped_scalar_qp(q, m.profile, m.n, m.grid.h(), true, order);
}

ConformalResult conformal_transform(const std::vector<double>& R_g,
                                    const std::vector<double>& u,
                                    const std::vector<double>& laplacian_u,
                                    int n,
                                    const std::vector<double>& normal_derivative_u,
                                    const std::vector<double>& H) {
  if (n < 3) throw ValidationError("conformal_transform: n >= 3 required");
  for (double v : u)
    if (!(v > 0.0)) throw ValidationError("conformal_transform: u must be positive");
  const double expo = -double(n + 2) / double(n - 2);
  ConformalResult out;
  out.R_bar.resize(u.size());
  kern::conformal_combine(u, expo, -4.0 * double(n - 1) / double(n - 2),
                          laplacian_u, R_g, out.R_bar);
  if (!H.empty()) {
    out.H_bar.resize(u.size());
    kern::conformal_combine(u, expo, 2.0 * double(n - 1) / double(n - 2),
                            normal_derivative_u, H, out.H_bar);
  }
  return out;
}

// ---------------------------------------------------------------------------

double RadialFamily::slice_volume(int it) const {
  if (round) return unit_sphere_volume(m) * std::pow(r[it], m);
  std::vector<double> w(x.points);
  for (int i = 0; i < x.points; ++i)
    w[i] = std::pow(p[it][i], m - 1) * q[it][i];
  return unit_sphere_volume(m - 1) * trapezoid(w, x.h());
}

void RadialFamily::validate() const {
  if (t.size() < 2) throw ValidationError("RadialFamily: need >= 2 time samples");
  if (round) {
    if (r.size() != t.size()) throw ValidationError("RadialFamily: r/t mismatch");
    for (double v : r)
      if (!(v > 0.0)) throw ValidationError("RadialFamily: radius must stay positive");
    return;
  }
  x.validate();
  if (q.size() != t.size() || p.size() != t.size())
    throw ValidationError("RadialFamily: q/p/t mismatch");
  for (std::size_t it = 0; it < t.size(); ++it) {
    if (int(q[it].size()) != x.points || int(p[it].size()) != x.points)
      throw ValidationError("RadialFamily: slice sample length mismatch");
    for (int i = 0; i < x.points; ++i) {
      if (!(q[it][i] > 0.0))
        throw ValidationError("RadialFamily: q must be positive");
      bool interior = i > 0 && i + 1 < x.points;
      if ((interior || !closed) && !(p[it][i] > 0.0))
        throw ValidationError("RadialFamily: p must be positive on the interior");
    }
  }
}

void CollarMetric::validate() const {
  slices.validate();
  if (lapse.size() != slices.t.size())
    throw ValidationError("CollarMetric: lapse/t mismatch");
  for (std::size_t it = 0; it < lapse.size(); ++it) {
    std::size_t want = slices.round ? 1 : std::size_t(slices.x.points);
    if (lapse[it].size() != want)
      throw ValidationError("CollarMetric: lapse sample length mismatch");
    for (double v : lapse[it])
      if (!(v > 0.0)) throw ValidationError("CollarMetric: lapse must be positive");
  }
}

std::vector<double> family_slice_scalar(const RadialFamily& fam, int it,
                                        int order) {
  if (fam.round) {
    double val = double(fam.m) * double(fam.m - 1) / (fam.r[it] * fam.r[it]);
    return std::vector<double>(1, val);
  }
  return warped_scalar_qp(fam.q[it], fam.p[it], fam.m, fam.x.h(), fam.closed,
                          order);
}

std::vector<double> radial_laplacian(const RadialFamily& fam, int it,
                                     const std::vector<double>& u) {
  if (fam.round) return std::vector<double>(u.size(), 0.0);
  const int n = fam.x.points;
  const double h = fam.x.h();
  const auto& q = fam.q[it];
  const auto& p = fam.p[it];
  std::vector<double> c(n), w(n);
  for (int i = 0; i < n; ++i) {
    double pm = std::pow(p[i], fam.m - 1);
    c[i] = pm / q[i];
    w[i] = pm * q[i];
  }
  std::vector<double> cm(n - 1), wm(n - 1); // midpoint values
  for (int i = 0; i + 1 < n; ++i) {
    cm[i] = 0.5 * (c[i] + c[i + 1]);
    wm[i] = 0.5 * (w[i] + w[i + 1]);
  }
  std::vector<double> out(n);
  for (int i = 1; i + 1 < n; ++i) {
    double flux = cm[i] * (u[i + 1] - u[i]) - cm[i - 1] * (u[i] - u[i - 1]);
    out[i] = flux / (h * h * 0.5 * (wm[i - 1] + wm[i]));
  }
  if (fam.closed) {
    // Regularity limit Delta u = m u_ss at a pole, u even in arclength.
    double hs0 = q.front() * h, hs1 = q.back() * h;
    out[0] = 2.0 * double(fam.m) * (u[1] - u[0]) / (hs0 * hs0);
    out[n - 1] = 2.0 * double(fam.m) * (u[n - 2] - u[n - 1]) / (hs1 * hs1);
  } else {
    // Neumann ends: no flux through the boundary faces.
    out[0] = cm[0] * (u[1] - u[0]) / (h * h * 0.5 * wm[0]);
    out[n - 1] = -cm[n - 2] * (u[n - 1] - u[n - 2]) / (h * h * 0.5 * wm[n - 2]);
  }
  return out;
}

namespace {

// Time derivative of a per-t scalar series with the same stencil used for
// profiles (second order, one-sided at the ends).
std::vector<double> series_dt(const std::vector<double>& s, double dt) {
  return profile_d1(s, dt, 0, 2);
}

} // namespace

SliceGeometry collar_slice_geometry(const CollarMetric& c, int it) {
  return slice_curvature(c)[it];
}

std::vector<SliceGeometry> slice_curvature(const CollarMetric& c) {
  c.validate();
  const RadialFamily& fam = c.slices;
  const int nt = fam.nt();
  const double dt = fam.dt();
  if (nt < 3) throw ValidationError("slice_curvature: t grid too coarse");

  std::vector<SliceGeometry> out(nt);

  // d/dt H is assembled by the chain rule from first and second t-derivatives
  // of the metric components, so a product or tube collar reproduces the tube
  // formulas with identical stencil compositions.
  if (fam.round) {
    auto rdot = series_dt(fam.r, dt);
    auto rddot = profile_d2(fam.r, dt, 0, 2);
    std::vector<double> user(nt);
    for (int it = 0; it < nt; ++it) user[it] = c.lapse[it][0];
    auto udot = series_dt(user, dt);
    for (int it = 0; it < nt; ++it) {
      double u = user[it];
      double a = rdot[it] / fam.r[it];
      double G = double(fam.m) * a;
      double Gdot = double(fam.m) * (rddot[it] / fam.r[it] - a * a);
      double H = G / u;
      double Hdot = (Gdot - G * udot[it] / u) / u;
      double Rslice = double(fam.m) * double(fam.m - 1) / (fam.r[it] * fam.r[it]);
      double Asq = double(fam.m) * (a / u) * (a / u);
      double Rh = Rslice - 2.0 * Hdot / u - H * H - Asq;
      out[it].sff_coeff = {a / u};
      out[it].H = {H};
      out[it].sff_norm_sq = {Asq};
      out[it].R = {Rh};
      out[it].psc = Rh > 0.0;
    }
    return out;
  }

  const int nx = fam.nx();
  std::vector<std::vector<double>> qdot(nt, std::vector<double>(nx)),
      pdot(nt, std::vector<double>(nx)), qdd(nt, std::vector<double>(nx)),
      pdd(nt, std::vector<double>(nx)), udot(nt, std::vector<double>(nx));
  {
    std::vector<double> ser(nt), der(nt);
    auto sweep = [&](auto&& get, std::vector<std::vector<double>>& d1out,
                     std::vector<std::vector<double>>* d2out) {
      for (int i = 0; i < nx; ++i) {
        for (int it = 0; it < nt; ++it) ser[it] = get(it, i);
        der = series_dt(ser, dt);
        for (int it = 0; it < nt; ++it) d1out[it][i] = der[it];
        if (d2out) {
          der = profile_d2(ser, dt, 0, 2);
          for (int it = 0; it < nt; ++it) (*d2out)[it][i] = der[it];
        }
      }
    };
    sweep([&](int it, int i) { return fam.q[it][i]; }, qdot, &qdd);
    sweep([&](int it, int i) { return fam.p[it][i]; }, pdot, &pdd);
    sweep([&](int it, int i) { return c.lapse[it][i]; }, udot, nullptr);
  }

  for (int it = 0; it < nt; ++it) {
    auto Rslice = family_slice_scalar(fam, it, 4);
    auto lap = radial_laplacian(fam, it, c.lapse[it]);
    SliceGeometry& g = out[it];
    g.sff_coeff.resize(nx);
    g.H.resize(nx);
    g.sff_norm_sq.resize(nx);
    g.R.resize(nx);
    g.psc = true;
    const auto& u = c.lapse[it];
    for (int i = 0; i < nx; ++i) {
      bool pole = fam.closed && (i == 0 || i == nx - 1);
      double aq = qdot[it][i] / fam.q[it][i];
      double ap = pole ? aq : pdot[it][i] / fam.p[it][i];
      double G = aq + double(fam.m - 1) * ap;
      double Gq = qdd[it][i] / fam.q[it][i] - aq * aq;
      double Gp = pole ? Gq : pdd[it][i] / fam.p[it][i] - ap * ap;
      double Gdot = Gq + double(fam.m - 1) * Gp;
      double H = G / u[i];
      double Hdot = (Gdot - G * udot[it][i] / u[i]) / u[i];
      double Asq = (aq * aq + double(fam.m - 1) * ap * ap) / (u[i] * u[i]);
      double Rh = 2.0 / u[i] * (-lap[i] + 0.5 * Rslice[i] * u[i]) -
                  2.0 * Hdot / u[i] - H * H - Asq;
      g.sff_coeff[i] = ap / u[i];
      g.H[i] = H;
      g.sff_norm_sq[i] = Asq;
      g.R[i] = Rh;
      if (!(Rh > 0.0)) g.psc = false;
    }
  }
  return out;
}

std::vector<double> fermi_graph_mean_curvature(const CollarMetric& c,
                                               const std::vector<double>& f) {
  c.validate();
  const RadialFamily& fam = c.slices;
  if (fam.round)
    throw ValidationError("fermi_graph_mean_curvature: needs a warped family");
  for (const auto& ut : c.lapse)
    for (double v : ut)
      if (std::abs(v - 1.0) > 1e-12)
        throw ValidationError("fermi_graph_mean_curvature: lapse must be 1");
  const int nx = fam.nx();
  const int nt = fam.nt();
  if (int(f.size()) != nx)
    throw ValidationError("fermi_graph_mean_curvature: f length mismatch");
  for (double v : f)
    if (v < fam.t.front() - 1e-12 || v > fam.t.back() + 1e-12)
      throw ValidationError("fermi_graph_mean_curvature: graph leaves the collar");

  const double h = fam.x.h();
  const double dt = fam.dt();

  // Composite metric data along the graph: q,p and their t-derivatives at
  // (x, f(x)), via monotone-cubic interpolation in t.
  std::vector<double> qt(nx), pt(nx), qd(nx), pd(nx);
  {
    std::vector<double> serq(nt), serp(nt);
    for (int i = 0; i < nx; ++i) {
      for (int it = 0; it < nt; ++it) {
        serq[it] = fam.q[it][i];
        serp[it] = fam.p[it][i];
      }
      interp::Pchip iq(fam.t, serq), ip(fam.t, serp);
      auto dq = series_dt(serq, dt);
      auto dp = series_dt(serp, dt);
      interp::Pchip iqd(fam.t, dq), ipd(fam.t, dp);
      double tv = std::clamp(f[i], fam.t.front(), fam.t.back());
      qt[i] = iq(tv);
      pt[i] = ip(tv);
      qd[i] = iqd(tv);
      pd[i] = ipd(tv);
    }
  }

  const int par = fam.closed ? -1 : 0;
  auto fx = profile_d1(f, h, fam.closed ? +1 : 0, 2); // radial graphs are even at poles

  std::vector<double> flux(nx), HS(nx);
  std::vector<double> area_density(nx);
  for (int i = 0; i < nx; ++i) {
    double G = (fx[i] / qt[i]) * (fx[i] / qt[i]);
    double W = std::sqrt(1.0 + G);
    double pm = std::pow(std::max(pt[i], 0.0), fam.m - 1);
    flux[i] = qt[i] * pm * fx[i] / (qt[i] * qt[i] * W);
    area_density[i] = pm * qt[i];
  }
  auto dflux = profile_d1(flux, h, par, 2);
  for (int i = 0; i < nx; ++i) {
    double G = (fx[i] / qt[i]) * (fx[i] / qt[i]);
    double W = std::sqrt(1.0 + G);
    double Hslice, div_term;
    if (fam.closed && (i == 0 || i == nx - 1)) {
      // Umbilic pole limits: slice H -> m qdot/q, and with f even / flux odd
      // about the pole, Div(V) -> m V_s, read off one sample in.
      Hslice = double(fam.m) * qd[i] / qt[i];
      div_term = double(fam.m) * (i == 0 ? flux[1] / (h * area_density[1])
                                         : -flux[nx - 2] / (h * area_density[nx - 2]));
    } else {
      Hslice = qd[i] / qt[i] + double(fam.m - 1) * pd[i] / pt[i];
      div_term = dflux[i] / area_density[i];
    }
    double sff_term = (fx[i] * fx[i]) * qd[i] / (qt[i] * qt[i] * qt[i]) / W;
    HS[i] = -div_term - sff_term + W * Hslice;
  }
  return HS;
}

WarpedMetric conformal_to_warped(const WarpedMetric& base,
                                 const std::vector<double>& v) {
  if (base.kind != MetricKind::closed_sphere)
    throw ValidationError("conformal_to_warped: closed sphere base required");
  const int np = base.grid.points;
  if (int(v.size()) != np)
    throw ValidationError("conformal_to_warped: factor length mismatch");
  std::vector<double> ev(np), phit(np);
  for (int i = 0; i < np; ++i) {
    ev[i] = std::exp(v[i]);
    phit[i] = ev[i] * base.profile[i];
  }
  auto s = interp::cumtrapz(ev, base.grid.h());
  interp::Pchip prof(s, phit);
  WarpedMetric out;
  out.kind = MetricKind::closed_sphere;
  out.n = base.n;
  out.pole_closure = base.pole_closure;
  out.grid = {0.0, s.back(), np};
  out.profile.resize(np);
  for (int i = 0; i < np; ++i) out.profile[i] = prof(out.grid.x(i));
  if (out.pole_closure) {
    out.profile.front() = 0.0;
    out.profile.back() = 0.0;
  }
  return out;
}

WarpedMetric family_slice_to_warped(const RadialFamily& fam, int it) {
  WarpedMetric out;
  out.kind = MetricKind::closed_sphere;
  out.n = fam.m;
  out.pole_closure = fam.closed;
  if (fam.round) {
    return round_sphere(fam.m, fam.r[it], fam.x.points > 0 ? fam.x.points : 2048);
  }
  const int np = fam.x.points;
  auto s = interp::cumtrapz(fam.q[it], fam.x.h());
  interp::Pchip prof(s, fam.p[it]);
  out.grid = {0.0, s.back(), np};
  out.profile.resize(np);
  for (int i = 0; i < np; ++i) out.profile[i] = prof(out.grid.x(i));
  if (fam.closed) {
    out.profile.front() = 0.0;
    out.profile.back() = 0.0;
  }
  return out;
}

} // namespace hf::geom
