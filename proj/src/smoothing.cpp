#include "horizonforge/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"
#include "horizonforge/schwarzschild.hpp"

namespace hf::smoothing {

namespace {

double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}
double smoothstep5_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}
double smoothstep5_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

CutoffFunction build_log_cutoff(double delta, double eps, int points) {
  if (!(delta > 0.0 && delta < 0.25))
    throw ValidationError("log_cutoff: delta in (0, 1/4) required");
  if (!(eps > 0.0 && eps < 1.0))
    throw ValidationError("log_cutoff: eps in (0, 1) required");
  CutoffFunction f;
  f.kind = CutoffKind::log_cutoff;
  f.delta = delta;
  f.eps = eps;
  f.grid = {0.0, 2.0 * eps, points};
  f.value.resize(points);
  f.d1.resize(points);
  f.d2.resize(points);
  const double L = std::log(1.0 / delta);
  for (int i = 0; i < points; ++i) {
    double t = f.grid.x(i);
    if (t <= delta * eps) {
      f.value[i] = 1.0;
      f.d1[i] = f.d2[i] = 0.0;
      continue;
    }
    if (t >= eps) {
      f.value[i] = f.d1[i] = f.d2[i] = 0.0;
      continue;
    }
    double r = std::log(eps / t) / L;
    double rp = -1.0 / (t * L);
    double rpp = 1.0 / (t * t * L);
    f.value[i] = smoothstep5(r);
    f.d1[i] = smoothstep5_d1(r) * rp;
    f.d2[i] = smoothstep5_d2(r) * rp * rp + smoothstep5_d1(r) * rpp;
  }
  return f;
}

CutoffFunction build_chi(double eps1, int points) {
  if (!(eps1 > 0.0 && eps1 < 0.5))
    throw ValidationError("chi cutoff: eps1 in (0, 1/2) required");
  CutoffFunction f;
  f.kind = CutoffKind::chi;
  f.eps1 = eps1;
  const double T = std::sqrt(eps1);
  f.grid = {0.0, 1.5 * T, points};

  // chi' profile: 1 on [0, eps1/4], down-ramp of slope -2/eps1 to 0 at
  // 3 eps1/4, flat to eps1, then a smooth negative dip returning the area.
  const double a = 0.25 * eps1;
  const double b = 0.75 * eps1;
  auto chi_p_raw = [&](double t) {
    if (t <= a) return 1.0;
    if (t < b) return 1.0 - 2.0 / eps1 * (t - a);
    if (t < eps1) return 0.0;
    if (t < T) {
      double s = (t - eps1) / (T - eps1);
      double amp = eps1 / (T - eps1); // area eps1/2 returned to zero
      return -amp * std::sin(kPi * s) * std::sin(kPi * s);
    }
    return 0.0;
  };
  // Mollify chi' with a quintic bump on a fine internal grid.
  const int fine = 16 * points;
  const double hf = f.grid.b / double(fine - 1);
  const double w = eps1 / 16.0;
  const int halfw = std::max(1, int(w / hf));
  std::vector<double> cp(fine), kernel(2 * halfw + 1);
  double ksum = 0.0;
  for (int j = -halfw; j <= halfw; ++j) {
    double s = double(j) / double(halfw + 1);
    kernel[j + halfw] = std::pow(1.0 - s * s, 3);
    ksum += kernel[j + halfw];
  }
  for (auto& kv : kernel) kv /= ksum;
  for (int i = 0; i < fine; ++i) {
    double t = i * hf;
    double acc = 0.0;
    for (int j = -halfw; j <= halfw; ++j)
      acc += kernel[j + halfw] * chi_p_raw(t + j * hf);
    cp[i] = acc;
  }
  // Rescale the tail dip so the discrete integral lands exactly at zero.
  {
    double head = 0.0, tail = 0.0;
    for (int i = 0; i + 1 < fine; ++i) {
      double seg = 0.5 * hf * (cp[i] + cp[i + 1]);
      double t = (i + 0.5) * hf;
      (cp[i] + cp[i + 1] >= 0.0 && t < eps1 ? head : tail) += seg;
    }
    double want = -head;
    if (tail < -1e-300) {
      double fac = want / tail;
      for (int i = 0; i < fine; ++i) {
        double t = i * hf;
        if (t > eps1 - w && cp[i] < 0.0) cp[i] *= fac;
      }
    }
  }
  auto chi_fine = interp::cumtrapz(cp, hf);
  // Zero beyond the support exactly.
  for (int i = 0; i < fine; ++i)
    if (i * hf >= T + w) chi_fine[i] = 0.0;

  f.value.resize(points);
  f.d1.resize(points);
  f.d2.resize(points);
  f.c0 = 0.0;
  for (int i = 0; i < points; ++i) {
    double t = f.grid.x(i);
    int j = std::min(fine - 2, std::max(1, int(t / hf + 0.5)));
    f.value[i] = chi_fine[j] + (t - j * hf) * cp[j];
    f.d1[i] = cp[j] + (t - j * hf) * (cp[j + 1] - cp[j - 1]) / (2.0 * hf);
    f.d2[i] = (cp[j + 1] - cp[j - 1]) / (2.0 * hf);
    if (t <= a - w) { // exact region: chi(t) = t
      f.value[i] = t;
      f.d1[i] = 1.0;
      f.d2[i] = 0.0;
    }
    f.c0 = std::max({f.c0, std::abs(f.d1[i]), std::abs(f.d2[i]) * eps1 / 2.0});
  }
  return f;
}

} // namespace

CutoffFunction build_cutoff(CutoffKind kind, double a, double b, int points) {
  if (kind == CutoffKind::log_cutoff) return build_log_cutoff(a, b, points);
  return build_chi(a, points);
}

double BoundaryCollar::sff0() const {
  double dt = t[1] - t[0];
  double Gp0 = (-3.0 * G[0] + 4.0 * G[1] - G[2]) / (2.0 * dt);
  return -Gp0 / (2.0 * G[0]);
}

geom::CollarMetric BoundaryCollar::as_collar() const {
  geom::CollarMetric c;
  c.slices.m = m;
  c.slices.round = true;
  c.slices.t = t;
  c.slices.r.resize(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) c.slices.r[i] = std::sqrt(G[i]);
  c.lapse.assign(t.size(), std::vector<double>(1, 1.0));
  return c;
}

std::vector<double> BoundaryCollar::ambient_scalar() const {
  auto sc = geom::slice_curvature(as_collar());
  std::vector<double> R(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i) R[i] = sc[i].R[0];
  return R;
}

std::vector<double> BoundaryCollar::mean_curvature() const {
  double dt = t[1] - t[0];
  auto Gp = geom::profile_d1(G, dt, 0, 2);
  std::vector<double> H(G.size());
  for (std::size_t i = 0; i < G.size(); ++i)
    H[i] = -0.5 * double(m) * Gp[i] / G[i];
  return H;
}

BoundaryCollar schwarzschild_boundary_collar(double mass, double x0, int n,
                                             double depth, int points) {
  schw::SchwarzschildOrbit o{2.0 * mass, n};
  if (!(x0 > o.horizon_radius()))
    throw ValidationError("schwarzschild collar: x0 inside the horizon");
  BoundaryCollar c;
  c.m = n;
  c.t = interp::linspace(0.0, depth, points);
  c.G.resize(points);
  double r = x0;
  double dt = c.t[1] - c.t[0];
  c.G[0] = r * r;
  for (int i = 1; i < points; ++i) {
    // dr/dt = -y(r): inward Fermi coordinate off the boundary sphere.
    auto f = [&](double rv) { return -o.y(rv); };
    double k1 = f(r);
    double k2 = f(r + 0.5 * dt * k1);
    double k3 = f(r + 0.5 * dt * k2);
    double k4 = f(r + dt * k3);
    r += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!(r > o.horizon_radius()))
      throw ValidationError("schwarzschild collar: depth reaches the horizon");
    c.G[i] = r * r;
  }
  return c;
}

BoundaryCollar product_boundary_collar(double radius, int m, double depth,
                                       int points) {
  BoundaryCollar c;
  c.m = m;
  c.t = interp::linspace(0.0, depth, points);
  c.G.assign(points, radius * radius);
  return c;
}

CNormalResult exact_c_normal_collar(double G0, double sff0, double C, int m,
                                    double depth, int points) {
  CNormalResult out;
  out.C0 = 0.0;
  out.cnormal.G0 = G0;
  out.cnormal.sff0 = sff0;
  out.cnormal.C = C;
  out.cnormal.m = m;
  out.cnormal.t = interp::linspace(0.0, depth, points);
  out.cnormal.G.resize(points);
  out.deformed.m = m;
  out.deformed.t = out.cnormal.t;
  out.deformed.G.resize(points);
  for (int i = 0; i < points; ++i) {
    double t = out.cnormal.t[i];
    double G = G0 * (1.0 - C * t * t) - 2.0 * t * sff0 * G0;
    if (!(G > 0.0))
      throw ValidationError("exact_c_normal_collar: depth collapses the slices");
    out.cnormal.G[i] = G;
    out.deformed.G[i] = G;
  }
  return out;
}

CNormalResult make_c_normal(const BoundaryCollar& collar, double C, double eta,
                            double window, const Tolerances& tol) {
  (void)tol;
  const int np = int(collar.t.size());
  const double dt = collar.t[1] - collar.t[0];
  if (window > collar.t.back())
    throw ValidationError("make_c_normal: window exceeds the collar depth");
  const double G0 = collar.G[0];
  const double Gp0 = (-3.0 * collar.G[0] + 4.0 * collar.G[1] - collar.G[2]) /
                     (2.0 * dt);
  const double Gpp0 = (2.0 * collar.G[0] - 5.0 * collar.G[1] +
                       4.0 * collar.G[2] - collar.G[3]) / (dt * dt);
  // C0 = max(-tr_{g0} g''_0) / (2 m); for round slices tr g''_0 = m Gpp/G0.
  const double C0 = std::max(0.0, -Gpp0 / (2.0 * G0));
  CNormalResult out;
  out.C0 = C0;
  if (C < C0)
    throw ValidationError("make_c_normal: C below the C0 threshold");

  auto R_in = collar.ambient_scalar();
  // Sweep the cutoff sharpness (the curvature penalty decays with
  // 1/|log delta|) and the window; an attempt is admissible only while the
  // exact inner zone [0, delta window] still spans a few grid cells.
  for (int attempt = 0; attempt < 42; ++attempt) {
    double win = window / double(1 << (attempt / 7));
    const double deltas[7] = {0.2, 0.1, 0.05, 0.02, 0.01, 3e-3, 1e-3};
    double delta = deltas[attempt % 7];
    if (delta * win < 4.0 * dt) continue;
    auto tau = build_log_cutoff(delta, win, 4097);
    interp::Pchip tau_i(tau.grid.samples(), tau.value);
    BoundaryCollar hat = collar;
    for (int i = 0; i < np; ++i) {
      double t = collar.t[i];
      double Rt = collar.G[i] - G0 - t * Gp0 - 0.5 * t * t * Gpp0;
      double tv = t >= win ? 0.0 : (t <= delta * win ? 1.0 : tau_i(t));
      hat.G[i] = collar.G[i] - tv * (0.5 * t * t * (Gpp0 + 2.0 * C * G0) + Rt);
    }
    // C1 deviation over the window, relative to the boundary scale.
    auto dG = geom::profile_d1(collar.G, dt, 0, 2);
    auto dGh = geom::profile_d1(hat.G, dt, 0, 2);
    double dev = 0.0;
    for (int i = 0; i < np; ++i) {
      dev = std::max(dev, std::abs(hat.G[i] - collar.G[i]) / G0);
      dev = std::max(dev, std::abs(dGh[i] - dG[i]) / G0);
    }
    auto R_hat = hat.ambient_scalar();
    double drop = 0.0;
    for (int i = 0; i < np; ++i) drop = std::min(drop, R_hat[i] - R_in[i]);
    if (dev <= eta && drop >= -eta) {
      out.deformed = std::move(hat);
      out.achieved_c1_dev = dev;
      out.min_R_drop = drop;
      out.cnormal.G0 = G0;
      out.cnormal.sff0 = -Gp0 / (2.0 * G0);
      out.cnormal.C = C;
      out.cnormal.m = collar.m;
      double texact = delta * win;
      int ne = std::max(8, int(texact / dt));
      out.cnormal.t = interp::linspace(0.0, texact, ne);
      out.cnormal.G.resize(ne);
      for (int i = 0; i < ne; ++i) {
        double t = out.cnormal.t[i];
        out.cnormal.G[i] = G0 + t * Gp0 - C * t * t * G0;
      }
      return out;
    }
    out.achieved_c1_dev = dev;
    out.min_R_drop = drop;
  }
  throw ConvergenceError("make_c_normal: eta unattainable (achieved C1 dev " +
                         std::to_string(out.achieved_c1_dev) + ", R drop " +
                         std::to_string(out.min_R_drop) + ")");
}

PrescribeSffResult prescribe_sff(const CNormalResult& cn, double k_target,
                                 double eta, double eps1,
                                 const Tolerances& tol) {
  (void)tol;
  const CNormalCollar& cc = cn.cnormal;
  const double s0 = cc.sff0;
  const double H0 = double(cc.m) * s0;
  if (double(cc.m) * k_target > H0 + 1e-12)
    throw ValidationError("prescribe_sff: tr k <= H_0 violated");
  if (!(eps1 < std::min(0.5, 1.0 / (cc.C * cc.C)) || cc.C == 0.0))
    throw ValidationError("prescribe_sff: eps1 must be below min(1/2, C^-2)");
  if (std::sqrt(eps1) > cc.t.back() + 1e-12)
    throw ValidationError(
        "prescribe_sff: chi support exceeds the exact C-normal window");

  auto chi = build_chi(eps1, 4097);
  interp::Pchip chi_i(chi.grid.samples(), chi.value);

  const BoundaryCollar& hat = cn.deformed;
  const double dt = hat.t[1] - hat.t[0];
  PrescribeSffResult out;
  out.deformed = hat;
  const double G0 = cc.G0;
  for (std::size_t i = 0; i < hat.t.size(); ++i) {
    double t = hat.t[i];
    double cv = t >= chi.grid.b ? 0.0 : chi_i(t);
    out.deformed.G[i] = hat.G[i] + 2.0 * cv * (s0 - k_target) * G0;
  }
  double Gp0 =
      (-3.0 * out.deformed.G[0] + 4.0 * out.deformed.G[1] - out.deformed.G[2]) /
      (2.0 * dt);
  out.boundary_sff = -Gp0 / (2.0 * out.deformed.G[0]);

  auto H = out.deformed.mean_curvature();
  out.min_H_t = 1e300;
  double trk = double(cc.m) * k_target;
  for (std::size_t i = 0; i < H.size(); ++i)
    if (hat.t[i] <= std::sqrt(eps1)) out.min_H_t = std::min(out.min_H_t, H[i]);
  auto R_hat = hat.ambient_scalar();
  auto R_tld = out.deformed.ambient_scalar();
  out.min_R_drop = 0.0;
  out.max_c0_dev = 0.0;
  for (std::size_t i = 0; i < R_hat.size(); ++i) {
    out.min_R_drop = std::min(out.min_R_drop, R_tld[i] - R_hat[i]);
    out.max_c0_dev =
        std::max(out.max_c0_dev, std::abs(out.deformed.G[i] - hat.G[i]) / G0);
  }
  if (out.min_H_t < trk - eta)
    throw ConvergenceError("prescribe_sff: H_t >= tr k - eta violated");
  return out;
}

BarrierResult radial_conformal_barrier(const geom::WarpedMetric& annulus,
                                       BarrierMode mode) {
  if (annulus.kind != geom::MetricKind::tube)
    throw ValidationError("radial_conformal_barrier: annular tube required");
  annulus.validate();
  const int np = annulus.grid.points;
  const double h = annulus.grid.h();
  std::vector<double> w(np);
  for (int i = 0; i < np; ++i) w[i] = std::pow(annulus.profile[i], annulus.n);

  BarrierResult out;
  out.value.resize(np);
  if (mode == BarrierMode::harmonic) {
    std::vector<double> winv(np);
    for (int i = 0; i < np; ++i) winv[i] = 1.0 / w[i];
    auto I = interp::cumtrapz(winv, h);
    for (int i = 0; i < np; ++i) out.value[i] = I[i] / I.back();
    out.laplacian.assign(np, 0.0);
    out.d_left = winv[0] / I.back();
    out.d_right = winv[np - 1] / I.back();
    if (!(out.d_left > 0.0 && out.d_right > 0.0))
      throw ConvergenceError("harmonic barrier: Hopf sign check failed");
  } else {
    auto W = interp::cumtrapz(w, h);
    std::vector<double> integrand(np), winv(np);
    for (int i = 0; i < np; ++i) {
      winv[i] = 1.0 / w[i];
      integrand[i] = W[i] / w[i];
    }
    double c1 = trapezoid(integrand, h) / trapezoid(winv, h);
    std::vector<double> zp(np);
    for (int i = 0; i < np; ++i) zp[i] = (c1 - W[i]) / w[i];
    auto Z = interp::cumtrapz(zp, h);
    out.value = Z;
    out.value.back() = 0.0;
    out.laplacian.assign(np, -1.0);
    out.d_left = zp[0];
    out.d_right = zp[np - 1];
    for (int i = 1; i + 1 < np; ++i)
      if (!(out.value[i] > 0.0))
        throw ConvergenceError("torsion barrier: interior positivity failed");
    if (!(out.d_left > 0.0 && out.d_right < 0.0))
      throw ConvergenceError("torsion barrier: Hopf sign check failed");
  }
  return out;
}

} // namespace hf::smoothing
