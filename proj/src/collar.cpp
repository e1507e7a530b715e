#include "horizonforge/collar.hpp"

#include <algorithm>
#include <cmath>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"
#include "horizonforge/spectral.hpp"

namespace hf::collar {

namespace {

// Piecewise-analytic monotone schedule on [0,1] with exact derivatives:
// optional power-law ends joined by a C^2 quintic.
struct Schedule {
  double t1 = 1.0, t2 = 1.0;   // joints; middle active when t1 < t2
  double a0 = 0.0, aL = 1.0;   // left piece a0 + aL t^pL
  int pL = 1;
  double b0 = 1.0, aR = 0.0;   // right piece b0 - aR (1-t)^pR - cR (1-t)^2
  int pR = 2;
  double cR = 0.0;
  double q[6] = {0, 0, 0, 0, 0, 0};

  double left(double t) const { return a0 + aL * std::pow(t, pL); }
  double left_d1(double t) const { return aL * pL * std::pow(t, pL - 1); }
  double left_d2(double t) const {
    return pL < 2 ? 0.0 : aL * pL * (pL - 1) * std::pow(t, pL - 2);
  }
  double right(double t) const {
    double u = 1.0 - t;
    return b0 - aR * std::pow(u, pR) - cR * u * u;
  }
  double right_d1(double t) const {
    double u = 1.0 - t;
    return aR * pR * std::pow(u, pR - 1) + 2.0 * cR * u;
  }
  double right_d2(double t) const {
    double u = 1.0 - t;
    double base = pR < 2 ? 0.0 : -aR * pR * (pR - 1) * std::pow(u, pR - 2);
    return base - 2.0 * cR;
  }

  void build_middle() {
    if (!(t1 < t2)) return;
    double L = t2 - t1;
    q[0] = left(t1);
    q[1] = left_d1(t1) * L;
    q[2] = left_d2(t1) * L * L;
    q[3] = right(t2);
    q[4] = right_d1(t2) * L;
    q[5] = right_d2(t2) * L * L;
  }

  void eval(double t, double& v, double& d1v, double& d2v) const {
    if (t <= t1 || !(t1 < t2)) {
      v = left(t);
      d1v = left_d1(t);
      d2v = left_d2(t);
      return;
    }
    if (t >= t2) {
      v = right(t);
      d1v = right_d1(t);
      d2v = right_d2(t);
      return;
    }
    double L = t2 - t1;
    double s = (t - t1) / L;
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    double h3 = 10 * s3 - 15 * s4 + 6 * s5;
    double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    double h5 = 0.5 * (s3 - 2 * s4 + s5);
    v = q[0] * h0 + q[1] * h1 + q[2] * h2 + q[3] * h3 + q[4] * h4 + q[5] * h5;
    double g0 = -30 * s2 + 60 * s3 - 30 * s4;
    double g1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    double g2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    double g3 = -g0;
    double g4 = -12 * s2 + 28 * s3 - 15 * s4;
    double g5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    d1v = (q[0] * g0 + q[1] * g1 + q[2] * g2 + q[3] * g3 + q[4] * g4 +
           q[5] * g5) / L;
    double w0 = -60 * s + 180 * s2 - 120 * s3;
    double w1 = -36 * s + 96 * s2 - 60 * s3;
    double w2 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
    double w3 = -w0;
    double w4 = -24 * s + 84 * s2 - 60 * s3;
    double w5 = 0.5 * (6 * s - 24 * s2 + 20 * s3);
    d2v = (q[0] * w0 + q[1] * w1 + q[2] * w2 + q[3] * w3 + q[4] * w4 +
           q[5] * w5) / (L * L);
  }
};

struct EigenFamily {
  std::vector<double> lambda;
  std::vector<std::vector<double>> u;
};

EigenFamily eigen_along(const geom::RadialFamily& fam, double k,
                        const Tolerances& tol) {
  EigenFamily e;
  const int nt = fam.nt();
  e.lambda.resize(nt);
  e.u.resize(nt);
  for (int it = 0; it < nt; ++it) {
    auto r = spectral::lambda1_slice(fam, it, k, tol);
    e.lambda[it] = r.lambda1;
    e.u[it] = std::move(r.eigenfunction);
  }
  return e;
}

double min_R_of_A(const std::vector<std::vector<double>>& S0,
                  const std::vector<std::vector<double>>& W, double A,
                  int skip_first_t) {
  double best = 1e300;
  for (std::size_t it = skip_first_t; it < S0.size(); ++it)
    for (std::size_t i = 0; i < S0[it].size(); ++i)
      best = std::min(best, S0[it][i] - W[it][i] / (A * A));
  return best;
}

double select_amplitude(const std::vector<std::vector<double>>& S0,
                        const std::vector<std::vector<double>>& W,
                        int skip_first_t) {
  double A = 1.0;
  int guard = 0;
  while (min_R_of_A(S0, W, A, skip_first_t) <= 0.0) {
    A *= 2.0;
    if (++guard > 200)
      throw ConvergenceError("collar: no PSC amplitude found (lambda1 <= 0?)");
  }
  if (guard == 0) return A;
  double lo = A / 2.0, hi = A;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (min_R_of_A(S0, W, mid, skip_first_t) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// R_h(A) = S0 - W/A^2 exactly; recover the split from A = 1 and A = 2.
void split_amplitude_dependence(const geom::CollarMetric& base,
                                const std::vector<std::vector<double>>& u,
                                std::vector<std::vector<double>>& S0,
                                std::vector<std::vector<double>>& W) {
  geom::CollarMetric c1 = base;
  geom::CollarMetric c2 = base;
  const int nt = base.slices.nt();
  c1.lapse = u;
  c2.lapse = u;
  for (int it = 0; it < nt; ++it)
    for (auto& v : c2.lapse[it]) v *= 2.0;
  c1.A = 1.0;
  c2.A = 2.0;
  auto sc1 = geom::slice_curvature(c1);
  auto sc2 = geom::slice_curvature(c2);
  S0.assign(nt, {});
  W.assign(nt, {});
  for (int it = 0; it < nt; ++it) {
    const std::size_t nx = sc1[it].R.size();
    S0[it].resize(nx);
    W[it].resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      double w = (sc2[it].R[i] - sc1[it].R[i]) * 4.0 / 3.0;
      W[it][i] = w;
      S0[it][i] = sc1[it].R[i] + w;
    }
  }
}

} // namespace

CollarReport make_report(const geom::CollarMetric& c, const Tolerances& tol) {
  auto sc = geom::slice_curvature(c);
  CollarReport rep;
  rep.min_R = 1e300;
  const int nt = c.slices.nt();
  rep.slice_H_min.resize(nt);
  rep.slice_H_max.resize(nt);
  for (int it = 0; it < nt; ++it) {
    rep.slice_H_min[it] = kern::vmin(sc[it].H);
    rep.slice_H_max[it] = kern::vmax(sc[it].H);
    for (std::size_t i = 0; i < sc[it].R.size(); ++i) {
      if (sc[it].R[i] < rep.min_R) {
        rep.min_R = sc[it].R[i];
        rep.min_R_x = c.slices.round ? 0.0 : c.slices.x.x(int(i));
        rep.min_R_t = c.slices.t[it];
      }
    }
  }
  double h0 =
      std::max(std::abs(rep.slice_H_min[0]), std::abs(rep.slice_H_max[0]));
  rep.left_minimal = h0 <= 1e3 * tol.twist_volume;
  rep.right_H_sign = rep.slice_H_min[nt - 1] > 0.0
                         ? 1
                         : (rep.slice_H_max[nt - 1] < 0.0 ? -1 : 0);
  return rep;
}

CollarBuild build_minimal_collar(const paths::MetricPath& path, double k,
                                 const Tolerances& tol) {
  CollarBuild b;
  b.k = k;
  b.epsilon = 0.0;
  b.twist = paths::moser_twist(path, tol);
  const geom::RadialFamily& fam = b.twist.twisted;
  const int nt = fam.nt();

  EigenFamily e = eigen_along(fam, k, tol);
  for (double lam : e.lambda)
    if (!(lam > tol.membership))
      throw ValidationError(
          "build_minimal_collar: lambda1(t) must be strictly positive");
  b.lambda1_tau = e.lambda;
  b.u_tau = e.u;

  geom::CollarMetric base;
  base.slices = fam;
  base.epsilon = 0.0;

  std::vector<std::vector<double>> S0, W;
  split_amplitude_dependence(base, e.u, S0, W);
  double A = select_amplitude(S0, W, 0);

  b.A = A;
  b.collar = std::move(base);
  b.collar.A = A;
  b.collar.lapse = e.u;
  for (int it = 0; it < nt; ++it)
    for (auto& v : b.collar.lapse[it]) v *= A;
  b.rho.assign(nt, 0.0);
  b.rho_d1.assign(nt, 0.0);
  b.rho_d2.assign(nt, 0.0);
  b.tau = fam.t;
  b.tau_d1.assign(nt, 1.0);
  b.report = make_report(b.collar, tol);
  if (!(b.report.min_R > 0.0))
    throw ConvergenceError("build_minimal_collar: selected amplitude not PSC");
  return b;
}

CollarBuild build_mean_convex_collar(const paths::MetricPath& path, double k,
                                     double epsilon, bool left_degenerate,
                                     bool right_degenerate,
                                     const Tolerances& tol) {
  if (!(epsilon > 0.0))
    throw ValidationError("build_mean_convex_collar: epsilon > 0 required");
  CollarBuild b;
  b.k = k;
  b.epsilon = epsilon;
  b.twist = paths::moser_twist(path, tol);
  const geom::RadialFamily& fam = b.twist.twisted;
  const int nt = fam.nt();
  const int nx = fam.nx();
  const int m = fam.m;
  const double dt = fam.dt();

  EigenFamily e = eigen_along(fam, k, tol);

  auto check_end = [&](int idx, bool degenerate, double slope_sign) {
    double lam = e.lambda[idx];
    if (degenerate) {
      if (std::abs(lam) > 1e3 * tol.membership)
        throw ValidationError(
            "collar: degeneracy flag inconsistent with lambda1 endpoint");
      int i1 = idx == 0 ? 1 : nt - 2;
      double slope = (e.lambda[i1] - lam) / dt * slope_sign;
      if (!(slope > 0.0))
        throw ValidationError(
            "collar: degenerate endpoint needs positive lambda1 slope");
    } else if (!(lam > tol.membership)) {
      throw ValidationError("collar: lambda1 endpoint not strictly positive");
    }
  };
  check_end(0, left_degenerate, 1.0);
  check_end(nt - 1, right_degenerate, -1.0);
  for (int it = 1; it + 1 < nt; ++it)
    if (!(e.lambda[it] > tol.membership))
      throw ValidationError("collar: lambda1 must be positive on the interior");

  interp::Pchip lam_of_tau(fam.t, e.lambda);

  // tau: identity unless an end is degenerate, then parabolic there with
  // alpha from the lambda1 slope, verified against (tau')^2 <= lambda1/2.
  Schedule tau;
  tau.a0 = 0.0;
  tau.b0 = 1.0;
  if (left_degenerate || right_degenerate) {
    tau.t1 = left_degenerate ? 0.3 : 0.0;
    tau.t2 = right_degenerate ? 0.7 : 1.0;
    double lamp0 = (e.lambda[1] - e.lambda[0]) / dt;
    double lamp1 = (e.lambda[nt - 1] - e.lambda[nt - 2]) / dt;
    double aL = left_degenerate ? std::min(1.0, 0.5 * lamp0) : 1.0;
    double aR = right_degenerate ? std::min(1.0, -0.5 * lamp1) : 1.0;
    for (int guard = 0; guard < 60; ++guard) {
      tau.aL = aL;
      tau.pL = left_degenerate ? 2 : 1;
      tau.aR = aR;
      tau.pR = right_degenerate ? 2 : 1;
      tau.build_middle();
      bool ok = true;
      const double fac_right = 1.0 / (1.0 + epsilon);
      for (int j = 0; j <= 64 && ok; ++j) {
        double t = j / 64.0;
        double v, d1v, d2v;
        tau.eval(t, v, d1v, d2v);
        ok = d1v >= 0.0 && v > -1e-12 && v < 1.0 + 1e-12;
        if (ok && left_degenerate && t <= tau.t1)
          ok = d1v * d1v <=
               0.5 * std::max(0.0, lam_of_tau(std::clamp(v, 0.0, 1.0))) + 1e-14;
        if (ok && right_degenerate && t >= tau.t2)
          ok = d1v * d1v <= 0.5 * fac_right *
                   std::max(0.0, lam_of_tau(std::clamp(v, 0.0, 1.0))) + 1e-14;
      }
      if (ok) break;
      if (left_degenerate) aL *= 0.5;
      if (right_degenerate) aR *= 0.5;
      if (guard == 59)
        throw ConvergenceError("collar: no admissible alpha for tau schedule");
    }
  } else {
    tau.t1 = 1.0;
    tau.t2 = 1.0;
    tau.aL = 1.0;
    tau.pL = 1;
  }

  // rho: t^2 in the plain case, quartic start when the left end degenerates
  // (rho'' + rho' <= lambda1/2 near 0), concave tail at a degenerate right
  // end (-rho'' + tau' dlog(u) rho' > 0 there is checked a posteriori).
  Schedule rho;
  rho.a0 = 0.0;
  rho.b0 = 1.0;
  if (!left_degenerate && !right_degenerate) {
    rho.t1 = 1.0;
    rho.t2 = 1.0;
    rho.aL = 1.0;
    rho.pL = 2;
  } else {
    rho.t1 = 0.3;
    rho.t2 = right_degenerate ? 0.7 : 1.0;
    rho.pL = left_degenerate ? 4 : 2;
    double c0 = 1.0;
    if (left_degenerate) {
      double lamp0 = (e.lambda[1] - e.lambda[0]) / dt;
      c0 = std::max(1e-6, lamp0 * tau.aL / 64.0);
    }
    rho.aL = c0;
    if (right_degenerate) {
      rho.aR = 0.3;
      rho.pR = 1;
      rho.cR = 0.2; // concave tail: -rho'' > 0 near t = 1
    } else {
      rho.aR = 0.5;
      rho.pR = 1;
    }
    for (int guard = 0; guard < 60; ++guard) {
      rho.build_middle();
      bool ok = true;
      for (int j = 1; j <= 64 && ok; ++j) {
        double t = j / 64.0;
        double v, d1v, d2v;
        rho.eval(t, v, d1v, d2v);
        ok = d1v > 0.0 && v > -1e-12 && v < 1.0 + 1e-12;
        if (ok && left_degenerate && t <= rho.t1) {
          double tv, td1, td2;
          tau.eval(t, tv, td1, td2);
          ok = d2v + d1v <=
               0.5 * std::max(0.0, lam_of_tau(std::clamp(tv, 0.0, 1.0))) + 1e-14;
        }
      }
      if (ok) break;
      rho.aL *= 0.5;
      if (guard == 59)
        throw ConvergenceError("collar: no admissible rho schedule");
    }
  }

  // Schedules fixed; evaluate them on the output grid and rebuild the path
  // exactly at the tau values (affine resampling plus a fresh twist), so
  // every output slice carries its own exact eigenpair.
  b.rho.resize(nt);
  b.rho_d1.resize(nt);
  b.rho_d2.resize(nt);
  b.tau.resize(nt);
  b.tau_d1.resize(nt);
  for (int it = 0; it < nt; ++it) {
    double t = fam.t[it];
    double rv, r1, r2, tv, t1, t2;
    rho.eval(t, rv, r1, r2);
    tau.eval(t, tv, t1, t2);
    b.rho[it] = rv;
    b.rho_d1[it] = r1;
    b.rho_d2[it] = r2;
    b.tau[it] = std::clamp(tv, 0.0, 1.0);
    b.tau_d1[it] = t1;
  }
  {
    paths::MetricPath resampled = paths::resample_path(path, b.tau);
    resampled.t = fam.t; // uniform output parameter
    b.twist = paths::moser_twist(resampled, tol);
  }
  const geom::RadialFamily& fam2 = b.twist.twisted;
  EigenFamily e2 = eigen_along(fam2, k, tol);
  b.lambda1_tau = e2.lambda;
  b.u_tau = e2.u;

  geom::RadialFamily out;
  out.m = m;
  out.closed = fam2.closed;
  out.x = fam2.x;
  out.t = fam2.t;
  out.q.assign(nt, std::vector<double>(nx));
  out.p.assign(nt, std::vector<double>(nx));
  std::vector<std::vector<double>> u_out = e2.u;
  for (int it = 0; it < nt; ++it) {
    double scale = std::sqrt(1.0 + epsilon * b.rho[it]);
    for (int i = 0; i < nx; ++i) {
      out.q[it][i] = scale * fam2.q[it][i];
      out.p[it][i] = scale * fam2.p[it][i];
    }
  }

  geom::CollarMetric base;
  base.slices = std::move(out);
  base.epsilon = epsilon;
  base.rho = b.rho;
  base.tau = b.tau;

  std::vector<std::vector<double>> S0, W;
  split_amplitude_dependence(base, u_out, S0, W);
  double A = select_amplitude(S0, W, 1);
  if (!left_degenerate) {
    int guard = 0;
    while (min_R_of_A(S0, W, A, 0) <= 0.0) {
      A *= 2.0;
      if (++guard > 200)
        throw ConvergenceError("collar: no amplitude makes the left slice PSC");
    }
  }

  b.A = A;
  b.collar = std::move(base);
  b.collar.A = A;
  b.collar.lapse = u_out;
  for (int it = 0; it < nt; ++it)
    for (auto& v : b.collar.lapse[it]) v *= A;
  b.report = make_report(b.collar, tol);
  return b;
}

std::vector<std::vector<double>> scal_identity_assembly(const CollarBuild& b) {
  // The stored twist family is already parametrized by the output t (its
  // slices sit at tau(t)), so composite d/dt stencils of it carry the tau'
  // factors of the printed formula automatically.
  const geom::RadialFamily& tw = b.twist.twisted;
  const int nt = tw.nt();
  const int nx = tw.nx();
  const int m = tw.m;
  const double dt = tw.dt();
  const double eps = b.epsilon;

  std::vector<std::vector<double>> sff_sq(nt, std::vector<double>(nx));
  std::vector<std::vector<double>> dlogu(nt, std::vector<double>(nx));
  {
    std::vector<double> ser(nt), der(nt);
    std::vector<std::vector<double>> qdot(nt, std::vector<double>(nx)),
        pdot(nt, std::vector<double>(nx));
    for (int i = 0; i < nx; ++i) {
      for (int it = 0; it < nt; ++it) ser[it] = tw.q[it][i];
      der = geom::profile_d1(ser, dt, 0, 2);
      for (int it = 0; it < nt; ++it) qdot[it][i] = der[it];
      for (int it = 0; it < nt; ++it) ser[it] = tw.p[it][i];
      der = geom::profile_d1(ser, dt, 0, 2);
      for (int it = 0; it < nt; ++it) pdot[it][i] = der[it];
      for (int it = 0; it < nt; ++it) ser[it] = std::log(b.u_tau[it][i]);
      der = geom::profile_d1(ser, dt, 0, 2);
      for (int it = 0; it < nt; ++it) dlogu[it][i] = der[it];
    }
    for (int it = 0; it < nt; ++it) {
      for (int i = 0; i < nx; ++i) {
        bool pole = tw.closed && (i == 0 || i == nx - 1);
        double a_q = qdot[it][i] / tw.q[it][i];
        double a_p = pole ? a_q : pdot[it][i] / tw.p[it][i];
        sff_sq[it][i] = a_q * a_q + double(m - 1) * a_p * a_p;
      }
    }
  }

  const double A = b.A;
  std::vector<std::vector<double>> out(nt, std::vector<double>(nx));
  for (int it = 0; it < nt; ++it) {
    double rv = b.rho[it], r1 = b.rho_d1[it], r2 = b.rho_d2[it];
    double fac = 1.0 + eps * rv;
    double lam = b.lambda1_tau[it];
    for (int i = 0; i < nx; ++i) {
      double u = b.u_tau[it][i];
      double A2u2 = A * A * u * u;
      // The eps^2 rho'^2 coefficient is +m(3-m)/4; recombining the dH/dt,
      // H^2 and |sff|^2 pieces fixes the sign.
      out[it][i] = 2.0 * lam / fac
                   - double(m) * eps * r2 / (fac * A2u2)
                   + (3.0 - m) * double(m) * eps * eps * r1 * r1 /
                         (4.0 * fac * fac * A2u2)
                   - sff_sq[it][i] / A2u2
                   + double(m) * eps * r1 * dlogu[it][i] / (fac * A2u2);
    }
  }
  return out;
}

} // namespace hf::collar
