#include "horizonforge/schwarzschild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"

namespace hf::schw {

namespace {

// First derivative on a (possibly nonuniform) strictly increasing grid.
std::vector<double> d1_nonuniform(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    d[i] = (-hr / (hl * (hl + hr))) * y[i - 1] +
           ((hr - hl) / (hl * hr)) * y[i] +
           (hl / (hr * (hl + hr))) * y[i + 1];
  }
  {
    double h0 = x[1] - x[0], h1 = x[2] - x[1];
    d[0] = -(2 * h0 + h1) / (h0 * (h0 + h1)) * y[0] +
           (h0 + h1) / (h0 * h1) * y[1] - h0 / (h1 * (h0 + h1)) * y[2];
    double g1 = x[n - 2] - x[n - 3], g0 = x[n - 1] - x[n - 2];
    d[n - 1] = (2 * g0 + g1) / (g0 * (g0 + g1)) * y[n - 1] -
               (g0 + g1) / (g0 * g1) * y[n - 2] +
               g0 / (g1 * (g0 + g1)) * y[n - 3];
  }
  return d;
}

// C^2 quintic Hermite on [0,1] with value/first/second derivative data.
struct Quintic {
  double y0, d0, a0, y1, d1, a1;
  double eval(double s) const {
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    double h0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    double h1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    double h2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    double h3 = 10 * s3 - 15 * s4 + 6 * s5;
    double h4 = -4 * s3 + 7 * s4 - 3 * s5;
    double h5 = 0.5 * (s3 - 2 * s4 + s5);
    return y0 * h0 + d0 * h1 + a0 * h2 + y1 * h3 + d1 * h4 + a1 * h5;
  }
  double deriv(double s) const {
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    double h0 = -30 * s2 + 60 * s3 - 30 * s4;
    double h1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    double h2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    double h3 = 30 * s2 - 60 * s3 + 30 * s4;
    double h4 = -12 * s2 + 28 * s3 - 15 * s4;
    double h5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    return y0 * h0 + d0 * h1 + a0 * h2 + y1 * h3 + d1 * h4 + a1 * h5;
  }
};

double orbit_constant(double x, double y, int n) {
  return std::pow(x, n - 1) * (1.0 - y * y);
}

double orbit_constant_slope(double x, double y, double yp, int n) {
  return std::pow(x, n - 2) * ((n - 1) * (1.0 - y * y) - 2.0 * x * y * yp);
}

} // namespace

void PlanarProfile::validate() const {
  if (x.size() < 2 || x.size() != y.size())
    throw ValidationError("PlanarProfile: need matching x/y with >= 2 samples");
  if (n < 2) throw ValidationError("PlanarProfile: n >= 2 required");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1]))
      throw ValidationError("PlanarProfile: x must be strictly increasing");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0 || y[i] > 1.0 + 1e-12)
      throw ValidationError("PlanarProfile: y must lie in [0, 1]");
    if (i > 0 && !(y[i] > 0.0))
      throw ValidationError("PlanarProfile: y may vanish only at the horizon sample");
  }
}

void PlanarProfile::recompute_margin() {
  validate();
  // margin = C'(x) x^{1-n} / ((n-1) y) with C = x^{n-1}(1 - y^2): identical
  // to (1-y^2)/(xy) - 2/(n-1) y' analytically, but exact (to rounding) on
  // Schwarzschild orbits and regular across the horizon.
  std::vector<double> Cs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    Cs[i] = orbit_constant(x[i], y[i], n);
  auto Cp = d1_nonuniform(x, Cs);
  margin.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0.0) {
      margin[i] = std::numeric_limits<double>::infinity();
    } else {
      margin[i] = Cp[i] * std::pow(x[i], 1 - n) / (double(n - 1) * y[i]);
    }
  }
}

double SchwarzschildOrbit::horizon_radius() const {
  return C > 0.0 ? std::pow(C, 1.0 / double(n - 1)) : 0.0;
}

double SchwarzschildOrbit::y(double xv) const {
  return std::sqrt(std::max(0.0, 1.0 - C * std::pow(xv, 1 - n)));
}

double SchwarzschildOrbit::slope(double xv) const {
  double yv = y(xv);
  if (yv <= 0.0) return std::numeric_limits<double>::infinity();
  return double(n - 1) * C * std::pow(xv, -n) / (2.0 * yv);
}

PlanarProfile SchwarzschildOrbit::band(double x0, double x1, int points) const {
  if (!(x0 < x1)) throw ValidationError("orbit band: x0 < x1 required");
  if (x0 < horizon_radius() - 1e-14)
    throw ValidationError("orbit band: starts inside the horizon");
  PlanarProfile p;
  p.n = n;
  p.x = interp::linspace(x0, x1, points);
  p.y.resize(points);
  for (int i = 0; i < points; ++i) p.y[i] = y(p.x[i]);
  // Exact equality-case solution: the PSC margin vanishes identically.
  p.margin.assign(points, 0.0);
  return p;
}

SchwarzschildOrbit orbit(double x0, double y0, int n) {
  if (!(x0 > 0.0)) throw ValidationError("orbit: x0 > 0 required");
  if (y0 < 0.0 || y0 >= 1.0)
    throw ValidationError("orbit: y0 in [0,1) required");
  if (n < 2) throw ValidationError("orbit: n >= 2 required");
  return SchwarzschildOrbit{orbit_constant(x0, y0, n), n};
}

bool gluing_feasible(const PlanarProfile& p1, const PlanarProfile& p2) {
  p1.validate();
  p2.validate();
  if (p1.n != p2.n) throw ValidationError("gluing: slice dimensions differ");
  if (!(p1.x_back() < p2.x_front()))
    throw ValidationError("gluing: radius ranges overlap");
  SchwarzschildOrbit o = orbit(p1.x_back(), p1.y.back(), p1.n);
  return p2.y.front() < o.y(p2.x_front());
}

PlanarProfile glue_profiles(const PlanarProfile& p1, const PlanarProfile& p2,
                            int bridge_points) {
  if (!gluing_feasible(p1, p2))
    throw ValidationError("gluing condition (2') violated");
  const int n = p1.n;
  const double xL = p1.x_back(), xR = p2.x_front();
  const double L = xR - xL;

  auto yp1 = d1_nonuniform(p1.x, p1.y);
  auto yp2 = d1_nonuniform(p2.x, p2.y);
  double CL = orbit_constant(xL, p1.y.back(), n);
  double CR = orbit_constant(xR, p2.y.front(), n);
  double CLp = std::max(0.0, orbit_constant_slope(xL, p1.y.back(), yp1.back(), n));
  double CRp = std::max(0.0, orbit_constant_slope(xR, p2.y.front(), yp2.front(), n));

  // Bridge built in orbit-constant space, where the strict PSC inequality is
  // exactly C'(x) > 0: crossing the Schwarzschild flowlines monotonically.
  // The single quintic is tried first; fallbacks use end windows of width w
  // (for slope matching) around a middle ramp S(t)^gamma, back-loaded so the
  // curve can hug y > 0 corridors that open up only near the outer end.
  const double dC = CR - CL;
  auto eval_single = [&](double s, double& val, double& der) {
    Quintic q{CL, CLp * L, 0.0, CR, CRp * L, 0.0};
    val = q.eval(s);
    der = q.deriv(s) / L;
  };
  auto eval_pieced = [&](double w, double gamma, double s, double& val,
                         double& der) {
    // 0.4 keeps the end quintics monotone (start slope <= 2.5x their rise).
    double dA = std::max(0.4 * CLp * w * L, 1e-3 * w * dC);
    double dB = std::max(0.4 * CRp * w * L, 1e-3 * w * dC);
    if (s <= w) {
      Quintic q{CL, CLp * w * L, 0.0, CL + dA, 0.0, 0.0};
      val = q.eval(s / w);
      der = q.deriv(s / w) / (L * w);
    } else if (s < 1.0 - w) {
      // Smoothstep warped by a back-loaded exponential ramp: the curve hugs
      // the low orbit constants until the y > 0 corridor opens.
      double t = (s - w) / (1.0 - 2.0 * w);
      double S = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
      double Sp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
      double E, Ep;
      if (gamma < 0.5) {
        E = S;
        Ep = Sp;
      } else {
        double den = std::expm1(gamma);
        E = std::expm1(gamma * S) / den;
        Ep = gamma * std::exp(gamma * S) / den * Sp;
      }
      double amp = dC - dA - dB;
      val = CL + dA + amp * E;
      der = amp * Ep / (L * (1.0 - 2.0 * w));
    } else {
      Quintic q{CR - dB, 0.0, 0.0, CR, CRp * w * L, 0.0};
      val = q.eval((s - (1.0 - w)) / w);
      der = q.deriv((s - (1.0 - w)) / w) / (L * w);
    }
  };

  // Second family: three pieces in G = y^2 (match left / monotone middle /
  // short terminal climb). There margin > 0 is G' < (n-1)(1-G)/x, which a
  // descending middle satisfies automatically; the climb back up to the
  // target slope is kept short so its rate stays below the equality rate.
  // This covers targets sitting close to their own horizon.
  const double GL = p1.y.back() * p1.y.back();
  const double GR = p2.y.front() * p2.y.front();
  const double GLp = 2.0 * p1.y.back() * yp1.back();
  const double GRp = 2.0 * p2.y.front() * yp2.front();
  auto eval_G = [&](double wA, double wC, double s, double& Gv, double& Gp) {
    double GA = GL + 0.3 * GLp * L * wA;
    double dclimb = std::min(0.5 * GR, GRp * L * wC / 3.0 + 0.05 * GR * wC);
    double GC = GR - dclimb;
    if (s <= wA) {
      Quintic q{GL, GLp * L * wA, 0.0, GA, 0.0, 0.0};
      Gv = q.eval(s / wA);
      Gp = q.deriv(s / wA) / (L * wA);
    } else if (s < 1.0 - wC) {
      double t = (s - wA) / (1.0 - wA - wC);
      Quintic q{GA, 0.0, 0.0, GC, 0.0, 0.0};
      Gv = q.eval(t);
      Gp = q.deriv(t) / (L * (1.0 - wA - wC));
    } else {
      double t = (s - (1.0 - wC)) / wC;
      Quintic q{GC, 0.0, 0.0, GR, GRp * L * wC, 0.0};
      Gv = q.eval(t);
      Gp = q.deriv(t) / (L * wC);
    }
  };

  std::vector<double> bx, by, bm;
  bool built = false;
  const int n_c_attempts = 81;
  for (int attempt = 0; attempt < n_c_attempts + 25 && !built; ++attempt) {
    double w = 0.0, gamma = 0.0;
    if (attempt > 0 && attempt < n_c_attempts) {
      int idx = attempt - 1;
      w = 0.25 / double(1 << (idx / 5));
      const double gammas[5] = {0.0, 5.0, 10.0, 18.0, 27.0};
      gamma = gammas[idx % 5];
    }
    double wA = 0.0, wC = 0.0;
    if (attempt >= n_c_attempts) {
      int idx = attempt - n_c_attempts;
      wA = 0.25 / double(1 << (idx / 5));
      wC = 0.2 / double(1 << (idx % 5));
    }
    bool ok = true;
    bx.assign(bridge_points, 0.0);
    by.assign(bridge_points, 0.0);
    bm.assign(bridge_points, 0.0);
    for (int i = 0; i < bridge_points && ok; ++i) {
      double s = double(i + 1) / double(bridge_points + 1);
      double xv = xL + s * L;
      double y2, Cp;
      if (attempt >= n_c_attempts) {
        double Gv, Gp;
        eval_G(wA, wC, s, Gv, Gp);
        y2 = Gv;
        Cp = std::pow(xv, n - 2) * ((n - 1) * (1.0 - Gv) - xv * Gp);
      } else {
        double Cv;
        if (attempt == 0)
          eval_single(s, Cv, Cp);
        else
          eval_pieced(w, gamma, s, Cv, Cp);
        y2 = 1.0 - Cv * std::pow(xv, 1 - n);
      }
      ok = y2 > 0.0 && y2 <= 1.0 && Cp > 0.0;
      bx[i] = xv;
      by[i] = std::sqrt(std::max(y2, 0.0));
      bm[i] = Cp * std::pow(xv, 1 - n) / (double(n - 1) * by[i]);
    }
    built = ok;
  }
  if (!built)
    throw ConvergenceError("glue_profiles: no PSC-positive bridge found");

  PlanarProfile out;
  out.n = n;
  out.x = p1.x;
  out.y = p1.y;
  out.x.insert(out.x.end(), bx.begin(), bx.end());
  out.y.insert(out.y.end(), by.begin(), by.end());
  out.x.insert(out.x.end(), p2.x.begin(), p2.x.end());
  out.y.insert(out.y.end(), p2.y.begin(), p2.y.end());
  // Margins assembled piecewise: each sample keeps the consistent-stencil
  // value of its own segment (cross-junction stencils on the nonuniform
  // merged grid would inject spurious noise).
  PlanarProfile t1 = p1, t2 = p2;
  if (t1.margin.size() != t1.x.size()) t1.recompute_margin();
  if (t2.margin.size() != t2.x.size()) t2.recompute_margin();
  out.margin = t1.margin;
  out.margin.insert(out.margin.end(), bm.begin(), bm.end());
  out.margin.insert(out.margin.end(), t2.margin.begin(), t2.margin.end());
  return out;
}

PlanarProfile bend_and_glue(double m1, double m2, double rho1, double rho2,
                            int n, double x_out, int points_per_segment) {
  if (!(m1 < m2)) throw ValidationError("bend_and_glue: m1 < m2 required");
  if (!(rho1 < rho2)) throw ValidationError("bend_and_glue: rho1 < rho2 required");
  SchwarzschildOrbit o1{2.0 * m1, n}, o2{2.0 * m2, n};
  if (!(rho1 > o1.horizon_radius()))
    throw ValidationError("bend_and_glue: rho1 inside the mass-m1 horizon");
  if (!(rho2 > o2.horizon_radius()))
    throw ValidationError("bend_and_glue: rho2 inside the mass-m2 horizon");
  if (x_out <= rho2) x_out = 2.0 * rho2;

  const double kappa = 9.0;
  const int np = points_per_segment;

  auto make_bend = [&](const SchwarzschildOrbit& o, double a, double b,
                       bool forward) {
    // Slope = orbit slope damped by exp(-kappa tau^2), integrated from the
    // orbit-anchored end; C^2 contact with the orbit there.
    std::vector<double> xs = interp::linspace(a, b, np), ys(np), sl(np);
    double w = b - a;
    for (int i = 0; i < np; ++i) {
      double tau = forward ? (xs[i] - a) / w : (b - xs[i]) / w;
      sl[i] = o.slope(xs[i]) * std::exp(-kappa * tau * tau);
    }
    double h = xs[1] - xs[0];
    auto I = interp::cumtrapz(sl, h);
    if (forward) {
      double y0 = o.y(a);
      for (int i = 0; i < np; ++i) ys[i] = y0 + I[i];
    } else {
      double yb = o.y(b);
      for (int i = 0; i < np; ++i) ys[i] = yb - (I[np - 1] - I[i]);
    }
    PlanarProfile p;
    p.n = n;
    p.x = std::move(xs);
    p.y = std::move(ys);
    p.recompute_margin();
    // C^2 contact with the orbit at the anchored end: margin exactly zero
    // there (the one-sided stencil would report O(h^2) noise around it).
    (forward ? p.margin.front() : p.margin.back()) = 0.0;
    return p;
  };

  double w = (rho2 - rho1) / 8.0;
  for (int attempt = 0; attempt < 40; ++attempt, w *= 0.5) {
    PlanarProfile bend1 = make_bend(o1, rho1, rho1 + w, true);
    PlanarProfile bend2 = make_bend(o2, rho2 - w, rho2, false);
    bool bends_ok = true;
    for (std::size_t i = 1; i + 1 < bend1.margin.size() && bends_ok; ++i)
      bends_ok = bend1.margin[i] > 0.0;
    for (std::size_t i = 1; i + 1 < bend2.margin.size() && bends_ok; ++i)
      bends_ok = bend2.margin[i] > 0.0;
    if (!bends_ok || !gluing_feasible(bend1, bend2)) continue;

    PlanarProfile mid;
    try {
      mid = glue_profiles(bend1, bend2);
    } catch (const ConvergenceError&) {
      continue;
    }

    PlanarProfile out;
    out.n = n;
    auto inner = o1.band(o1.horizon_radius(), rho1, np);
    out.x = inner.x;
    out.y = inner.y;
    out.margin = inner.margin;
    for (std::size_t i = 1; i < mid.x.size(); ++i) {
      out.x.push_back(mid.x[i]);
      out.y.push_back(mid.y[i]);
      out.margin.push_back(mid.margin[i]);
    }
    auto outer = o2.band(rho2, x_out, np);
    for (std::size_t i = 1; i < outer.x.size(); ++i) {
      out.x.push_back(outer.x[i]);
      out.y.push_back(outer.y[i]);
      out.margin.push_back(outer.margin[i]);
    }
    return out;
  }
  throw ConvergenceError(
      "bend_and_glue: hypothesis fails after maximal admissible bend");
}

double TorpedoCap::eval(double rv) const {
  return beta + 2.0 * std::sqrt(alpha) *
                    (std::sqrt(r1 - alpha) - std::sqrt(rv - alpha));
}

double TorpedoCap::eval_d1(double rv) const {
  return -std::sqrt(alpha) / std::sqrt(rv - alpha);
}

TorpedoCap torpedo_cap(double alpha, double beta, double r1, int points) {
  if (!(alpha > 0.0)) throw ValidationError("torpedo_cap: alpha > 0 required");
  if (!(r1 > alpha)) throw ValidationError("torpedo_cap: r1 > alpha required");
  TorpedoCap cap;
  cap.alpha = alpha;
  cap.beta = beta;
  cap.r1 = r1;
  // Uniform in s = sqrt(r - alpha): resolves the vertical tangent.
  double smax = std::sqrt(r1 - alpha);
  cap.r.resize(points);
  cap.u.resize(points);
  for (int i = 0; i < points; ++i) {
    double s = smax * double(i + 1) / double(points);
    cap.r[i] = alpha + s * s;
    cap.u[i] = beta + 2.0 * std::sqrt(alpha) * (smax - s);
  }
  cap.r.back() = r1;
  cap.u.back() = beta;
  return cap;
}

double adm_mass(const PlanarProfile& p, const Tolerances& tol,
                double tail_frac) {
  p.validate();
  double xcut = p.x_back() - tail_frac * (p.x_back() - p.x_front());
  std::vector<double> Cs;
  for (std::size_t i = 0; i < p.x.size(); ++i)
    if (p.x[i] >= xcut) Cs.push_back(orbit_constant(p.x[i], p.y[i], p.n));
  if (Cs.size() < 4)
    throw ValidationError("adm_mass: terminal segment too short");
  double cmin = Cs[0], cmax = Cs[0], csum = 0.0;
  for (double c : Cs) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    csum += c;
  }
  double cbar = csum / double(Cs.size());
  if (cmax - cmin > tol.orbit_drift * std::max(1.0, std::abs(cbar)))
    throw ValidationError("adm_mass: terminal segment not Schwarzschild");
  return 0.5 * cbar;
}

double penrose_bound(double volume, int n) {
  if (volume < 0.0) throw ValidationError("penrose_bound: volume >= 0 required");
  if (n < 2) throw ValidationError("penrose_bound: n >= 2 required");
  return 0.5 * std::pow(volume / unit_sphere_volume(n),
                        double(n - 1) / double(n));
}

geom::WarpedMetric to_tube_profile(const PlanarProfile& p, int points) {
  p.validate();
  for (double v : p.y)
    if (!(v > 1e-14))
      throw ValidationError("to_tube_profile: requires y > 0 throughout");
  // Quadrature of dt = dx / y via Simpson on each interval (midpoint y by
  // the local orbit constant, which is exact on Schwarzschild bands).
  const std::size_t np = p.x.size();
  std::vector<double> t(np, 0.0);
  for (std::size_t i = 1; i < np; ++i) {
    double xm = 0.5 * (p.x[i - 1] + p.x[i]);
    double Cm = 0.5 * (orbit_constant(p.x[i - 1], p.y[i - 1], p.n) +
                       orbit_constant(p.x[i], p.y[i], p.n));
    double ym = std::sqrt(std::max(1e-30, 1.0 - Cm * std::pow(xm, 1 - p.n)));
    t[i] = t[i - 1] + (p.x[i] - p.x[i - 1]) *
                          (1.0 / p.y[i - 1] + 4.0 / ym + 1.0 / p.y[i]) / 6.0;
  }
  // f(t) by cubic Hermite with the exact nodal slopes df/dt = y.
  geom::WarpedMetric m;
  m.kind = geom::MetricKind::tube;
  m.n = p.n;
  m.grid = {0.0, t.back(), points};
  m.profile.resize(points);
  std::size_t j = 0;
  for (int i = 0; i < points; ++i) {
    double tv = m.grid.x(i);
    while (j + 2 < np && t[j + 1] < tv) ++j;
    double ht = t[j + 1] - t[j];
    double s = std::clamp((tv - t[j]) / ht, 0.0, 1.0);
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    m.profile[i] = h00 * p.x[j] + h10 * ht * p.y[j] + h01 * p.x[j + 1] +
                   h11 * ht * p.y[j + 1];
  }
  return m;
}

} // namespace hf::schw
