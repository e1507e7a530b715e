#include "horizonforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "horizonforge/kernels.hpp"

namespace hf::spectral {

namespace {

// Symmetric-definite pencil (K + diag(V) M) u = lambda M u on the node grid,
// reduced to a standard symmetric tridiagonal via the diagonal mass.
struct Pencil {
  std::vector<double> diag; // of B = M^{-1/2} A M^{-1/2}
  std::vector<double> off;
  std::vector<double> mass; // diagonal of M
  double sigma_factor = 1.0; // sphere-volume factor completing the measure

  int size() const { return int(diag.size()); }
};

// Flux coefficients mirror geom::radial_laplacian, with the pole rows'
// pointwise-consistent lumped mass.
Pencil assemble(const std::vector<double>& q, const std::vector<double>& p,
                int m, double h, bool closed, const std::vector<double>& V) {
  const int n = int(p.size());
  std::vector<double> c(n), w(n);
  for (int i = 0; i < n; ++i) {
    double pm = std::pow(std::abs(p[i]), m - 1);
    c[i] = pm / q[i];
    w[i] = pm * q[i];
  }
  std::vector<double> cm(n - 1), wm(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    cm[i] = 0.5 * (c[i] + c[i + 1]);
    wm[i] = 0.5 * (w[i] + w[i + 1]);
  }
  Pencil P;
  P.mass.resize(n);
  for (int i = 1; i + 1 < n; ++i) P.mass[i] = h * 0.5 * (wm[i - 1] + wm[i]);
  if (closed) {
    P.mass[0] = cm[0] * q[0] * q[0] * h / (2.0 * m);
    P.mass[n - 1] = cm[n - 2] * q[n - 1] * q[n - 1] * h / (2.0 * m);
  } else {
    P.mass[0] = h * 0.5 * wm[0];
    P.mass[n - 1] = h * 0.5 * wm[n - 2];
  }
  std::vector<double> kd(n);
  kd[0] = cm[0] / h;
  kd[n - 1] = cm[n - 2] / h;
  for (int i = 1; i + 1 < n; ++i) kd[i] = (cm[i - 1] + cm[i]) / h;
  P.diag.resize(n);
  P.off.resize(n - 1);
  for (int i = 0; i < n; ++i) P.diag[i] = kd[i] / P.mass[i] + V[i];
  for (int i = 0; i + 1 < n; ++i)
    P.off[i] = -cm[i] / h / std::sqrt(P.mass[i] * P.mass[i + 1]);
  P.sigma_factor = unit_sphere_volume(m - 1);
  return P;
}

// Negative-pivot count of B - sigma I (Sturm sequence).
int sturm_count(const Pencil& P, double sigma) {
  const int n = P.size();
  int count = 0;
  double d = P.diag[0] - sigma;
  const double tiny = 1e-300;
  if (d == 0.0) d = tiny;
  if (d < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    d = (P.diag[i] - sigma) - P.off[i - 1] * P.off[i - 1] / d;
    if (d == 0.0) d = tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

double smallest_eigenvalue(const Pencil& P, double lo, double hi) {
  double span = std::max(1.0, hi - lo);
  while (sturm_count(P, lo) > 0) lo -= span;
  while (sturm_count(P, hi) < 1) hi += span;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (sturm_count(P, mid) >= 1 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Tridiagonal solve with partial pivoting (one extra superdiagonal of
// fill-in).
void tridiag_solve(std::vector<double> a, std::vector<double> b,
                   std::vector<double> c, std::vector<double>& x) {
  const int n = int(b.size());
  std::vector<double> d(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(a[i]) > std::abs(b[i])) {
      std::swap(b[i], a[i]);
      std::swap(c[i], b[i + 1]);
      if (i + 2 < n) std::swap(d[i], c[i + 1]);
      std::swap(x[i], x[i + 1]);
    }
    if (b[i] == 0.0) b[i] = 1e-300;
    double l = a[i] / b[i];
    b[i + 1] -= l * c[i];
    if (i + 2 < n) c[i + 1] -= l * d[i];
    x[i + 1] -= l * x[i];
  }
  if (b[n - 1] == 0.0) b[n - 1] = 1e-300;
  x[n - 1] /= b[n - 1];
  if (n >= 2) x[n - 2] = (x[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
  for (int i = n - 3; i >= 0; --i)
    x[i] = (x[i] - c[i] * x[i + 1] - d[i] * x[i + 2]) / b[i];
}

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> v; // eigenvector of B, unit 2-norm
  double residual = 0.0;
};

EigenPair solve_smallest(const Pencil& P, const Tolerances& tol) {
  const int n = P.size();
  double lo = kern::vmin(P.diag) - 1.0;
  double hi = kern::vmax(P.diag) + 1.0;
  double lam = smallest_eigenvalue(P, lo, hi);

  double scale =
      std::max({std::abs(lam), kern::vmax(P.diag) - kern::vmin(P.diag), 1.0});
  double shift = lam - 1e-10 * scale;
  std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
  EigenPair out;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<double> b(n), x = v;
    for (int i = 0; i < n; ++i) b[i] = P.diag[i] - shift;
    std::vector<double> a(P.off.begin(), P.off.end());
    std::vector<double> c = a;
    tridiag_solve(a, b, c, x);
    double nrm = std::sqrt(kern::dot(x, x));
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw ConvergenceError("eigensolver: inverse iteration breakdown");
    for (auto& xv : x) xv /= nrm;
    std::vector<double> Bx(n);
    for (int i = 0; i < n; ++i) {
      double s = P.diag[i] * x[i];
      if (i > 0) s += P.off[i - 1] * x[i - 1];
      if (i + 1 < n) s += P.off[i] * x[i + 1];
      Bx[i] = s;
    }
    double rq = kern::dot(x, Bx);
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = Bx[i] - rq * x[i];
      res += r * r;
    }
    res = std::sqrt(res);
    v = x;
    out.lambda = rq;
    out.residual = res / scale; // relative to the operator scale
    // Drive to the rounding floor; stop once the residual stagnates.
    if (out.residual <= 1e-15 || res >= 0.5 * prev_res) break;
    prev_res = res;
  }
  if (out.residual > tol.eigen_residual)
    throw ConvergenceError("eigensolver: residual stagnated above tolerance");
  double s = kern::sum(v);
  if (s < 0.0)
    for (auto& x : v) x = -x;
  out.v = std::move(v);
  return out;
}

struct SliceData {
  std::vector<double> q, p, R;
  int m = 2;
  double h = 0.0;
  bool closed = true;
};

SliceData slice_data(const geom::WarpedMetric& wm) {
  SliceData s;
  s.h = wm.grid.h();
  s.q.assign(wm.grid.points, 1.0);
  s.p = wm.profile;
  if (wm.kind == geom::MetricKind::closed_sphere) {
    s.m = wm.n;
    s.closed = true;
    s.R = geom::warped_closed_scalar(wm, 4);
  } else {
    s.m = wm.n + 1;
    s.closed = false;
    geom::RadialFamily fam;
    fam.m = s.m;
    fam.x = wm.grid;
    fam.t = {0.0, 1.0};
    fam.q = {s.q, s.q};
    fam.p = {s.p, s.p};
    fam.closed = false;
    s.R = geom::family_slice_scalar(fam, 0, 4);
  }
  return s;
}

SpectralResult solve_on(const SliceData& s, double k, const Tolerances& tol) {
  if (!(k > 0.0)) throw ValidationError("lambda1: k > 0 required");
  std::vector<double> V(s.R.size());
  kern::scale(s.R, k, V);
  Pencil P = assemble(s.q, s.p, s.m, s.h, s.closed, V);
  EigenPair e = solve_smallest(P, tol);

  SpectralResult out;
  out.k = k;
  out.lambda1 = e.lambda;
  out.residual = e.residual;
  out.eigenfunction.resize(P.size());
  double mass_dot = 0.0;
  for (int i = 0; i < P.size(); ++i) {
    out.eigenfunction[i] = e.v[i] / std::sqrt(P.mass[i]);
    mass_dot += out.eigenfunction[i] * out.eigenfunction[i] * P.mass[i];
  }
  double nrm = std::sqrt(mass_dot * P.sigma_factor);
  for (auto& u : out.eigenfunction) u /= nrm;
  double floor = -1e-10 * std::abs(out.eigenfunction[P.size() / 2]);
  for (auto& u : out.eigenfunction)
    if (u < floor)
      throw ConvergenceError("eigensolver: principal eigenfunction not positive");
  return out;
}

} // namespace

SpectralResult lambda1(const geom::WarpedMetric& m, double k,
                       const Tolerances& tol) {
  m.validate(tol);
  return solve_on(slice_data(m), k, tol);
}

SpectralResult lambda1_slice(const geom::RadialFamily& fam, int it, double k,
                             const Tolerances& tol) {
  if (fam.round) {
    double R = double(fam.m) * double(fam.m - 1) / (fam.r[it] * fam.r[it]);
    SpectralResult out;
    out.k = k;
    out.lambda1 = k * R;
    out.residual = 0.0;
    double vol = unit_sphere_volume(fam.m) * std::pow(fam.r[it], fam.m);
    out.eigenfunction.assign(1, 1.0 / std::sqrt(vol));
    return out;
  }
  SliceData s;
  s.m = fam.m;
  s.closed = fam.closed;
  s.q = fam.q[it];
  s.p = fam.p[it];
  s.R = geom::family_slice_scalar(fam, it, 4);
  s.h = fam.x.h();
  return solve_on(s, k, tol);
}

MembershipVerdict membership(const geom::WarpedMetric& m, double k,
                             const Tolerances& tol) {
  auto r = lambda1(m, k, tol);
  MembershipVerdict v;
  v.lambda1 = r.lambda1;
  v.in_strict = r.lambda1 > tol.membership;
  v.in_weak = r.lambda1 >= -tol.membership;
  return v;
}

DirichletBounds dirichlet_lambda1_bounds(const geom::WarpedMetric& m, double k,
                                         int sub_lo, int sub_hi,
                                         const std::vector<double>& cutoff,
                                         const Tolerances& tol) {
  m.validate(tol);
  const int n = m.grid.points;
  if (sub_lo < 0 || sub_hi >= n || sub_hi - sub_lo < 4)
    throw ValidationError("dirichlet bounds: empty or out-of-range subinterval");
  if (int(cutoff.size()) != n)
    throw ValidationError("dirichlet bounds: cutoff length mismatch");
  for (int i = 0; i <= sub_lo; ++i)
    if (cutoff[i] != 0.0)
      throw ValidationError("dirichlet bounds: cutoff support violates subinterval");
  for (int i = sub_hi; i < n; ++i)
    if (cutoff[i] != 0.0)
      throw ValidationError("dirichlet bounds: cutoff support violates subinterval");

  SliceData s = slice_data(m);
  std::vector<double> V(s.R.size());
  kern::scale(s.R, k, V);
  Pencil P = assemble(s.q, s.p, s.m, s.h, s.closed, V);
  EigenPair full = solve_smallest(P, tol);

  Pencil D;
  D.diag.assign(P.diag.begin() + sub_lo + 1, P.diag.begin() + sub_hi);
  D.off.assign(P.off.begin() + sub_lo + 1, P.off.begin() + sub_hi - 1);
  D.mass.assign(P.mass.begin() + sub_lo + 1, P.mass.begin() + sub_hi);
  D.sigma_factor = P.sigma_factor;
  double dlo = kern::vmin(D.diag) - 1.0, dhi = kern::vmax(D.diag) + 1.0;
  double lamD = smallest_eigenvalue(D, dlo, dhi);

  // Kleiner-Lott style upper bound from the cutoff and the global
  // eigenfunction.
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = full.v[i] / std::sqrt(P.mass[i]);
  auto etax = geom::profile_d1(cutoff, s.h, 0, 2);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    double grad = etax[i] / s.q[i];
    num += grad * grad * psi[i] * psi[i] * P.mass[i];
    den += cutoff[i] * cutoff[i] * psi[i] * psi[i] * P.mass[i];
  }
  if (!(den > 0.0)) throw ValidationError("dirichlet bounds: cutoff vanishes");

  DirichletBounds out;
  out.lambda1 = full.lambda;
  out.dirichlet_lambda1 = lamD;
  out.upper_bound = full.lambda + num / den;
  double slack = 1e-9 * (1.0 + std::abs(out.lambda1));
  if (!(out.lambda1 <= lamD + slack && lamD <= out.upper_bound + slack))
    throw ConvergenceError("dirichlet bounds: sandwich violated");
  return out;
}

ConformalSignCheck conformal_sign_check(const geom::WarpedMetric& m,
                                        const Tolerances& tol) {
  if (m.n < 3) throw ValidationError("conformal_sign_check: n >= 3 required");
  const double k = double(m.n - 2) / (4.0 * double(m.n - 1));
  auto r = lambda1(m, k, tol);

  SliceData s = slice_data(m);
  // Mean-one normalization of the conformal factor, so a constant
  // eigenfunction reproduces the metric (and its curvature) exactly.
  std::vector<double> u = r.eigenfunction;
  {
    std::vector<double> w(u.size()), uw(u.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = std::pow(s.p[i], s.m - 1) * s.q[i];
    kern::mul(u, w, uw);
    double mean = trapezoid(uw, s.h) / trapezoid(w, s.h);
    for (auto& v : u) v /= mean;
  }
  geom::RadialFamily fam;
  fam.m = s.m;
  fam.x = m.grid;
  fam.t = {0.0, 1.0};
  fam.q = {s.q, s.q};
  fam.p = {s.p, s.p};
  fam.closed = s.closed;
  auto lap = geom::radial_laplacian(fam, 0, u);
  auto conf = geom::conformal_transform(s.R, u, lap, m.n, {}, {});

  ConformalSignCheck out;
  out.R_bar = std::move(conf.R_bar);
  out.verdict.lambda1 = r.lambda1;
  out.verdict.in_strict = r.lambda1 > tol.membership;
  out.verdict.in_weak = r.lambda1 >= -tol.membership;
  double minR = kern::vmin(out.R_bar);
  double scale = std::max(1.0, std::abs(r.lambda1));
  if (out.verdict.in_strict && minR <= -1e-4 * scale)
    throw ConvergenceError("conformal_sign_check: min R_bar disagrees with lambda1 > 0");
  if (!out.verdict.in_weak && minR >= 1e-4 * scale)
    throw ConvergenceError("conformal_sign_check: min R_bar disagrees with lambda1 < 0");
  return out;
}

Sandwich eigenvalue_sandwich(const geom::WarpedMetric& m, double k,
                             const Tolerances& tol) {
  auto r = lambda1(m, k, tol);
  SliceData s = slice_data(m);
  std::vector<double> w(s.R.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::pow(s.p[i], s.m - 1) * s.q[i];
  std::vector<double> Rw(s.R.size());
  kern::mul(s.R, w, Rw);
  Sandwich out;
  out.min_R = kern::vmin(s.R);
  out.avg_R = trapezoid(Rw, s.h) / trapezoid(w, s.h);
  out.lambda1_over_k = r.lambda1 / k;
  double slack = 1e-9 * (1.0 + std::abs(out.lambda1_over_k));
  out.holds = out.min_R <= out.lambda1_over_k + slack &&
              out.lambda1_over_k <= out.avg_R + slack;
  return out;
}

} // namespace hf::spectral
