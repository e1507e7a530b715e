#include "horizonforge/flow.hpp"

#include <algorithm>
#include <cmath>

#include "horizonforge/interp.hpp"
#include "horizonforge/kernels.hpp"
#include "horizonforge/spectral.hpp"

namespace hf::flow {

namespace {

// Closure-pinned gauge: phi(s) = B(s) u(s) with B = sin(pi s / L) and
// u(0) = u(L) = L/pi enforced, so the pole-closure phi'(pole) = 1 is not a
// floating degree of freedom (a bare phi-state lets closure drift modes
// self-amplify through the (phi_s^2 - 1)/phi pole term). Each step evolves
// u on a uniform arclength grid and re-derives the arclength.
struct ArcState {
  double L = kPi;
  std::vector<double> u; // phi = B u
};

struct Derivs {
  std::vector<double> dphi;
  std::vector<double> dlogq;
  std::vector<double> R;
  std::vector<double> phi;
};

void rhs(const ArcState& st, Derivs& out) {
  const int n = int(st.u.size());
  const double L = st.L;
  const double h = L / double(n - 1);
  const double w = kPi / L;
  auto ux = geom::profile_d1(st.u, h, +1, 4);
  auto uxx = geom::profile_d2(st.u, h, +1, 4);

  out.dphi.resize(n);
  out.dlogq.resize(n);
  out.R.resize(n);
  out.phi.resize(n);
  for (int i = 0; i < n; ++i) {
    double sarc = h * double(i);
    double B = std::sin(w * sarc);
    double Bx = w * std::cos(w * sarc);
    double Bxx = -w * w * B;
    double phi = B * st.u[i];
    double phix = Bx * st.u[i] + B * ux[i];
    double phixx = Bxx * st.u[i] + 2.0 * Bx * ux[i] + B * uxx[i];
    out.phi[i] = phi;
    bool pole = i == 0 || i + 1 == n;
    if (pole) {
      double ratio = -w * w + 3.0 * uxx[i] / st.u[i];
      out.dphi[i] = 0.0;
      out.dlogq[i] = 2.0 * ratio;
      out.R[i] = -6.0 * ratio;
    } else {
      double delta = phix - 1.0; // exact at poles by the u boundary pinning
      double T = delta * (delta + 2.0) / phi;
      double ratio = phixx / phi;
      out.dphi[i] = phixx + T;
      out.dlogq[i] = 2.0 * ratio;
      out.R[i] = -2.0 * T / phi - 4.0 * ratio;
    }
  }
}

// Second-stage right side on the unresampled Euler midstate (phi, q): the
// one-shot evaluation needs no closure pinning, but must see the q-part of
// the midstate metric for the step to stay second order in time.
void rhs_q(const std::vector<double>& phi, const std::vector<double>& q,
           double h, Derivs& out) {
  const int n = int(phi.size());
  auto phix = geom::profile_d1(phi, h, -1, 4);
  std::vector<double> phis(n), phiss(n);
  kern::div(phix, q, phis);
  auto phisx = geom::profile_d1(phis, h, +1, 4);
  kern::div(phisx, q, phiss);
  out.dphi.resize(n);
  out.dlogq.resize(n);
  out.R.resize(n);
  out.phi = phi;
  for (int i = 1; i + 1 < n; ++i) {
    double delta = phis[i] - 1.0;
    double T = delta * (delta + 2.0) / phi[i];
    double ratio = phiss[i] / phi[i];
    out.dphi[i] = phiss[i] + T;
    out.dlogq[i] = 2.0 * ratio;
    out.R[i] = -2.0 * T / phi[i] - 4.0 * ratio;
  }
  double r0 = phiss[1] / phi[1], r1 = phiss[n - 2] / phi[n - 2];
  out.dphi[0] = out.dphi[n - 1] = 0.0;
  out.dlogq[0] = 2.0 * r0;
  out.dlogq[n - 1] = 2.0 * r1;
  out.R[0] = -6.0 * r0;
  out.R[n - 1] = -6.0 * r1;
}

geom::WarpedMetric state_metric(const ArcState& st) {
  const int n = int(st.u.size());
  geom::WarpedMetric m;
  m.kind = geom::MetricKind::closed_sphere;
  m.n = 3;
  m.pole_closure = true;
  m.grid = {0.0, st.L, n};
  m.profile.resize(n);
  const double h = st.L / double(n - 1);
  for (int i = 0; i < n; ++i)
    m.profile[i] = std::sin(kPi * h * double(i) / st.L) * st.u[i];
  m.profile.front() = m.profile.back() = 0.0;
  return m;
}

} // namespace

void FlowTrajectory::validate() const {
  if (times.size() < 2 || times.size() != states.size() ||
      times.size() != lambda1_series.size() || times.size() != volume_series.size())
    throw ValidationError("FlowTrajectory: inconsistent series lengths");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw ValidationError("FlowTrajectory: times must increase strictly");
}

FlowTrajectory evolve(const geom::WarpedMetric& initial, double dt_max,
                      double T, const FlowOptions& opts, const Tolerances& tol) {
  if (initial.kind != geom::MetricKind::closed_sphere || initial.n != 3 ||
      !initial.pole_closure)
    throw ValidationError("flow::evolve: closed warped S^3 required");
  initial.validate(tol);

  const int n = initial.grid.points;
  ArcState st;
  st.L = initial.grid.b - initial.grid.a;
  st.u.resize(n);
  for (int i = 1; i + 1 < n; ++i) {
    double B = std::sin(kPi * double(i) / double(n - 1));
    st.u[i] = initial.profile[i] / B;
  }
  st.u[0] = st.u[n - 1] = st.L / kPi;

  FlowTrajectory traj;
  traj.k = opts.k;
  auto record = [&](double time) {
    auto m = state_metric(st);
    traj.times.push_back(time);
    traj.volume_series.push_back(m.volume());
    traj.lambda1_series.push_back(spectral::lambda1(m, opts.k, tol).lambda1);
    traj.states.push_back(std::move(m));
  };

  record(0.0);
  double t = 0.0;
  int accepted = 0;
  Derivs k1, k2;
  std::vector<double> qnew(n), pnew(n);
  while (t < T) {
    double h = st.L / double(n - 1);
    rhs(st, k1);
    double maxR =
        std::max(std::abs(kern::vmax(k1.R)), std::abs(kern::vmin(k1.R)));
    if (maxR > opts.curvature_stop) {
      traj.blew_up = true;
      break;
    }
    double dt = std::min({dt_max, T - t, opts.cfl * h * h});
    if (dt < 1e-14) {
      traj.blew_up = true;
      break;
    }
    // Heun step in (phi, log q), then reparametrize back to unit speed.
    bool ok = true;
    std::vector<double> pm(n), qm(n);
    for (int i = 0; i < n; ++i) {
      bool pole = i == 0 || i + 1 == n;
      pm[i] = pole ? 0.0 : k1.phi[i] + dt * k1.dphi[i];
      qm[i] = std::exp(dt * k1.dlogq[i]);
      if (!pole && !(pm[i] > 0.0 && std::isfinite(pm[i]))) ok = false;
    }
    if (!ok) {
      traj.blew_up = true;
      break;
    }
    rhs_q(pm, qm, h, k2);
    for (int i = 0; i < n && ok; ++i) {
      bool pole = i == 0 || i + 1 == n;
      pnew[i] = pole ? 0.0 : k1.phi[i] + 0.5 * dt * (k1.dphi[i] + k2.dphi[i]);
      qnew[i] = std::exp(0.5 * dt * (k1.dlogq[i] + k2.dlogq[i]));
      if (!pole) ok = pnew[i] > 0.0 && std::isfinite(pnew[i]);
    }
    if (!ok) {
      traj.blew_up = true;
      break;
    }
    // Re-derived arclength; resampling spline on the odd extension keeps
    // its natural boundary layer outside the physical domain.
    auto arc = interp::cumtrapz(qnew, h);
    double Lnew = arc.back();
    {
      const int g = 6;
      std::vector<double> xs, ys;
      xs.reserve(n + 2 * g);
      ys.reserve(n + 2 * g);
      for (int i = g; i >= 1; --i) {
        xs.push_back(-arc[i]);
        ys.push_back(-pnew[i]);
      }
      for (int i = 0; i < n; ++i) {
        xs.push_back(arc[i]);
        ys.push_back(pnew[i]);
      }
      for (int i = 1; i <= g; ++i) {
        xs.push_back(2.0 * Lnew - arc[n - 1 - i]);
        ys.push_back(-pnew[n - 1 - i]);
      }
      interp::Spline prof(xs, ys);
      double hnew = Lnew / double(n - 1);
      for (int i = 1; i + 1 < n; ++i) {
        double B = std::sin(kPi * double(i) / double(n - 1));
        st.u[i] = std::max(1e-300, prof(i * hnew)) / B;
      }
      st.u[0] = st.u[n - 1] = Lnew / kPi;
    }
    st.L = Lnew;
    t += dt;
    ++accepted;
    if (accepted % opts.monitor_every == 0 || t >= T) record(t);
  }
  if (traj.times.back() < t) record(t);
  return traj;
}

MonotonicityReport monotonicity_report(const FlowTrajectory& traj,
                                       bool allow_low_k) {
  traj.validate();
  if (traj.k < 0.25 - 1e-12 && !allow_low_k)
    throw ValidationError(
        "monotonicity_report: k >= 1/4 required (set allow_low_k to explore)");
  if (traj.times.size() < 3)
    throw ValidationError("monotonicity_report: trajectory too short");
  MonotonicityReport rep;
  rep.strictly_positive = true;
  for (std::size_t i = 1; i + 1 < traj.times.size(); ++i) {
    double hl = traj.times[i] - traj.times[i - 1];
    double hr = traj.times[i + 1] - traj.times[i];
    double d = (-hr / (hl * (hl + hr))) * traj.lambda1_series[i - 1] +
               ((hr - hl) / (hl * hr)) * traj.lambda1_series[i] +
               (hl / (hr * (hl + hr))) * traj.lambda1_series[i + 1];
    rep.times.push_back(traj.times[i]);
    rep.dlambda1_dt.push_back(d);
    if (!(d > 0.0)) rep.strictly_positive = false;
  }
  return rep;
}

} // namespace hf::flow
