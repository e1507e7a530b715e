#include <cmath>
#include <vector>

#include "doctest.h"
#include "horizonforge/base.hpp"
#include "horizonforge/flow.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/spectral.hpp"

using namespace hf;

namespace {

geom::WarpedMetric perturbed_round(double amp, int pts) {
  geom::WarpedMetric m;
  m.kind = geom::MetricKind::closed_sphere;
  m.n = 3;
  m.pole_closure = true;
  m.grid = {0.0, kPi, pts};
  m.profile.resize(pts);
  for (int i = 0; i < pts; ++i) {
    double r = m.grid.x(i);
    double s = std::sin(r);
    m.profile[i] = s * (1.0 + amp * s * s);
  }
  m.profile.front() = m.profile.back() = 0.0;
  return m;
}

} // namespace

TEST_CASE("round S^3 shrinks as r^2 = r0^2 - 4t") {
  auto initial = geom::round_sphere(3, 1.0, 769);
  flow::FlowOptions opts;
  opts.monitor_every = 900;
  opts.cfl = 0.3;
  opts.k = 0.25;
  double T = (1.0 - 0.1) / 4.0; // down to r^2 = 0.1
  auto traj = flow::evolve(initial, 1e-4, T, opts);
  CHECK_FALSE(traj.blew_up);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    double r = std::sqrt(1.0 - 4.0 * traj.times[j]);
    const auto& st = traj.states[j];
    CHECK(std::abs(st.grid.b - kPi * r) < 1e-6);
    double worst = 0.0;
    for (int i = 0; i < st.grid.points; ++i) {
      double exact = r * std::sin(st.grid.x(i) / r);
      worst = std::max(worst, std::abs(st.profile[i] - exact));
    }
    CHECK(worst <= 1e-6);
    // closed-form lambda1 = 6k / r^2 along the round trajectory
    CHECK(traj.lambda1_series[j] ==
          doctest::Approx(6.0 * traj.k / (r * r)).epsilon(1e-5));
  }
  auto rep = flow::monotonicity_report(traj);
  CHECK(rep.strictly_positive);
}

TEST_CASE("volume identity -dV/dt = int R dmu") {
  auto initial = perturbed_round(0.05, 385);
  flow::FlowOptions opts;
  opts.monitor_every = 150;
  auto traj = flow::evolve(initial, 1e-4, 0.04, opts);
  CHECK_FALSE(traj.blew_up);
  REQUIRE(traj.times.size() >= 4);
  for (std::size_t j = 1; j + 1 < traj.times.size(); ++j) {
    double hl = traj.times[j] - traj.times[j - 1];
    double hr = traj.times[j + 1] - traj.times[j];
    double dV = (-hr / (hl * (hl + hr))) * traj.volume_series[j - 1] +
                ((hr - hl) / (hl * hr)) * traj.volume_series[j] +
                (hl / (hr * (hl + hr))) * traj.volume_series[j + 1];
    const auto& st = traj.states[j];
    auto R = geom::warped_closed_scalar(st, 4);
    std::vector<double> w(st.grid.points);
    for (int i = 0; i < st.grid.points; ++i)
      w[i] = R[i] * st.profile[i] * st.profile[i];
    double intR = 4.0 * kPi * trapezoid(w, st.grid.h());
    CHECK(-dV == doctest::Approx(intR).epsilon(1e-5));
  }
}

TEST_CASE("lambda1 monotone along the flow for perturbed data") {
  for (double amp : {0.04, -0.05}) {
    auto initial = perturbed_round(amp, 321);
    for (double k : {0.25, 0.5, 1.0}) {
      flow::FlowOptions opts;
      opts.monitor_every = 120;
      opts.k = k;
      auto traj = flow::evolve(initial, 1e-4, 0.03, opts);
      CHECK_FALSE(traj.blew_up);
      auto rep = flow::monotonicity_report(traj);
      CHECK(rep.strictly_positive);
      for (double d : rep.dlambda1_dt) CHECK(d > 0.0);
    }
  }
}

TEST_CASE("round sup-error shrinks under step halving") {
  auto initial = geom::round_sphere(3, 1.0, 385);
  auto err_at = [&](double cfl) {
    flow::FlowOptions opts;
    opts.monitor_every = 1000000;
    opts.cfl = cfl;
    auto traj = flow::evolve(initial, 1.0, 0.1, opts);
    double r = std::sqrt(1.0 - 4.0 * traj.times.back());
    double worst = 0.0;
    const auto& st = traj.states.back();
    for (int i = 0; i < st.grid.points; i += 5)
      worst = std::max(worst,
                       std::abs(st.profile[i] - r * std::sin(st.grid.x(i) / r)));
    return worst;
  };
  double e1 = err_at(0.2), e2 = err_at(0.1);
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 1.7); // second-order target; mixed orders near the floor
}

TEST_CASE("k below 1/4 requires the exploration override") {
  auto initial = perturbed_round(0.03, 257);
  flow::FlowOptions opts;
  opts.monitor_every = 100;
  opts.k = 0.1;
  auto traj = flow::evolve(initial, 1e-4, 0.01, opts);
  CHECK_THROWS_AS(flow::monotonicity_report(traj), ValidationError);
  auto rep = flow::monotonicity_report(traj, true);
  CHECK(rep.times.size() >= 1);
}

TEST_CASE("curvature blow-up stops cleanly with a flag") {
  auto initial = perturbed_round(0.05, 257);
  flow::FlowOptions opts;
  opts.curvature_stop = 12.0; // round S^3 has R = 6; shrinking exceeds this
  opts.monitor_every = 50;
  auto traj = flow::evolve(initial, 1e-4, 0.24, opts);
  CHECK(traj.blew_up);
  CHECK(traj.times.back() < 0.24);
  traj.validate();
}
