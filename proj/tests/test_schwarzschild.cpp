#include <random>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/schwarzschild.hpp"

using namespace hf;
using schw::PlanarProfile;

namespace {

// RK4 integration of the equality-case phase-plane ODE
//   dy/dx = (n-1)(1 - y^2)/(2 x y).
double rk4_orbit(double x0, double y0, double x1, int n, double step) {
  auto f = [n](double x, double y) {
    return double(n - 1) * (1.0 - y * y) / (2.0 * x * y);
  };
  double x = x0, y = y0;
  while (x < x1) {
    double h = std::min(step, x1 - x);
    double k1 = f(x, y);
    double k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    double k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    double k4 = f(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    x += h;
  }
  return y;
}

} // namespace

TEST_CASE("orbit closed form vs RK4 on x in [1,10], n in {2,3,4}") {
  for (int n : {2, 3, 4}) {
    auto o = schw::orbit(1.0, 0.6, n);
    double y_rk = rk4_orbit(1.0, 0.6, 10.0, n, 1e-4);
    CHECK(std::abs(o.y(10.0) - y_rk) <= 1e-8);
    double mid = rk4_orbit(1.0, 0.6, 3.7, n, 1e-4);
    CHECK(std::abs(o.y(3.7) - mid) <= 1e-8);
  }
}

TEST_CASE("orbit through the horizon point (1, 0, 2)") {
  auto o = schw::orbit(1.0, 0.0, 2);
  CHECK(o.C == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(o.mass() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(o.y(2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  // RK4 started just outside the horizon reproduces the closed form.
  double y_rk = rk4_orbit(1.1, o.y(1.1), 2.0, 2, 1e-4);
  CHECK(std::abs(y_rk - std::sqrt(0.5)) <= 1e-8);
}

TEST_CASE("y0 -> 1 gives the flat orbit") {
  auto o = schw::orbit(3.0, 1.0 - 1e-15, 2);
  CHECK(std::abs(o.C) < 1e-13);
  CHECK(o.y(7.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("horizon identity and Penrose equality") {
  for (int n : {2, 3}) {
    auto o = schw::orbit(2.0, std::sqrt(1.0 - 0.7 * std::pow(2.0, 1 - n)), n);
    double xh = o.horizon_radius();
    CHECK(o.mass() == doctest::Approx(0.5 * std::pow(xh, n - 1)).epsilon(1e-12));
    double horizon_volume = unit_sphere_volume(n) * std::pow(xh, n);
    CHECK(schw::penrose_bound(horizon_volume, n) ==
          doctest::Approx(o.mass()).epsilon(1e-12));
  }
}

TEST_CASE("penrose bound reference values") {
  CHECK(schw::penrose_bound(4.0 * kPi, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(schw::penrose_bound(2.0 * kPi * kPi, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(schw::penrose_bound(0.0, 2) == 0.0);
}

TEST_CASE("orbit exactness: reparametrized band is scalar-flat") {
  auto band = schw::orbit(1.0, 0.0, 2).band(1.05, 2.6, 2048);
  auto tube = schw::to_tube_profile(band, 4096);
  auto g = geom::tube_geometry(tube);
  double worst = 0.0;
  for (double v : g.R) worst = std::max(worst, std::abs(v));
  CHECK(worst <= 1e-6);
}

TEST_CASE("gluing feasibility") {
  auto o1 = schw::orbit(1.0, 0.0, 2); // mass 1/2
  auto band1 = o1.band(1.0 + 1e-9, 2.0, 257);

  SUBCASE("p2 exactly on p1's orbit is infeasible (strictness)") {
    auto band2 = o1.band(2.5, 3.5, 257);
    CHECK_FALSE(schw::gluing_feasible(band1, band2));
    CHECK_THROWS_AS(schw::glue_profiles(band1, band2), ValidationError);
  }
  SUBCASE("heavier outer orbit is feasible") {
    auto heavy = schw::SchwarzschildOrbit{2.4, 2}.band(2.5, 3.5, 257);
    CHECK(schw::gluing_feasible(band1, heavy));
  }
  SUBCASE("horizon-start p2 is feasible when the orbit is above it") {
    auto o2 = schw::SchwarzschildOrbit{2.5, 2};
    auto band2 = o2.band(o2.horizon_radius(), 3.4, 257);
    CHECK(schw::gluing_feasible(band1, band2));
  }
  SUBCASE("overlapping ranges are rejected") {
    auto band2 = o1.band(1.5, 3.0, 257);
    CHECK_THROWS_AS(schw::gluing_feasible(band1, band2), ValidationError);
  }
  SUBCASE("feasibility is monotone in the initial slope") {
    auto p2 = schw::SchwarzschildOrbit{2.4, 2}.band(2.5, 3.5, 257);
    CHECK(schw::gluing_feasible(band1, p2));
    PlanarProfile lower = p2;
    for (auto& v : lower.y) v *= 0.9;
    lower.recompute_margin();
    CHECK(schw::gluing_feasible(band1, lower));
  }
}

TEST_CASE("glue_profiles: bridge keeps strict PSC and input samples") {
  auto band1 = schw::SchwarzschildOrbit{2.0, 2}.band(2.1, 2.6, 257); // mass 1
  auto band2 = schw::SchwarzschildOrbit{2.4, 2}.band(3.1, 4.0, 257); // mass 1.2
  auto merged = schw::glue_profiles(band1, band2);

  // Inputs verbatim (bit-for-bit at the outer endpoints and throughout).
  CHECK(merged.x.front() == band1.x.front());
  CHECK(merged.y.front() == band1.y.front());
  CHECK(merged.x.back() == band2.x.back());
  CHECK(merged.y.back() == band2.y.back());
  for (std::size_t i = 0; i < band1.x.size(); ++i) {
    CHECK(merged.x[i] == band1.x[i]);
    CHECK(merged.y[i] == band1.y[i]);
  }

  // Strict PSC margin across the bridge interior.
  double bridge_min = 1e300;
  for (std::size_t i = 0; i < merged.x.size(); ++i)
    if (merged.x[i] > band1.x.back() + 1e-12 &&
        merged.x[i] < band2.x.front() - 1e-12)
      bridge_min = std::min(bridge_min, merged.margin[i]);
  CHECK(bridge_min > 0.0);

  CHECK(schw::adm_mass(merged) == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("bend_and_glue") {
  SUBCASE("masses 1 and 1.05 with outer region on the C = 2.1 orbit") {
    auto p = schw::bend_and_glue(1.0, 1.05, 2.5, 4.0, 2);
    CHECK(schw::adm_mass(p) == doctest::Approx(1.05).epsilon(1e-9));
    // Outer region lies on the mass-1.05 orbit exactly.
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (p.x[i] >= 4.0) {
        double C = p.x[i] * (1.0 - p.y[i] * p.y[i]);
        CHECK(C == doctest::Approx(2.1).epsilon(1e-12));
      }
    }
    // Inner region on the mass-1 orbit, horizon sample included.
    CHECK(p.x.front() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.y.front() == 0.0);
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (p.x[i] <= 2.5) {
        double C = p.x[i] * (1.0 - p.y[i] * p.y[i]);
        CHECK(C == doctest::Approx(2.0).epsilon(1e-12));
      }
    }
    // Mean-convex and nonnegative PSC margin away from the horizon sample.
    for (std::size_t i = 1; i < p.x.size(); ++i) {
      CHECK(p.y[i] > 0.0);
      CHECK(p.margin[i] > -1e-9);
    }
  }
  SUBCASE("equal masses are rejected") {
    CHECK_THROWS_AS(schw::bend_and_glue(1.0, 1.0, 2.5, 4.0, 2), ValidationError);
  }
  SUBCASE("convergence to the single orbit as m2 - m1 -> 0") {
    double prev = 1e300;
    for (int j = 2; j <= 5; ++j) {
      double dm = std::pow(10.0, -j);
      auto p = schw::bend_and_glue(1.0, 1.0 + dm, 2.5, 4.0, 2);
      schw::SchwarzschildOrbit star{2.0 + dm, 2};
      double dev = 0.0;
      for (std::size_t i = 0; i < p.x.size(); ++i)
        if (p.x[i] >= 2.5 && p.x[i] <= 4.0)
          dev = std::max(dev, std::abs(p.y[i] - star.y(p.x[i])));
      CHECK(dev <= 12.0 * dm); // O(10^-j) in C^0
      CHECK(dev < prev + 1e-15);
      prev = dev;
    }
  }
}

TEST_CASE("torpedo cap") {
  auto cap = schw::torpedo_cap(1.0, 0.0, 2.0);
  CHECK(cap.eval(2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cap.eval(1.5) == doctest::Approx(2.0 * (1.0 - std::sqrt(0.5))).epsilon(1e-12));
  //

  // Vertical tangent at r -> alpha.
  CHECK(cap.eval_d1(1.0 + 1e-12) < -1e5);

  // ODE residual kappa - sin(theta)/(2 rho), with kappa and theta computed
  // by centered finite differences on the s-parametrized curve samples.
  const auto& r = cap.r;
  const auto& u = cap.u;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] < 1.01) continue;
    double hs1 = r[i] - r[i - 1], hs2 = r[i + 1] - r[i];
    // parametric derivatives in the index parameter (uniform in s)
    double rp = (r[i + 1] - r[i - 1]) / 2.0;
    double up = (u[i + 1] - u[i - 1]) / 2.0;
    double rpp = r[i + 1] - 2.0 * r[i] + r[i - 1];
    double upp = u[i + 1] - 2.0 * u[i] + u[i - 1];
    double speed = std::sqrt(rp * rp + up * up);
    double kappa = (rp * upp - up * rpp) / (speed * speed * speed);
    double sin_theta = -up / speed;
    worst = std::max(worst, std::abs(kappa - sin_theta / (2.0 * r[i])));
    (void)hs1;
    (void)hs2;
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("adm mass") {
  SUBCASE("flat terminal has zero mass") {
    PlanarProfile p;
    p.n = 2;
    for (int i = 0; i < 64; ++i) p.x.push_back(1.0 + 0.1 * i);
    p.y.assign(64, 1.0);
    p.recompute_margin();
    CHECK(schw::adm_mass(p) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("orbit band has mass C/2") {
    auto band = schw::orbit(1.0, 0.0, 2).band(1.0, 4.0, 513);
    CHECK(schw::adm_mass(band) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("non-Schwarzschild terminal is rejected") {
    PlanarProfile p;
    p.n = 2;
    for (int i = 0; i < 64; ++i) {
      p.x.push_back(1.0 + 0.1 * i);
      p.y.push_back(0.5 + 0.3 * std::sin(0.4 * i));
    }
    p.recompute_margin();
    CHECK_THROWS_AS(schw::adm_mass(p), ValidationError);
  }
}

TEST_CASE("acceptance-style randomized gluing equivalence") {
  // gluing_feasible (2') must predict glue_profiles success (1') exactly.
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> ux(0.2, 1.5), uy(0.05, 0.95),
      ulen(0.3, 1.2), uratio(0.2, 1.3);
  int feasible_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + (trial % 3);
    auto mk = [&](double x0, double y0) {
      auto o = schw::orbit(x0, y0, n);
      double a = std::max(x0, o.horizon_radius() * 1.01 + 1e-6);
      return o.band(a, a + ulen(rng), 129);
    };
    auto p1 = mk(1.0 + ux(rng), uy(rng));
    // Draw p2's starting slope around p1's orbit continuation, so both
    // feasibility outcomes occur.
    double x2 = p1.x.back() + 0.2 + ux(rng);
    double ycrit = schw::orbit(p1.x.back(), p1.y.back(), n).y(x2);
    double y2 = std::min(0.995, ycrit * uratio(rng));
    auto p2 = mk(x2, y2);
    bool feasible = schw::gluing_feasible(p1, p2);
    bool glued = true;
    try {
      auto g = schw::glue_profiles(p1, p2);
      for (std::size_t i = 0; i < g.x.size(); ++i)
        if (g.x[i] > p1.x.back() + 1e-12 && g.x[i] < p2.x.front() - 1e-12)
          REQUIRE(g.margin[i] > 0.0);
    } catch (const ValidationError&) {
      glued = false;
    }
    CHECK(feasible == glued);
    feasible_count += feasible ? 1 : 0;
  }
  // The draw must exercise both branches.
  CHECK(feasible_count > 10);
  CHECK(feasible_count < 90);
}
