#include <cmath>
#include <vector>

#include "doctest.h"
#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/interp.hpp"

using namespace hf;
using geom::MetricKind;
using geom::WarpedMetric;

namespace {

WarpedMetric make_tube(double a, double b, int pts, int n, auto&& f) {
  WarpedMetric m;
  m.kind = MetricKind::tube;
  m.n = n;
  m.grid = {a, b, pts};
  m.profile.resize(pts);
  for (int i = 0; i < pts; ++i) m.profile[i] = f(m.grid.x(i));
  return m;
}

// Mass-1/2 Schwarzschild (C = 1, n = 2) arclength profile, from the exact
// inverse of t(x) = sqrt(x(x-1)) + log(sqrt(x) + sqrt(x-1)).
double schw_t_of_x(double x) {
  return std::sqrt(x * (x - 1.0)) + std::log(std::sqrt(x) + std::sqrt(x - 1.0));
}
double schw_x_of_t(double t) {
  double lo = 1.0, hi = 4.0;
  while (schw_t_of_x(hi) < t) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (schw_t_of_x(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("tube geometry: unit round cylinder") {
  auto m = make_tube(0.0, 2.0, 512, 2, [](double) { return 1.0; });
  auto g = geom::tube_geometry(m);
  for (int i = 0; i < 512; ++i) {
    CHECK(g.R[i] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(g.H[i]) < 1e-12);
    CHECK(g.sff_norm_sq[i] == doctest::Approx(2.0 * g.sff_coeff[i] * g.sff_coeff[i]).epsilon(1e-12));
  }
  CHECK(g.psc);
}

TEST_CASE("tube geometry: flat cone over round S^3") {
  auto m = make_tube(1.0, 2.0, 512, 3, [](double t) { return t; });
  auto g = geom::tube_geometry(m);
  for (int i = 0; i < 512; ++i) CHECK(std::abs(g.R[i]) < 5e-9);
}

TEST_CASE("tube geometry: scalar flatness of a Schwarzschild band") {
  const int pts = 4096;
  double T = schw_t_of_x(2.5);
  auto m = make_tube(0.0, T, pts, 2, [](double t) { return schw_x_of_t(t); });
  auto g = geom::tube_geometry(m);
  double worst = 0.0;
  for (int i = 0; i < pts; ++i) worst = std::max(worst, std::abs(g.R[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("closed warped scalar: round spheres") {
  auto s2 = geom::round_sphere(2, 1.0, 2048);
  auto R2 = geom::warped_closed_scalar(s2, 4);
  double lo = R2[0], hi = R2[0];
  for (double v : R2) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 1e-6); // pole-regularity invariant
  CHECK(R2[1024] == doctest::Approx(2.0).epsilon(1e-8));

  double r0 = 1.7;
  auto s3 = geom::round_sphere(3, r0, 2048);
  auto R3 = geom::warped_closed_scalar(s3, 4);
  for (int i = 0; i < 2048; i += 97)
    CHECK(R3[i] == doctest::Approx(6.0 / (r0 * r0)).epsilon(1e-5));
}

TEST_CASE("closed warped scalar: dumbbell Richardson check") {
  auto dumbbell = [](int pts) {
    WarpedMetric m;
    m.kind = MetricKind::closed_sphere;
    m.n = 2;
    m.pole_closure = true;
    m.grid = {0.0, kPi, pts};
    m.profile.resize(pts);
    for (int i = 0; i < pts; ++i) {
      double r = m.grid.x(i);
      double s = std::sin(r);
      m.profile[i] = s * (1.0 - 0.3 * s * s);
    }
    m.profile.front() = m.profile.back() = 0.0;
    return m;
  };
  auto coarse = dumbbell(2048);
  auto fine = dumbbell(4095); // shares the midpoint sample
  auto Rc = geom::warped_closed_scalar(coarse, 4);
  auto Rf = geom::warped_closed_scalar(fine, 4);
  CHECK(std::abs(Rc[1024 - 1] - Rf[2047 - 1]) < 1e-6 * (1.0 + std::abs(Rf[2047 - 1])));
}

TEST_CASE("conformal transform identities") {
  std::vector<double> R(64, 6.0), u1(64, 1.0), lap(64, 0.0), dn(64, 0.0), H(64, 0.5);
  auto id = geom::conformal_transform(R, u1, lap, 3, dn, H);
  for (int i = 0; i < 64; ++i) {
    CHECK(id.R_bar[i] == 6.0);
    CHECK(id.H_bar[i] == 0.5);
  }

  std::vector<double> u2(64, 2.0);
  auto sc = geom::conformal_transform(R, u2, lap, 3, dn, H);
  for (int i = 0; i < 64; ++i) CHECK(sc.R_bar[i] == doctest::Approx(0.375).epsilon(1e-15));

  // Scaling law: u = 2 uses exact binary powers, so equality is bitwise.
  for (int i = 0; i < 64; ++i)
    CHECK(sc.R_bar[i] * std::pow(2.0, 4.0 / (3.0 - 2.0) / 1.0) ==
          doctest::Approx(R[i] * std::pow(2.0, 4.0 - 4.0)).epsilon(1e-16));

  std::vector<double> u3(64, 1.7);
  auto sc3 = geom::conformal_transform(R, u3, lap, 4, dn, H);
  for (int i = 0; i < 64; ++i)
    CHECK(sc3.R_bar[i] * std::pow(1.7, 4.0 / 2.0) == doctest::Approx(R[i]).epsilon(1e-14));

  std::vector<double> ubad(64, 1.0);
  ubad[5] = -0.1;
  CHECK_THROWS_AS(geom::conformal_transform(R, ubad, lap, 3, dn, H), ValidationError);
}

TEST_CASE("slice curvature: product round S^2 collar") {
  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.round = true;
  c.slices.t = interp::linspace(0.0, 1.0, 33);
  c.slices.r.assign(33, 1.0);
  c.lapse.assign(33, std::vector<double>(1, 1.0));
  auto sc = geom::slice_curvature(c);
  for (auto& s : sc) {
    CHECK(std::abs(s.H[0]) < 1e-12);
    CHECK(s.R[0] == doctest::Approx(2.0).epsilon(1e-12)); // 2 lambda_1 at k=1/2
  }
}

TEST_CASE("slice curvature: expanding round slices") {
  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.round = true;
  c.slices.t = interp::linspace(0.0, 1.0, 201);
  c.slices.r.resize(201);
  for (int i = 0; i < 201; ++i) c.slices.r[i] = std::sqrt(1.0 + c.slices.t[i]);
  c.lapse.assign(201, std::vector<double>(1, 1.0));
  auto sc = geom::slice_curvature(c);
  // H_t = n/(2(1+t)) for n = 2 slices: H_0 = 1.
  CHECK(sc[0].H[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(sc[100].H[0] == doctest::Approx(1.0 / 1.5).epsilon(1e-4));
}

TEST_CASE("slice curvature matches tube geometry on a recast tube") {
  const int pts = 2048;
  auto tube = make_tube(0.0, 2.0, pts, 2,
                        [](double t) { return 1.0 + 0.3 * std::sin(1.3 * t + 0.2); });
  auto tg = geom::tube_geometry(tube);

  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.round = true;
  c.slices.t = tube.grid.samples();
  c.slices.r = tube.profile;
  c.lapse.assign(pts, std::vector<double>(1, 1.0));
  auto sc = geom::slice_curvature(c);
  for (int i = 0; i < pts; ++i) {
    CHECK(std::abs(sc[i].R[0] - tg.R[i]) <= 1e-9 * (1.0 + std::abs(tg.R[i])));
    CHECK(std::abs(sc[i].H[0] - tg.H[i]) <= 1e-12);
  }
}

TEST_CASE("fermi graph mean curvature") {
  // Warped representation of the product round-S^2 cylinder.
  const int nx = 513, nt = 65;
  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.closed = true;
  c.slices.x = {0.0, kPi, nx};
  c.slices.t = interp::linspace(-0.5, 0.5, nt);
  c.slices.q.assign(nt, std::vector<double>(nx, 1.0));
  c.slices.p.assign(nt, std::vector<double>(nx));
  for (int it = 0; it < nt; ++it)
    for (int i = 0; i < nx; ++i) c.slices.p[it][i] = std::sin(c.slices.x.x(i));
  c.lapse.assign(nt, std::vector<double>(nx, 1.0));

  SUBCASE("constant graph reproduces the slice mean curvature (zero here)") {
    std::vector<double> f(nx, 0.2);
    auto H = geom::fermi_graph_mean_curvature(c, f);
    for (double v : H) CHECK(std::abs(v) < 1e-10);
  }

  SUBCASE("cos-profile graph against the area first variation") {
    std::vector<double> f(nx);
    for (int i = 0; i < nx; ++i) f[i] = 0.1 * std::cos(c.slices.x.x(i));
    auto H = geom::fermi_graph_mean_curvature(c, f);

    const double h = c.slices.x.h();
    auto area = [&](const std::vector<double>& g) {
      auto gx = geom::profile_d1(g, h, +1, 2);
      std::vector<double> w(nx);
      for (int i = 0; i < nx; ++i)
        w[i] = std::sqrt(1.0 + gx[i] * gx[i]) * std::sin(c.slices.x.x(i));
      return 2.0 * kPi * trapezoid(w, h);
    };
    for (double x0 : {0.9, 1.6, 2.3}) {
      std::vector<double> eta(nx, 0.0), fp = f, fm = f;
      for (int i = 0; i < nx; ++i) {
        double d = (c.slices.x.x(i) - x0) / 0.35;
        if (std::abs(d) < 1.0) eta[i] = std::pow(1.0 - d * d, 3);
      }
      const double ds = 1e-5;
      for (int i = 0; i < nx; ++i) {
        fp[i] += ds * eta[i];
        fm[i] -= ds * eta[i];
      }
      double dA = (area(fp) - area(fm)) / (2.0 * ds);
      std::vector<double> w(nx);
      for (int i = 0; i < nx; ++i) w[i] = H[i] * eta[i] * std::sin(c.slices.x.x(i));
      double pred = 2.0 * kPi * trapezoid(w, h);
      CHECK(std::abs(dA - pred) <= 1e-5 * (1.0 + std::abs(dA)));
    }
  }

  SUBCASE("graph leaving the collar is rejected") {
    std::vector<double> f(nx, 0.8);
    CHECK_THROWS_AS(geom::fermi_graph_mean_curvature(c, f), ValidationError);
  }
}

TEST_CASE("flat band collar: linear graphs are minimal") {
  const int nx = 257, nt = 33;
  geom::CollarMetric c;
  c.slices.m = 2;
  c.slices.closed = false;
  c.slices.x = {0.0, 1.0, nx};
  c.slices.t = interp::linspace(-1.0, 1.0, nt);
  c.slices.q.assign(nt, std::vector<double>(nx, 1.0));
  c.slices.p.assign(nt, std::vector<double>(nx, 0.7));
  c.lapse.assign(nt, std::vector<double>(nx, 1.0));
  std::vector<double> f(nx);
  for (int i = 0; i < nx; ++i) f[i] = -0.3 + 0.5 * c.slices.x.x(i);
  auto H = geom::fermi_graph_mean_curvature(c, f);
  for (int i = 1; i + 1 < nx; ++i) CHECK(std::abs(H[i]) < 1e-10);
}

TEST_CASE("degenerate profiles are rejected") {
  auto m = make_tube(0.0, 1.0, 64, 2, [](double t) { return t < 0.5 ? 1.0 : 1.0; });
  m.profile[32] = 0.0;
  CHECK_THROWS_AS(geom::tube_geometry(m), ValidationError);

  WarpedMetric bad = geom::round_sphere(2, 1.0, 64);
  bad.profile[40] = -0.2;
  CHECK_THROWS_AS(geom::warped_closed_scalar(bad), ValidationError);

  WarpedMetric open_sphere = geom::round_sphere(2, 1.0, 64);
  for (auto& v : open_sphere.profile) v += 0.3; // no longer closes
  CHECK_THROWS_AS(geom::warped_closed_scalar(open_sphere), ValidationError);

  RadialGrid coarse{0.0, 1.0, 4};
  CHECK_THROWS_AS(coarse.validate(), ValidationError);
}
