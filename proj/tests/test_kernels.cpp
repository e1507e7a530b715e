#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "horizonforge/kernels.hpp"

using namespace hf;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n, double lo,
                               double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

} // namespace

TEST_CASE("scalar and simd backends agree") {
  std::mt19937 rng(20240811);
  for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4),
                        std::size_t(7), std::size_t(256), std::size_t(1001)}) {
    auto a = random_vec(rng, n, -2.0, 2.0);
    auto b = random_vec(rng, n, 0.5, 3.0);
    auto c = random_vec(rng, n, 0.25, 1.5);

    auto run = [&](kern::Backend be) {
      kern::force_backend(be);
      struct Out {
        std::vector<double> add, mul, div, scl, axpy;
        double sum, dot, dot3, mn, mx;
      } o;
      o.add.resize(n);
      o.mul.resize(n);
      o.div.resize(n);
      o.scl.resize(n);
      o.axpy = a;
      kern::add(a, b, o.add);
      kern::mul(a, b, o.mul);
      kern::div(a, b, o.div);
      kern::scale(a, 1.7, o.scl);
      kern::axpy(-0.3, b, o.axpy);
      o.sum = kern::sum(a);
      o.dot = kern::dot(a, b);
      o.dot3 = kern::dot3(a, b, c);
      o.mn = kern::vmin(a);
      o.mx = kern::vmax(a);
      return o;
    };

    auto s = run(kern::Backend::scalar);
    bool have_avx2 = true;
    try {
      kern::force_backend(kern::Backend::avx2);
    } catch (...) {
      have_avx2 = false;
    }
    if (!have_avx2) {
      kern::force_backend(kern::Backend::scalar);
      return;
    }
    auto v = run(kern::Backend::avx2);
    kern::force_backend(kern::Backend::avx2); // leave the faster lane active

    for (std::size_t i = 0; i < n; ++i) {
      // Elementwise lanes run the same scalar arithmetic: bit identical.
      CHECK(s.add[i] == v.add[i]);
      CHECK(s.mul[i] == v.mul[i]);
      CHECK(s.div[i] == v.div[i]);
      CHECK(s.scl[i] == v.scl[i]);
      CHECK(s.axpy[i] == v.axpy[i]);
    }
    CHECK(s.mn == v.mn);
    CHECK(s.mx == v.mx);
    // Reductions may reassociate.
    CHECK(std::abs(s.sum - v.sum) <= 1e-13 * (1.0 + std::abs(s.sum)));
    CHECK(std::abs(s.dot - v.dot) <= 1e-13 * (1.0 + std::abs(s.dot)));
    CHECK(std::abs(s.dot3 - v.dot3) <= 1e-13 * (1.0 + std::abs(s.dot3)));
  }
}

TEST_CASE("fused curvature kernels agree across backends") {
  std::mt19937 rng(7);
  const std::size_t n = 517;
  auto f = random_vec(rng, n, 0.5, 2.0);
  auto fp = random_vec(rng, n, -0.9, 0.9);
  auto y = random_vec(rng, n, 0.05, 0.95);
  auto yp = random_vec(rng, n, -1.0, 1.0);
  auto x = random_vec(rng, n, 1.0, 5.0);

  std::vector<double> r1(n), r2(n), m1(n), m2(n);
  kern::force_backend(kern::Backend::scalar);
  kern::tube_scalar(f, fp, yp, 3, r1);
  kern::psc_margin(x, y, yp, 3, m1);
  try {
    kern::force_backend(kern::Backend::avx2);
  } catch (...) {
    return;
  }
  kern::tube_scalar(f, fp, yp, 3, r2);
  kern::psc_margin(x, y, yp, 3, m2);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(r1[i] == doctest::Approx(r2[i]).epsilon(1e-15));
    CHECK(m1[i] == doctest::Approx(m2[i]).epsilon(1e-15));
  }
}

TEST_CASE("stencils converge at the advertised order") {
  auto err_for = [](int npts, bool fourth) {
    double h = 1.0 / (npts - 1);
    std::vector<double> f(npts), d1e(npts), d2e(npts);
    for (int i = 0; i < npts; ++i) {
      double x = i * h;
      f[i] = std::sin(3.0 * x);
      d1e[i] = 3.0 * std::cos(3.0 * x);
      d2e[i] = -9.0 * std::sin(3.0 * x);
    }
    std::vector<double> d1(npts), d2(npts);
    if (fourth) {
      kern::d1_o4(f, h, d1);
      kern::d2_o4(f, h, d2);
    } else {
      kern::d1(f, h, d1);
      kern::d2(f, h, d2);
    }
    double e = 0.0;
    for (int i = 0; i < npts; ++i) {
      e = std::max(e, std::abs(d1[i] - d1e[i]));
      e = std::max(e, std::abs(d2[i] - d2e[i]));
    }
    return e;
  };
  double e2a = err_for(101, false), e2b = err_for(201, false);
  CHECK(e2a / e2b > 3.0);
  CHECK(e2a / e2b < 5.5);
  double e4a = err_for(101, true), e4b = err_for(201, true);
  CHECK(e4a / e4b > 11.0);
  CHECK(e4a / e4b < 22.0);
}
