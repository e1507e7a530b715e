#include "horizonforge/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "kernels_ops.hpp"

namespace hf::kern {

namespace {

const detail::Ops* g_ops = nullptr;
Backend g_backend = Backend::scalar;

void init_backend() {
  if (g_ops) return;
  const detail::Ops* avx2 = detail::avx2_ops();
  const char* env = std::getenv("HORIZONFORGE_KERNELS");
  if (env && std::string_view(env) == "scalar") avx2 = nullptr;
  if (env && std::string_view(env) == "avx2" && !avx2)
    throw std::runtime_error("HORIZONFORGE_KERNELS=avx2: AVX2 unavailable");
  if (avx2) {
    g_ops = avx2;
    g_backend = Backend::avx2;
  } else {
    g_ops = &detail::scalar_ops();
    g_backend = Backend::scalar;
  }
}

const detail::Ops& ops() {
  init_backend();
  return *g_ops;
}

} // namespace

Backend active_backend() {
  init_backend();
  return g_backend;
}

std::string_view backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::avx2) {
    const detail::Ops* avx2 = detail::avx2_ops();
    if (!avx2) throw std::runtime_error("AVX2 backend unavailable");
    g_ops = avx2;
  } else {
    g_ops = &detail::scalar_ops();
  }
  g_backend = b;
}

void add(cspan a, cspan b, mspan o) { ops().add(a, b, o); }
void sub(cspan a, cspan b, mspan o) { ops().sub(a, b, o); }
void mul(cspan a, cspan b, mspan o) { ops().mul(a, b, o); }
void div(cspan a, cspan b, mspan o) { ops().div(a, b, o); }
void scale(cspan a, double c, mspan o) { ops().scale(a, c, o); }
void axpy(double c, cspan x, mspan y) { ops().axpy(c, x, y); }
double sum(cspan a) { return ops().sum(a); }
double dot(cspan a, cspan b) { return ops().dot(a, b); }
double dot3(cspan a, cspan b, cspan c) { return ops().dot3(a, b, c); }
double vmin(cspan a) { return ops().vmin(a); }
double vmax(cspan a) { return ops().vmax(a); }

void tube_scalar(cspan f, cspan fp, cspan fpp, int n, mspan o) {
  ops().tube_scalar(f, fp, fpp, n, o);
}
void psc_margin(cspan x, cspan y, cspan yp, int n, mspan o) {
  ops().psc_margin(x, y, yp, n, o);
}

// Stencils build on the dispatched primitives via shifted spans; `out` must
// not alias `f`.

void d1(cspan f, double h, mspan out) {
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("d1: need at least 3 samples");
  sub(f.subspan(2), f.first(n - 2), out.subspan(1, n - 2));
  scale(out.subspan(1, n - 2), 1.0 / (2.0 * h), out.subspan(1, n - 2));
  out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
}

void d2(cspan f, double h, mspan out) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("d2: need at least 4 samples");
  mspan mid = out.subspan(1, n - 2);
  add(f.subspan(2), f.first(n - 2), mid);
  axpy(-2.0, f.subspan(1, n - 2), mid);
  scale(mid, 1.0 / (h * h), mid);
  out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
  out[n - 1] =
      (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
}

void d1_o4(cspan f, double h, mspan out) {
  const std::size_t n = f.size();
  if (n < 6) throw std::invalid_argument("d1_o4: need at least 6 samples");
  const double c = 1.0 / (12.0 * h);
  mspan mid = out.subspan(2, n - 4);
  sub(f.subspan(3, n - 4), f.subspan(1, n - 4), mid);
  scale(mid, 8.0 * c, mid);
  axpy(c, f.first(n - 4), mid);
  axpy(-c, f.subspan(4), mid);
  out[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
  out[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
  out[n - 2] = -c * (-3 * f[n - 1] - 10 * f[n - 2] + 18 * f[n - 3] -
                     6 * f[n - 4] + f[n - 5]);
  out[n - 1] = -c * (-25 * f[n - 1] + 48 * f[n - 2] - 36 * f[n - 3] +
                     16 * f[n - 4] - 3 * f[n - 5]);
}

void d2_o4(cspan f, double h, mspan out) {
  const std::size_t n = f.size();
  if (n < 7) throw std::invalid_argument("d2_o4: need at least 7 samples");
  const double c = 1.0 / (12.0 * h * h);
  mspan mid = out.subspan(2, n - 4);
  add(f.subspan(3, n - 4), f.subspan(1, n - 4), mid);
  scale(mid, 16.0 * c, mid);
  axpy(-30.0 * c, f.subspan(2, n - 4), mid);
  axpy(-c, f.first(n - 4), mid);
  axpy(-c, f.subspan(4), mid);
  out[0] = c * (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] +
                61 * f[4] - 10 * f[5]);
  out[1] = c * (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] +
                f[5]);
  out[n - 2] = c * (10 * f[n - 1] - 15 * f[n - 2] - 4 * f[n - 3] +
                    14 * f[n - 4] - 6 * f[n - 5] + f[n - 6]);
  out[n - 1] = c * (45 * f[n - 1] - 154 * f[n - 2] + 214 * f[n - 3] -
                    156 * f[n - 4] + 61 * f[n - 5] - 10 * f[n - 6]);
}

void conformal_combine(cspan u, double expo, double a, cspan field1,
                       cspan field2, mspan out) {
  mul(field2, u, out);
  axpy(a, field1, out);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] *= std::pow(u[i], expo);
}

} // namespace hf::kern
