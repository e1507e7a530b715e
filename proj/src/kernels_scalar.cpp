#include "kernels_ops.hpp"

#include <algorithm>

namespace hf::kern::detail {
namespace {

void s_add(cspan a, cspan b, mspan o) {
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] + b[i];
}
void s_sub(cspan a, cspan b, mspan o) {
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] - b[i];
}
void s_mul(cspan a, cspan b, mspan o) {
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] * b[i];
}
void s_div(cspan a, cspan b, mspan o) {
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] / b[i];
}
void s_scale(cspan a, double c, mspan o) {
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = c * a[i];
}
void s_axpy(double c, cspan x, mspan y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}
double s_sum(cspan a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}
double s_dot(cspan a, cspan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
double s_dot3(cspan a, cspan b, cspan c) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * c[i];
  return s;
}
double s_vmin(cspan a) {
  double m = a[0];
  for (double v : a) m = std::min(m, v);
  return m;
}
double s_vmax(cspan a) {
  double m = a[0];
  for (double v : a) m = std::max(m, v);
  return m;
}

void s_tube_scalar(cspan f, cspan fp, cspan fpp, int n, mspan o) {
  const double c1 = double(n) * double(n - 1);
  const double c2 = 2.0 * double(n);
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = (c1 * (1.0 - fp[i] * fp[i]) - c2 * fpp[i] * f[i]) / (f[i] * f[i]);
}

void s_psc_margin(cspan x, cspan y, cspan yp, int n, mspan o) {
  const double c = 2.0 / double(n - 1);
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = (1.0 - y[i] * y[i]) / (x[i] * y[i]) - c * yp[i];
}

} // namespace

const Ops& scalar_ops() {
  static const Ops ops{s_add,  s_sub, s_mul,  s_div,  s_scale,
                       s_axpy, s_sum, s_dot,  s_dot3, s_vmin,
                       s_vmax, s_tube_scalar, s_psc_margin};
  return ops;
}

} // namespace hf::kern::detail
