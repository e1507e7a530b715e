#include "kernels_ops.hpp"

#if defined(HF_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

namespace hf::kern::detail {
namespace {

// Elementwise loops keep mul/add separate (no FMA contraction) so results
// stay bit-identical to the scalar reference lane by lane.

void v_add(cspan a, cspan b, mspan o) {
  std::size_t i = 0, n = o.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&o[i], _mm256_add_pd(_mm256_loadu_pd(&a[i]),
                                          _mm256_loadu_pd(&b[i])));
  for (; i < n; ++i) o[i] = a[i] + b[i];
}
void v_sub(cspan a, cspan b, mspan o) {
  std::size_t i = 0, n = o.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&o[i], _mm256_sub_pd(_mm256_loadu_pd(&a[i]),
                                          _mm256_loadu_pd(&b[i])));
  for (; i < n; ++i) o[i] = a[i] - b[i];
}
void v_mul(cspan a, cspan b, mspan o) {
  std::size_t i = 0, n = o.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&o[i], _mm256_mul_pd(_mm256_loadu_pd(&a[i]),
                                          _mm256_loadu_pd(&b[i])));
  for (; i < n; ++i) o[i] = a[i] * b[i];
}
void v_div(cspan a, cspan b, mspan o) {
  std::size_t i = 0, n = o.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&o[i], _mm256_div_pd(_mm256_loadu_pd(&a[i]),
                                          _mm256_loadu_pd(&b[i])));
  for (; i < n; ++i) o[i] = a[i] / b[i];
}
void v_scale(cspan a, double c, mspan o) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0, n = o.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&o[i], _mm256_mul_pd(vc, _mm256_loadu_pd(&a[i])));
  for (; i < n; ++i) o[i] = c * a[i];
}
void v_axpy(double c, cspan x, mspan y) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0, n = y.size();
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vc, _mm256_loadu_pd(&x[i]));
    _mm256_storeu_pd(&y[i], _mm256_add_pd(_mm256_loadu_pd(&y[i]), t));
  }
  for (; i < n; ++i) y[i] += c * x[i];
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double v_sum(cspan a) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0, n = a.size();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(&a[i]));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}
double v_dot(cspan a, cspan b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0, n = a.size();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&a[i]),
                                           _mm256_loadu_pd(&b[i])));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}
double v_dot3(cspan a, cspan b, cspan c) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0, n = a.size();
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(t, _mm256_loadu_pd(&c[i])));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}
double v_vmin(cspan a) {
  std::size_t i = 0, n = a.size();
  double m = a[0];
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(&a[0]);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_min_pd(acc, _mm256_loadu_pd(&a[i]));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    m = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::min(m, a[i]);
  return m;
}
double v_vmax(cspan a) {
  std::size_t i = 0, n = a.size();
  double m = a[0];
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(&a[0]);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_max_pd(acc, _mm256_loadu_pd(&a[i]));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

void v_tube_scalar(cspan f, cspan fp, cspan fpp, int n, mspan o) {
  const double c1 = double(n) * double(n - 1);
  const double c2 = 2.0 * double(n);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0, m = o.size();
  for (; i + 4 <= m; i += 4) {
    __m256d vf = _mm256_loadu_pd(&f[i]);
    __m256d vfp = _mm256_loadu_pd(&fp[i]);
    __m256d vfpp = _mm256_loadu_pd(&fpp[i]);
    __m256d num = _mm256_sub_pd(
        _mm256_mul_pd(vc1, _mm256_sub_pd(one, _mm256_mul_pd(vfp, vfp))),
        _mm256_mul_pd(vc2, _mm256_mul_pd(vfpp, vf)));
    _mm256_storeu_pd(&o[i], _mm256_div_pd(num, _mm256_mul_pd(vf, vf)));
  }
  for (; i < m; ++i)
    o[i] = (c1 * (1.0 - fp[i] * fp[i]) - c2 * fpp[i] * f[i]) / (f[i] * f[i]);
}

void v_psc_margin(cspan x, cspan y, cspan yp, int n, mspan o) {
  const double c = 2.0 / double(n - 1);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0, m = o.size();
  for (; i + 4 <= m; i += 4) {
    __m256d vx = _mm256_loadu_pd(&x[i]);
    __m256d vy = _mm256_loadu_pd(&y[i]);
    __m256d vyp = _mm256_loadu_pd(&yp[i]);
    __m256d t = _mm256_div_pd(_mm256_sub_pd(one, _mm256_mul_pd(vy, vy)),
                              _mm256_mul_pd(vx, vy));
    _mm256_storeu_pd(&o[i], _mm256_sub_pd(t, _mm256_mul_pd(vc, vyp)));
  }
  for (; i < m; ++i)
    o[i] = (1.0 - y[i] * y[i]) / (x[i] * y[i]) - c * yp[i];
}

} // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops{v_add,  v_sub, v_mul,  v_div,  v_scale,
                       v_axpy, v_sum, v_dot,  v_dot3, v_vmin,
                       v_vmax, v_tube_scalar, v_psc_margin};
  return &ops;
}

} // namespace hf::kern::detail

#else

namespace hf::kern::detail {
const Ops* avx2_ops() { return nullptr; }
} // namespace hf::kern::detail

#endif
