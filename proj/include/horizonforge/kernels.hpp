#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops shared by all modules. Every kernel has a scalar
// reference implementation and (on x86-64 with AVX2) a vectorized variant;
// the active backend is chosen once at startup and can be overridden with
// HORIZONFORGE_KERNELS=scalar|avx2. Elementwise kernels are bit-identical
// across backends; reductions may differ by accumulation order and are
// equivalence-tested to tight relative tolerance.

namespace hf::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
std::string_view backend_name();

// Test hook. Throws if the requested backend is unavailable on this CPU.
void force_backend(Backend b);

using cspan = std::span<const double>;
using mspan = std::span<double>;

// Elementwise (out may alias an input).
void add(cspan a, cspan b, mspan out);
void sub(cspan a, cspan b, mspan out);
void mul(cspan a, cspan b, mspan out);
void div(cspan a, cspan b, mspan out);
void scale(cspan a, double c, mspan out);
void axpy(double c, cspan x, mspan y); // y += c*x

// Reductions.
double sum(cspan a);
double dot(cspan a, cspan b);
double dot3(cspan a, cspan b, cspan c); // sum a_i b_i c_i
double vmin(cspan a);
double vmax(cspan a);

// Uniform-grid centered stencils, one-sided at the ends.
// Second order:
void d1(cspan f, double h, mspan out);
void d2(cspan f, double h, mspan out);
// Fourth order in the interior, matching-order one-sided rows at the ends:
void d1_o4(cspan f, double h, mspan out);
void d2_o4(cspan f, double h, mspan out);

// Fused curvature kernels.
//
// Tube scalar curvature, R = [n(n-1)(1 - fp^2) - 2 n fpp f] / f^2.
void tube_scalar(cspan f, cspan fp, cspan fpp, int n, mspan out);

// Conformal transform kernel: out = u^expo * (a*field1 + field2*u),
// the shared shape of both the scalar- and mean-curvature conformal laws.
void conformal_combine(cspan u, double expo, double a, cspan field1,
                       cspan field2, mspan out);

// Phase-plane PSC margin: (1 - y^2)/(x y) - (2/(n-1)) yp.
void psc_margin(cspan x, cspan y, cspan yp, int n, mspan out);

} // namespace hf::kern
