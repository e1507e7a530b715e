#pragma once

#include "horizonforge/kernels.hpp"

namespace hf::kern::detail {

struct Ops {
  void (*add)(cspan, cspan, mspan);
  void (*sub)(cspan, cspan, mspan);
  void (*mul)(cspan, cspan, mspan);
  void (*div)(cspan, cspan, mspan);
  void (*scale)(cspan, double, mspan);
  void (*axpy)(double, cspan, mspan);
  double (*sum)(cspan);
  double (*dot)(cspan, cspan);
  double (*dot3)(cspan, cspan, cspan);
  double (*vmin)(cspan);
  double (*vmax)(cspan);
  void (*tube_scalar)(cspan, cspan, cspan, int, mspan);
  void (*psc_margin)(cspan, cspan, cspan, int, mspan);
};

const Ops& scalar_ops();
const Ops* avx2_ops(); // nullptr when not compiled in or CPU lacks AVX2

} // namespace hf::kern::detail
