#pragma once

#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"

namespace hf::spectral {

// Principal eigenpair of -Delta_g + k R_g in the radial reduction.
struct SpectralResult {
  double lambda1 = 0.0;
  std::vector<double> eigenfunction; // node samples, positive, unit L^2(dmu)
  double residual = 0.0;
  double k = 0.0;
};

struct MembershipVerdict {
  bool in_strict = false;
  bool in_weak = false;
  double lambda1 = 0.0;
};

SpectralResult lambda1(const geom::WarpedMetric& m, double k,
                       const Tolerances& tol = Tolerances::defaults());

// Same operator on one slice of a radial family (used by collar builders).
SpectralResult lambda1_slice(const geom::RadialFamily& fam, int it, double k,
                             const Tolerances& tol = Tolerances::defaults());

MembershipVerdict membership(const geom::WarpedMetric& m, double k,
                             const Tolerances& tol = Tolerances::defaults());

struct DirichletBounds {
  double lambda1 = 0.0;
  double dirichlet_lambda1 = 0.0;
  double upper_bound = 0.0;
};

// Two-sided Dirichlet comparison on the submanifold spanned by node indices
// [sub_lo, sub_hi]; cutoff must be compactly supported in its interior.
DirichletBounds dirichlet_lambda1_bounds(
    const geom::WarpedMetric& m, double k, int sub_lo, int sub_hi,
    const std::vector<double>& cutoff,
    const Tolerances& tol = Tolerances::defaults());

struct ConformalSignCheck {
  MembershipVerdict verdict;
  std::vector<double> R_bar;
};

// Conformal-Laplacian coupling k = (n-2)/(4(n-1)); checks that the scalar
// curvature of u^{4/(n-2)} g has the sign of lambda1.
ConformalSignCheck conformal_sign_check(
    const geom::WarpedMetric& m, const Tolerances& tol = Tolerances::defaults());

// min R <= lambda1/k <= avg R; holds exactly for the discrete operator.
struct Sandwich {
  double min_R = 0.0;
  double lambda1_over_k = 0.0;
  double avg_R = 0.0;
  bool holds = false;
};
Sandwich eigenvalue_sandwich(const geom::WarpedMetric& m, double k,
                             const Tolerances& tol = Tolerances::defaults());

} // namespace hf::spectral
