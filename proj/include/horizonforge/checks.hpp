#pragma once

#include <string>
#include <vector>

#include "horizonforge/base.hpp"
#include "horizonforge/geomcore.hpp"
#include "horizonforge/schwarzschild.hpp"

namespace hf::checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Invariant suites behind every CLI subcommand's --check mode.
std::vector<CheckResult> metric_checks(const geom::WarpedMetric& m, double k,
                                       const Tolerances& tol = Tolerances::defaults());
std::vector<CheckResult> planar_checks(const schw::PlanarProfile& p,
                                       const Tolerances& tol = Tolerances::defaults());

// Fixed built-in corpus; the formatted report is byte-stable across runs.
std::vector<CheckResult> full_suite(const Tolerances& tol = Tolerances::defaults());

std::string format_report(const std::vector<CheckResult>& results);
bool all_pass(const std::vector<CheckResult>& results);

} // namespace hf::checks
