#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chfem/experiment.hpp"

namespace acceptance {

// Collects named checks for one criterion; every check prints its measured
// value so a failing run is diagnosable from the log alone.
struct Checker {
  bool ok = true;
  std::string log;

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  void check(bool cond, const std::string& what) {
    log += std::string("    ") + (cond ? "ok  " : "FAIL") + "  " + what + "\n";
    if (!cond) ok = false;
  }

  // |value - expected| <= tol_frac * |expected|
  void near(double value, double expected, double tol_frac, const std::string& what) {
    const bool cond = std::abs(value - expected) <= tol_frac * std::abs(expected);
    check(cond, what + ": " + num(value) + " vs " + num(expected) + " (tol " +
                    num(100 * tol_frac) + "%)");
  }

  void below(double value, double bound, const std::string& what) {
    check(value < bound, what + ": " + num(value) + " < " + num(bound));
  }

  void within(double value, double lo, double hi, const std::string& what) {
    check(value >= lo && value <= hi,
          what + ": " + num(value) + " in [" + num(lo) + ", " + num(hi) + "]");
  }
};

struct CriterionResult {
  bool pass = false;
  std::string summary;
  std::string detail;
};

using CriterionFn = std::function<CriterionResult()>;

// registry, keyed by criterion number
std::map<int, std::pair<std::string, CriterionFn>>& registry();

// criteria implemented across the compilation units
CriterionResult criterion1();
CriterionResult criterion2();
CriterionResult criterion3();
CriterionResult criterion4();
CriterionResult criterion5();
CriterionResult criterion6();
CriterionResult criterion7();
CriterionResult criterion8();
CriterionResult criterion9();
CriterionResult criterion10();

}  // namespace acceptance
