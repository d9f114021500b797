#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace revlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Runs the listed acceptance criteria (1..9; empty = all) and, when `log`
/// is given, prints one PASS/FAIL line per criterion as it completes.
/// Rate sweeps are shared between criteria 3-6 within one call.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            std::ostream* log = nullptr);

std::string format_result(const CriterionResult& r);

}  // namespace revlab
