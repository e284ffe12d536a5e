#ifndef STEEP_VALIDATION_HPP
#define STEEP_VALIDATION_HPP

#include <string>
#include <vector>

#include "steep/sweep.hpp"

namespace steep::validation {

struct CheckResult {
  std::string name;  // suite/check[/instance]
  bool pass = false;
  std::string detail;  // numbers behind the verdict; no timestamps, so
                       // reports are byte-identical for a fixed seed
};

// Runs the suites selected by the spec (all four when the list is empty),
// keeping only checks whose name contains spec.filter. Order is fixed;
// jobs > 1 parallelizes across checks without changing any output byte.
std::vector<CheckResult> run_validation(const steep::sweep::ValidationSpec& spec);

// Deterministic JSON report.
std::string render_report(const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace steep::validation

#endif
