#pragma once

#include <string>
#include <vector>

namespace haps {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast self-test of the simulator and learner invariants; backs the
// `check` subcommand.
std::vector<CheckResult> run_invariant_checks();

}  // namespace haps
