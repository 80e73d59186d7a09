#pragma once

#include <string>
#include <vector>

namespace kleinopt {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Runs a named property suite: kernels, manifolds, generators, solvers,
/// seminmf, or all. Each check reports the measured residual against its
/// threshold.
std::vector<CheckResult> verify_suite(const std::string& suite);

/// True when every check passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace kleinopt
