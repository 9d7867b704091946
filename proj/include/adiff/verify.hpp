#pragma once

#include <string>
#include <vector>

namespace adiff {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// identities, oracle-even-even, oracle-even-odd, oracle-odd-odd, local-spreading, all.
std::vector<std::string> verify_suites();

/// Runs one non-Monte-Carlo suite. Unknown names throw std::invalid_argument
/// listing the valid ones.
std::vector<CheckResult> run_verify(const std::string& suite);

}  // namespace adiff
