#pragma once

#include <functional>
#include <string>
#include <vector>

namespace wavetraj {

struct CheckInfo {
  int criterion = 0;
  std::string name;
  std::string description;
  bool slow = false;  // left out of the default selection
};

/// The acceptance checks, in criterion order.
const std::vector<CheckInfo>& check_registry();

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::vector<std::string> subset;  // empty: every non-slow check
  bool include_slow = false;
  bool strict_eq29 = false;  // forces the printed projection on every scenario run
  int workers = 1;
};

/// Runs the selected checks in criterion order, reporting each result as it
/// completes. Throws InvalidOverride for a name not in check_registry().
std::vector<CheckResult> run_checks(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result = {});

/// One table row, e.g. "[PASS]  3 constant_force  turning z ...".
std::string format_check(const CheckResult& result);

}  // namespace wavetraj
