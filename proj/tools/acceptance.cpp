// Runs every acceptance check, the slow one included, one line per criterion.
// Exit status 0 only when all of them pass.
#include <iostream>

#include "wavetraj/verify.hpp"

int main() {
  wavetraj::VerifyOptions options;
  options.include_slow = true;
  int failed = 0;
  wavetraj::run_checks(options, [&](const wavetraj::CheckResult& r) {
    std::cout << "criterion " << r.criterion << ": " << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  "
              << r.detail << " (" << r.seconds << " s)" << std::endl;
    failed += r.passed ? 0 : 1;
  });
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
