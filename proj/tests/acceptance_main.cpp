// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line each.  Exit code 0 iff all pass.

#include <cstdio>

#include "sectoria/acceptance.hpp"

int main() {
  const sectoria::acceptance::Options options;
  const auto results = sectoria::acceptance::run_battery(options);
  for (const auto& r : results) {
    std::printf("%s %-30s %7.2fs  %s\n", r.pass ? "[PASS]" : "[FAIL]", r.id.c_str(), r.seconds,
                r.detail.c_str());
  }
  return sectoria::acceptance::all_passed(results) ? 0 : 1;
}
