#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sectoria::acceptance {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  // Substring filter on criterion ids; empty runs everything.
  std::string filter;
  std::uint64_t seed = 0x5EC7001AULL;
  // Overrides the convergence tolerance of the criteria that use one
  // (series, kato-simon, absorption tracks); empty keeps the pinned values.
  std::optional<double> tol_conv;
};

// Runs the acceptance battery; one result per executed criterion.
std::vector<CriterionResult> run_battery(const Options& options);

// True iff every executed criterion passed (and at least one ran).
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sectoria::acceptance
