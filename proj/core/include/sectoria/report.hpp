#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sectoria/types.hpp"

namespace sectoria {

// A schedule of indices n with measured error norms and a fitted decay
// rate (least-squares slope of log error against log n).
struct ConvergenceReport {
  std::string scenario;
  std::vector<long> schedule;
  std::vector<double> errors;
  double fitted_rate = 0.0;
};

// Errors at or below this floor count as converged-to-zero and are excluded
// from rate fitting.
inline constexpr double kRateFitFloor = 1e-15;

// Slope of the least-squares line through (log n_i, log e_i).  NaN when
// fewer than two points lie above the floor.
double fit_log_log_slope(std::span<const long> schedule, std::span<const double> errors);

ConvergenceReport make_report(std::string scenario, std::vector<long> schedule,
                              std::vector<double> errors);

// One row of a scenario result: per index n and time t, the strong
// resolvent error and the product-formula error (NaN marks a track the
// scenario does not produce).
struct ScenarioRow {
  long n = 0;
  double t = 0.0;
  double err_resolvent = 0.0;
  double err_product = 0.0;
};

struct ScenarioReport {
  std::string id;
  std::vector<ScenarioRow> rows;
  // Ordered key/value summary entries (fitted rates, deviations, ...).
  std::vector<std::pair<std::string, std::string>> summary;
  // Named threshold checks with their outcome.
  std::vector<std::pair<std::string, bool>> checks;
};

// Formats a double with 17 significant digits, '.' decimal separator.
std::string format_value(double v);

// CSV with header "n,t,err_resolvent,err_product" and '\n' line endings;
// byte-stable for a fixed report.
std::string emit_csv(const ScenarioReport& report);
std::string emit_markdown(const ScenarioReport& report);

// Raw-report round trip used by the CLI `report` subcommand.
std::string report_to_json(const ScenarioReport& report);
ScenarioReport report_from_json(const std::string& text);

}  // namespace sectoria
