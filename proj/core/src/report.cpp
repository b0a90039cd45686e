#include "sectoria/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

namespace sectoria {

double fit_log_log_slope(std::span<const long> schedule, std::span<const double> errors) {
  if (schedule.size() != errors.size())
    throw DimensionMismatch("fit_log_log_slope: schedule and errors differ in length");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (!(errors[i] > kRateFitFloor)) continue;
    const double x = std::log(static_cast<double>(schedule[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / denom;
}

ConvergenceReport make_report(std::string scenario, std::vector<long> schedule,
                              std::vector<double> errors) {
  if (schedule.size() != errors.size())
    throw DimensionMismatch("make_report: schedule and errors differ in length");
  for (size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] <= schedule[i - 1])
      throw Error("make_report: schedule must be strictly increasing");
  for (double e : errors)
    if (!(e >= 0.0)) throw Error("make_report: errors must be nonnegative");
  ConvergenceReport r;
  r.scenario = std::move(scenario);
  r.fitted_rate = fit_log_log_slope(schedule, errors);
  r.schedule = std::move(schedule);
  r.errors = std::move(errors);
  return r;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string emit_csv(const ScenarioReport& report) {
  std::string out = "n,t,err_resolvent,err_product\n";
  for (const ScenarioRow& row : report.rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_value(row.t);
    out += ',';
    out += format_value(row.err_resolvent);
    out += ',';
    out += format_value(row.err_product);
    out += '\n';
  }
  return out;
}

std::string emit_markdown(const ScenarioReport& report) {
  std::string out = "# Scenario `" + report.id + "`\n\n";
  if (!report.summary.empty()) {
    out += "## Summary\n\n";
    for (const auto& [key, value] : report.summary) out += "- " + key + ": " + value + "\n";
    out += "\n";
  }
  if (!report.checks.empty()) {
    out += "## Checks\n\n";
    for (const auto& [key, pass] : report.checks)
      out += std::string("- ") + (pass ? "[pass] " : "[FAIL] ") + key + "\n";
    out += "\n";
  }
  out += "## Errors\n\n| n | t | err_resolvent | err_product |\n|---|---|---|---|\n";
  for (const ScenarioRow& row : report.rows) {
    out += "| " + std::to_string(row.n) + " | " + format_value(row.t) + " | " +
           format_value(row.err_resolvent) + " | " + format_value(row.err_product) + " |\n";
  }
  return out;
}

std::string report_to_json(const ScenarioReport& report) {
  nlohmann::ordered_json j;
  j["id"] = report.id;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ScenarioRow& row : report.rows) {
    // Doubles travel as strings so the raw file is byte-stable and
    // round-trips at full precision.
    nlohmann::ordered_json r;
    r["n"] = row.n;
    r["t"] = format_value(row.t);
    r["err_resolvent"] = format_value(row.err_resolvent);
    r["err_product"] = format_value(row.err_product);
    j["rows"].push_back(std::move(r));
  }
  j["summary"] = nlohmann::ordered_json::array();
  for (const auto& [key, value] : report.summary)
    j["summary"].push_back({{"key", key}, {"value", value}});
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& [key, pass] : report.checks)
    j["checks"].push_back({{"key", key}, {"pass", pass}});
  return j.dump(2) + "\n";
}

ScenarioReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IOError(std::string("raw report is not valid JSON: ") + e.what());
  }
  ScenarioReport report;
  try {
    report.id = j.at("id").get<std::string>();
    for (const auto& r : j.at("rows")) {
      ScenarioRow row;
      row.n = r.at("n").get<long>();
      row.t = std::stod(r.at("t").get<std::string>());
      row.err_resolvent = std::stod(r.at("err_resolvent").get<std::string>());
      row.err_product = std::stod(r.at("err_product").get<std::string>());
      report.rows.push_back(row);
    }
    for (const auto& s : j.at("summary"))
      report.summary.emplace_back(s.at("key").get<std::string>(),
                                  s.at("value").get<std::string>());
    for (const auto& c : j.at("checks"))
      report.checks.emplace_back(c.at("key").get<std::string>(), c.at("pass").get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw IOError(std::string("raw report is missing fields: ") + e.what());
  }
  return report;
}

}  // namespace sectoria
