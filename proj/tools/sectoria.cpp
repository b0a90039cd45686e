// Command line front-end: runs scenario configurations, the acceptance
// battery, and report-format conversions.
//
//   sectoria run <config.json> [--output DIR]
//   sectoria verify [--filter ID] [--seed S] [--tol T]
//   sectoria report <raw.json> --format csv|markdown
//
// The default output directory comes from SECTORIA_OUT_DIR (falling back to
// the working directory).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sectoria/acceptance.hpp"
#include "sectoria/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) throw sectoria::IOError("cannot open " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

std::string default_output_dir() {
  if (const char* env = std::getenv("SECTORIA_OUT_DIR"); env && *env) return env;
  return ".";
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  const sectoria::ScenarioConfig config =
      sectoria::ScenarioConfig::from_json_text(read_file(config_path));
  const sectoria::ScenarioReport report = sectoria::run_scenario(config);

  std::string out_dir = output_override;
  if (out_dir.empty()) out_dir = config.output_dir;
  if (out_dir.empty()) out_dir = default_output_dir();

  const sectoria::WrittenReport written = sectoria::write_report_files(report, out_dir);
  std::cout << "wrote " << written.csv.string() << "\n"
            << "wrote " << written.markdown.string() << "\n"
            << "wrote " << written.raw.string() << "\n";

  bool all_ok = true;
  for (const auto& [key, pass] : report.checks) {
    std::cout << (pass ? "[pass] " : "[FAIL] ") << key << "\n";
    all_ok = all_ok && pass;
  }
  return all_ok ? 0 : 1;
}

int cmd_verify(const sectoria::acceptance::Options& options) {
  const auto results = sectoria::acceptance::run_battery(options);
  if (results.empty()) {
    std::cerr << "no criterion matches filter '" << options.filter << "'\n";
    return 2;
  }
  size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.id.size());
  for (const auto& r : results) {
    std::printf("%-6s %-*s %7.2fs  %s\n", r.pass ? "[PASS]" : "[FAIL]",
                static_cast<int>(width), r.id.c_str(), r.seconds, r.detail.c_str());
  }
  return sectoria::acceptance::all_passed(results) ? 0 : 1;
}

int cmd_report(const std::string& raw_path, const std::string& format) {
  const sectoria::ScenarioReport report =
      sectoria::report_from_json(read_file(raw_path));
  if (format == "csv")
    std::cout << sectoria::emit_csv(report);
  else
    std::cout << sectoria::emit_markdown(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sectorial form and linear relation scenario runner"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  CLI::App* run = app.add_subcommand("run", "run a scenario configuration");
  run->add_option("config", config_path, "scenario configuration (JSON)")->required();
  run->add_option("--output", output_override, "output directory");

  sectoria::acceptance::Options verify_options;
  double tol = 0.0;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance battery");
  verify->add_option("--filter", verify_options.filter, "criterion id substring");
  verify->add_option("--seed", verify_options.seed, "seed for the seeded batteries");
  CLI::Option* tol_opt =
      verify->add_option("--tol", tol, "override the convergence tolerance");

  std::string raw_path, format = "csv";
  CLI::App* report = app.add_subcommand("report", "format a raw report");
  report->add_option("raw", raw_path, "raw report (JSON)")->required();
  report->add_option("--format", format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, output_override);
    if (verify->parsed()) {
      if (tol_opt->count() > 0) verify_options.tol_conv = tol;
      return cmd_verify(verify_options);
    }
    return cmd_report(raw_path, format);
  } catch (const sectoria::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
