#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sectoria/report.hpp"
#include "sectoria/rng.hpp"
#include "sectoria/series.hpp"

namespace sectoria {

// Scenario kinds exposed by the runner:
//   series            strong resolvent convergence of partial-sum graphs
//   kato_simon        increasing symmetric nonnegative sequences
//   absorption        a + (n-1) b with both convergence tracks
//   example43         the rank-one-defect counterexample scenario
//   neumann_dirichlet grid-boundary absorption analogue
struct ScenarioConfig {
  int schema_version = 1;
  std::string kind;
  int dimension = 2;
  std::uint64_t seed = 0;
  TailRule tail = ZeroTail{};
  int head_count = 2;
  std::vector<long> schedule;
  std::vector<double> t_values;
  double rank_tol = kDefaultRankTol;
  double tol_conv = 1e-6;
  std::string output_dir;  // empty: resolved from SECTORIA_OUT_DIR or "."

  // Strict parser: unknown keys, missing required keys, and out-of-range
  // values are ConfigErrors with field-level diagnostics.
  static ScenarioConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  void validate() const;  // throws ConfigError
};

// Runs the configured scenario; deterministic given (config, seed).
ScenarioReport run_scenario(const ScenarioConfig& config);

struct WrittenReport {
  std::filesystem::path csv;
  std::filesystem::path markdown;
  std::filesystem::path raw;
};

// Writes <id>.csv, <id>.md and <id>.json under the output directory.
WrittenReport write_report_files(const ScenarioReport& report,
                                 const std::filesystem::path& out_dir);

// Deterministic seeded generators shared by scenarios, tests and the
// acceptance battery.
namespace gen {

// Sectorial coefficient matrix with vertex 0 and semi-angle tangent at most
// max_tan; rank < k makes the Hermitian part singular (corner at 0).
Matrix vertex0_coeff(Rng& rng, Index k, double max_tan, Index rank);
// Vertex-0 sectorial form on a random subspace of the given dimension.
SesqForm vertex0_form(Rng& rng, const HSpace& space, Index dom_dim, double max_tan,
                      bool hermitian = false);
// Operator with numerical range in the closed sector of the given tangent.
Matrix accretive_operator(Rng& rng, Index d, double max_tan);
// Relation with an accretive operator part on a random subspace, completed
// by {0} x D^perp.
LinearRelation m_sectorial_relation(Rng& rng, const HSpace& space, double max_tan);
// Head of vertex-0 forms with a common ambient space.
FormSequence form_sequence(Rng& rng, const HSpace& space, int head_count, double max_tan,
                           TailRule tail, bool hermitian = false);

}  // namespace gen

}  // namespace sectoria
