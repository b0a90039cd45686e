#include "sectoria/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "sectoria/absorption.hpp"
#include "sectoria/semigroups.hpp"

namespace sectoria {

namespace gen {

Matrix vertex0_coeff(Rng& rng, Index k, double max_tan, Index rank) {
  if (k == 0) return Matrix(0, 0);
  rank = std::min(rank, k);
  // Hermitian part with a controlled spectrum: `rank` eigenvalues well away
  // from zero, the rest exactly zero.  This keeps the vertex-0 corner a
  // clean rank decision for any seed.
  Eigen::HouseholderQR<Matrix> qr(rng.cnormal_matrix(k, k));
  const Matrix q = qr.householderQ();
  RealVector lambda = RealVector::Zero(k);
  for (Index i = 0; i < rank; ++i) lambda(i) = rng.uniform(0.3, 3.0);
  const Matrix r = q * lambda.asDiagonal() * q.adjoint();
  const Matrix sqrt_r = q * lambda.array().sqrt().matrix().asDiagonal() * q.adjoint();
  Matrix s0 = rng.cnormal_matrix(k, k);
  s0 = 0.5 * (s0 + s0.adjoint().eval());
  const double ns = s0.jacobiSvd().singularValues()(0);
  if (ns > 0) s0 *= (max_tan * rng.uniform()) / ns;
  return r + Complex(0, 1) * (sqrt_r * s0 * sqrt_r);
}

SesqForm vertex0_form(Rng& rng, const HSpace& space, Index dom_dim, double max_tan,
                      bool hermitian) {
  const Subspace dom = rng.random_subspace(space, dom_dim);
  const Index rank = dom.dim() > 0 ? rng.uniform_int(1, dom.dim()) : 0;
  Matrix coeff = vertex0_coeff(rng, dom.dim(), hermitian ? 0.0 : max_tan, rank);
  if (hermitian) coeff = 0.5 * (coeff + coeff.adjoint().eval());
  return SesqForm(dom, std::move(coeff));
}

Matrix accretive_operator(Rng& rng, Index d, double max_tan) {
  return vertex0_coeff(rng, d, max_tan, d) + 0.1 * Matrix::Identity(d, d);
}

LinearRelation m_sectorial_relation(Rng& rng, const HSpace& space, double max_tan) {
  const Index d = space.dim();
  const Index k = rng.uniform_int(1, d);
  const Subspace dom = rng.random_subspace(space, k);
  const Matrix op = accretive_operator(rng, dom.dim(), max_tan);
  const Subspace perp = ortho_complement(dom);
  Matrix xs(d, dom.dim() + perp.dim());
  Matrix ys(d, dom.dim() + perp.dim());
  xs << dom.basis(), Matrix::Zero(d, perp.dim());
  ys << dom.basis() * op, perp.basis();
  return LinearRelation::from_pairs(space, xs, ys);
}

FormSequence form_sequence(Rng& rng, const HSpace& space, int head_count, double max_tan,
                           TailRule tail, bool hermitian) {
  std::vector<SesqForm> head;
  head.reserve(static_cast<size_t>(head_count));
  for (int i = 0; i < head_count; ++i) {
    const Index dom_dim = rng.uniform_int(1, space.dim());
    head.push_back(vertex0_form(rng, space, dom_dim, max_tan, hermitian));
  }
  return FormSequence(std::move(head), tail);
}

}  // namespace gen

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKinds = {"series", "kato_simon", "absorption", "example43",
                                           "neumann_dirichlet"};

TailRule tail_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("tail_rule: expected an object");
  static const std::set<std::string> known{"type", "rho"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("tail_rule: unknown key '" + key + "'");
  const std::string type = j.value("type", "");
  if (type == "zero") return ZeroTail{};
  if (type == "constant") return ConstantTail{};
  if (type == "geometric") {
    if (!j.contains("rho")) throw ConfigError("tail_rule: geometric tail requires 'rho'");
    const double rho = j.at("rho").get<double>();
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("tail_rule: rho must lie in (0, 1)");
    return GeometricTail{rho};
  }
  throw ConfigError("tail_rule: type must be one of zero|constant|geometric");
}

json tail_to_json(const TailRule& tail) {
  json j;
  if (std::holds_alternative<ZeroTail>(tail)) {
    j["type"] = "zero";
  } else if (std::holds_alternative<ConstantTail>(tail)) {
    j["type"] = "constant";
  } else {
    j["type"] = "geometric";
    j["rho"] = std::get<GeometricTail>(tail).rho;
  }
  return j;
}

ScenarioRow row(long n, double t, double err_res, double err_prod) {
  return ScenarioRow{n, t, err_res, err_prod};
}

void push_rate(ScenarioReport& report, const std::string& key, double rate) {
  report.summary.emplace_back(key, format_value(rate));
}

ScenarioReport run_series_like(const ScenarioConfig& config, bool hermitian) {
  HSpace h(config.dimension);
  Rng rng = Rng::derived(config.seed, hermitian ? 2 : 1);
  const double max_tan = hermitian ? 0.0 : std::tan(1.0);  // semi-angle < pi/3
  const FormSequence seq =
      gen::form_sequence(rng, h, config.head_count, max_tan, config.tail, hermitian);
  const SeriesLimit limit = limit_graph_and_convergence(seq, config.schedule);

  ScenarioReport report;
  report.id = (hermitian ? std::string("kato_simon") : std::string("series")) + "-d" +
              std::to_string(config.dimension) + "-s" + std::to_string(config.seed);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < limit.report.schedule.size(); ++i)
    report.rows.push_back(
        row(limit.report.schedule[i], 0.0, limit.report.errors[i], nan));
  push_rate(report, "fitted_rate_resolvent", limit.report.fitted_rate);
  report.summary.emplace_back("norm_bound_slack", format_value(limit.norm_bound_slack));
  report.summary.emplace_back("energy_bound_slack", format_value(limit.energy_bound_slack));
  report.checks.emplace_back("resolvent_error_below_tol",
                             limit.report.errors.back() <= config.tol_conv);
  report.checks.emplace_back("apriori_norm_bound", limit.norm_bound_slack >= -1e-10);
  report.checks.emplace_back("apriori_energy_bound", limit.energy_bound_slack >= -1e-10);
  if (hermitian) {
    // Monotone regime: errors non-increasing up to jitter.
    bool monotone = true;
    for (size_t i = 1; i < limit.report.errors.size(); ++i)
      if (limit.report.errors[i] > limit.report.errors[i - 1] + 1e-9) monotone = false;
    report.checks.emplace_back("monotone_resolvent_errors", monotone);
  }
  return report;
}

ScenarioReport run_absorption(const ScenarioConfig& config) {
  HSpace h(config.dimension);
  Rng rng = Rng::derived(config.seed, 3);
  const SesqForm a = SesqForm::from_operator(h, gen::accretive_operator(rng, h.dim(), 0.5));
  // Bounded absorbed form with singular Hermitian part (corank >= 1).
  const Index corank = rng.uniform_int(1, h.dim() - 1);
  Matrix b_op = gen::vertex0_coeff(rng, h.dim(), 0.5, h.dim() - corank);
  b_op /= std::max(1.0, b_op.norm());
  const SesqForm b = SesqForm::from_operator(h, b_op);
  const AbsorptionProblem problem = AbsorptionProblem::from_forms(a, b);

  const Matrix p_closed = vanishing_set_projector(problem);
  const Matrix p_bounded = bounded_part_projector(problem, b_op);
  const double projector_gap = (p_closed - p_bounded).norm();

  ScenarioReport report;
  report.id = "absorption-d" + std::to_string(config.dimension) + "-s" +
              std::to_string(config.seed);
  for (double t : config.t_values) {
    const AbsorptionReport ar = verify_absorption(problem, p_closed, t, config.schedule);
    for (size_t i = 0; i < ar.resolvent_track.schedule.size(); ++i)
      report.rows.push_back(row(ar.resolvent_track.schedule[i], t,
                                ar.resolvent_track.errors[i], ar.product_track.errors[i]));
    push_rate(report, "fitted_rate_resolvent_t" + format_value(t),
              ar.resolvent_track.fitted_rate);
    push_rate(report, "fitted_rate_product_t" + format_value(t), ar.product_track.fitted_rate);
    report.checks.emplace_back("resolvent_error_below_tol_t" + format_value(t),
                               ar.resolvent_track.errors.back() <= config.tol_conv);
    report.checks.emplace_back("product_error_below_tol_t" + format_value(t),
                               ar.product_track.errors.back() <= config.tol_conv);
  }
  report.summary.emplace_back("projector_agreement", format_value(projector_gap));
  report.checks.emplace_back("projectors_agree", projector_gap <= 1e-8);
  return report;
}

ScenarioReport run_example43(const ScenarioConfig& config) {
  Rng rng = Rng::derived(config.seed, 4);
  HSpace h(config.dimension);
  const Vector phi = rng.unit_vector(h);
  const Example43 ex = example43_scenario(config.dimension, phi);

  ScenarioReport report;
  report.id = "example43-d" + std::to_string(config.dimension) + "-s" +
              std::to_string(config.seed);

  const Matrix r_inf = resolvent(ex.limit_graph, Complex(-1.0));
  const std::vector<Vector> probes = probe_vectors(h);

  for (double t : config.t_values) {
    for (long n : config.schedule) {
      const Matrix r_n = resolvent(absorption_graphs(ex.problem, n), Complex(-1.0));
      double err_res = 0.0;
      for (const Vector& f : probes)
        err_res = std::max(err_res, h.norm(Vector((r_n - r_inf) * f)));
      const double err_prod = ex.product_error(ex.p1, t, n);
      report.rows.push_back(row(n, t, err_res, err_prod));
    }
    report.summary.emplace_back("semigroup_deviation_t" + format_value(t),
                                format_value(ex.semigroup_deviation(t)));
    report.checks.emplace_back("semigroup_matches_t" + format_value(t),
                               ex.semigroup_deviation(t) <= 1e-10);
    // The product track must stall: its error cannot drop below the scale
    // of |e^{-t} - 1| (no projector satisfies the product formula here).
    const double last = ex.product_error(ex.p1, t, config.schedule.back());
    report.checks.emplace_back("product_track_stalls_t" + format_value(t),
                               last >= 0.1 * std::abs(std::exp(-t) - 1.0));
  }
  report.summary.emplace_back("base_zero_deviation", format_value(ex.base_zero_deviation()));
  report.checks.emplace_back("base_graph_is_zero", ex.base_zero_deviation() <= 1e-10);
  report.checks.emplace_back("vanishing_set_is_span_phi_one", ex.z_inf_is_span_phi_one());
  report.checks.emplace_back("limit_graph_matches", ex.limit_matches_expected());
  return report;
}

ScenarioReport run_neumann_dirichlet(const ScenarioConfig& config) {
  const AbsorptionProblem problem = grid_boundary_absorption(config.dimension);
  const Matrix p = vanishing_set_projector(problem);

  // Oracle for the projector: interior coordinates of the grid.
  const Index d = config.dimension;
  Matrix expected = Matrix::Identity(d, d);
  expected(0, 0) = 0.0;
  expected(d - 1, d - 1) = 0.0;

  ScenarioReport report;
  report.id = "neumann_dirichlet-d" + std::to_string(config.dimension) + "-s" +
              std::to_string(config.seed);
  for (double t : config.t_values) {
    const AbsorptionReport ar = verify_absorption(problem, p, t, config.schedule);
    for (size_t i = 0; i < ar.resolvent_track.schedule.size(); ++i)
      report.rows.push_back(row(ar.resolvent_track.schedule[i], t,
                                ar.resolvent_track.errors[i], ar.product_track.errors[i]));
    push_rate(report, "fitted_rate_resolvent_t" + format_value(t),
              ar.resolvent_track.fitted_rate);
    push_rate(report, "fitted_rate_product_t" + format_value(t), ar.product_track.fitted_rate);
    report.checks.emplace_back("resolvent_error_below_tol_t" + format_value(t),
                               ar.resolvent_track.errors.back() <= config.tol_conv);
    report.checks.emplace_back("product_error_below_tol_t" + format_value(t),
                               ar.product_track.errors.back() <= config.tol_conv);
  }
  report.summary.emplace_back("interior_projector_deviation",
                              format_value((p - expected).norm()));
  report.checks.emplace_back("projector_is_interior", (p - expected).norm() <= 1e-10);
  return report;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

  static const std::set<std::string> known{"schema_version", "kind",      "dimension",
                                           "seed",           "tail_rule", "head_count",
                                           "schedule",       "t_values",  "tolerances",
                                           "output"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown configuration key '" + key + "'");

  ScenarioConfig config;
  try {
    config.schema_version = j.at("schema_version").get<int>();
    config.kind = j.at("kind").get<std::string>();
    config.dimension = j.at("dimension").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.schedule = j.at("schedule").get<std::vector<long>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("missing or ill-typed required key: ") + e.what());
  }
  if (j.contains("tail_rule")) config.tail = tail_from_json(j.at("tail_rule"));
  if (j.contains("head_count")) config.head_count = j.at("head_count").get<int>();
  if (j.contains("t_values")) config.t_values = j.at("t_values").get<std::vector<double>>();
  if (config.t_values.empty()) config.t_values = {1.0};
  if (j.contains("tolerances")) {
    const json& tols = j.at("tolerances");
    static const std::set<std::string> known_tols{"rank", "convergence"};
    for (const auto& [key, _] : tols.items())
      if (!known_tols.count(key)) throw ConfigError("tolerances: unknown key '" + key + "'");
    config.rank_tol = tols.value("rank", kDefaultRankTol);
    config.tol_conv = tols.value("convergence", 1e-6);
  }
  if (j.contains("output")) config.output_dir = j.at("output").get<std::string>();
  config.validate();
  return config;
}

std::string ScenarioConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["kind"] = kind;
  j["dimension"] = dimension;
  j["seed"] = seed;
  j["tail_rule"] = tail_to_json(tail);
  j["head_count"] = head_count;
  j["schedule"] = schedule;
  j["t_values"] = t_values;
  j["tolerances"] = {{"rank", rank_tol}, {"convergence", tol_conv}};
  if (!output_dir.empty()) j["output"] = output_dir;
  return j.dump(2) + "\n";
}

void ScenarioConfig::validate() const {
  if (schema_version != 1) throw ConfigError("schema_version: only version 1 is supported");
  if (!kKnownKinds.count(kind))
    throw ConfigError("kind: must be one of series|kato_simon|absorption|example43|"
                      "neumann_dirichlet");
  if (dimension < 1) throw ConfigError("dimension: must be >= 1");
  if (kind == "absorption" && dimension < 2)
    throw ConfigError("dimension: absorption needs dimension >= 2");
  if (kind == "neumann_dirichlet" && dimension < 3)
    throw ConfigError("dimension: neumann_dirichlet needs at least 3 grid points");
  if (schedule.empty()) throw ConfigError("schedule: must not be empty");
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) throw ConfigError("schedule: entries must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw ConfigError("schedule: entries must be strictly increasing");
  }
  for (double t : t_values)
    if (!(t > 0.0)) throw ConfigError("t_values: entries must be > 0");
  if (head_count < 1) throw ConfigError("head_count: must be >= 1");
  if (!(rank_tol > 0.0)) throw ConfigError("tolerances.rank: must be > 0");
  if (!(tol_conv > 0.0)) throw ConfigError("tolerances.convergence: must be > 0");
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  try {
    if (config.kind == "series") return run_series_like(config, /*hermitian=*/false);
    if (config.kind == "kato_simon") return run_series_like(config, /*hermitian=*/true);
    if (config.kind == "absorption") return run_absorption(config);
    if (config.kind == "example43") return run_example43(config);
    return run_neumann_dirichlet(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioFailure(std::string("scenario '") + config.kind + "' failed: " + e.what());
  }
}

WrittenReport write_report_files(const ScenarioReport& report,
                                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IOError("cannot create output directory " + out_dir.string());
  WrittenReport out;
  out.csv = out_dir / (report.id + ".csv");
  out.markdown = out_dir / (report.id + ".md");
  out.raw = out_dir / (report.id + ".json");
  const auto dump = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw IOError("cannot open " + path.string() + " for writing");
    stream << text;
    if (!stream) throw IOError("failed writing " + path.string());
  };
  dump(out.csv, emit_csv(report));
  dump(out.markdown, emit_markdown(report));
  dump(out.raw, report_to_json(report));
  return out;
}

}  // namespace sectoria
