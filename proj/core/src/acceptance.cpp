#include "sectoria/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sectoria/absorption.hpp"
#include "sectoria/scenario.hpp"
#include "sectoria/semigroups.hpp"
#include "sectoria/series.hpp"

namespace sectoria::acceptance {

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::vector<long> powers_of_two(int lo, int hi, int step = 2) {
  std::vector<long> out;
  for (int e = lo; e <= hi; e += step) out.push_back(1L << e);
  return out;
}

// ---------------------------------------------------------------------------
// 1. example43-exact: the counterexample scenario reproduces exactly.
CriterionResult example43_exact(const Options& opt) {
  Check c;
  double worst_semigroup = 0.0;
  for (int d : {2, 5, 10}) {
    Rng rng = Rng::derived(opt.seed, 100 + d);
    HSpace h(d);
    const Vector phi = rng.unit_vector(h);
    const Example43 ex = example43_scenario(d, phi);

    c.require(ex.base_zero_deviation() <= 1e-10,
              "base graph not zero at d=" + std::to_string(d));
    c.require(ex.z_inf_is_span_phi_one(), "vanishing set wrong at d=" + std::to_string(d));
    c.require(ex.limit_matches_expected(), "limit graph wrong at d=" + std::to_string(d));

    const Subspace dom = domain(ex.limit_graph);
    const Subspace phi_line = Subspace::orthonormalize(h, phi);
    c.require(dom.equals(phi_line), "limit domain is not span{phi} at d=" + std::to_string(d));
    const auto sv = is_single_valued(ex.limit_graph);
    c.require(sv.multivalued_part.equals(ortho_complement(phi_line)),
              "multivalued part is not the orthogonal complement at d=" + std::to_string(d));

    for (double t : {0.1, 1.0, 10.0})
      worst_semigroup = std::max(worst_semigroup, ex.semigroup_deviation(t));
  }
  c.require(worst_semigroup <= 1e-10,
            "max semigroup deviation " + fmt(worst_semigroup) + " > 1e-10");
  return {"example43-exact", "exact reproduction of the rank-one-defect scenario", c.pass,
          c.pass ? "max semigroup deviation " + fmt(worst_semigroup) : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 2. example43-no-projection: no candidate projector makes the product
//    formula converge; the error never falls below 0.1 |e^{-1} - 1|.
CriterionResult example43_no_projection(const Options& opt) {
  Check c;
  const double threshold = 0.1 * std::abs(std::exp(-1.0) - 1.0);
  double least = 1e300;
  for (int d : {2, 5, 10}) {
    Rng rng = Rng::derived(opt.seed, 100 + d);
    HSpace h(d);
    const Vector phi = rng.unit_vector(h);
    const Example43 ex = example43_scenario(d, phi);
    const Matrix id = Matrix::Identity(d, d);
    const Matrix zero = Matrix::Zero(d, d);
    for (const Matrix& p : {ex.p1, id, zero}) {
      for (long n = 1; n <= (1L << 12); n *= 2) {
        const double err = ex.product_error(p, 1.0, n);
        least = std::min(least, err);
      }
    }
  }
  c.require(least >= threshold, "product error " + fmt(least) + " fell below the plateau " +
                                    fmt(threshold));
  return {"example43-no-projection", "product formula stalls for every candidate projector",
          c.pass, "min error " + fmt(least) + " vs plateau " + fmt(threshold)};
}

// ---------------------------------------------------------------------------
// 3. series-resolvent-convergence: strong resolvent convergence of 50 seeded
//    sequences at n = 2^10, with the a-priori bounds from the limit proof.
//    Tails are zero or geometric: those regimes are stationary or
//    geometrically convergent, matching the 1e-6 gate at n = 2^10; the
//    constant-tail (absorption) regime carries its own criteria.
CriterionResult series_resolvent_convergence(const Options& opt) {
  Check c;
  const double tol = opt.tol_conv.value_or(1e-6);
  const std::vector<long> schedule = powers_of_two(4, 10);
  const double max_tan = std::tan(3.14159265358979323846 / 3.0);
  double worst_err = 0.0, worst_norm_slack = 1e300, worst_energy_slack = 1e300;

  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::derived(opt.seed, 300 + i);
    const int d = static_cast<int>(rng.uniform_int(2, 8));
    const int head = static_cast<int>(rng.uniform_int(1, 5));
    const TailRule tail = (i % 2 == 0)
                              ? TailRule(ZeroTail{})
                              : TailRule(GeometricTail{rng.uniform(0.3, 0.9)});
    HSpace h(d);
    const FormSequence seq = gen::form_sequence(rng, h, head, max_tan, tail);
    const SeriesLimit limit = limit_graph_and_convergence(seq, schedule);
    worst_err = std::max(worst_err, limit.report.errors.back());
    worst_norm_slack = std::min(worst_norm_slack, limit.norm_bound_slack);
    worst_energy_slack = std::min(worst_energy_slack, limit.energy_bound_slack);
  }
  c.require(worst_err <= tol, "resolvent error " + fmt(worst_err) + " > " + fmt(tol));
  c.require(worst_norm_slack >= -1e-10, "norm bound violated by " + fmt(-worst_norm_slack));
  c.require(worst_energy_slack >= -1e-10,
            "energy bound violated by " + fmt(-worst_energy_slack));
  return {"series-resolvent-convergence",
          "strong resolvent limits of 50 seeded form series", c.pass,
          c.pass ? "max error " + fmt(worst_err) + ", min slacks " + fmt(worst_norm_slack) +
                       "/" + fmt(worst_energy_slack)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 4. kato-simon-monotone: increasing symmetric nonnegative sequences have
//    monotone resolvent errors converging below 1e-8.
CriterionResult kato_simon_monotone(const Options& opt) {
  Check c;
  const double tol = opt.tol_conv.value_or(1e-8);
  const std::vector<long> schedule = powers_of_two(2, 10);
  double worst_final = 0.0, worst_jitter = 0.0;

  for (int i = 0; i < 50; ++i) {
    Rng rng = Rng::derived(opt.seed, 400 + i);
    const int d = static_cast<int>(rng.uniform_int(2, 8));
    const int head = static_cast<int>(rng.uniform_int(1, 5));
    const TailRule tail = (i % 2 == 0)
                              ? TailRule(ZeroTail{})
                              : TailRule(GeometricTail{rng.uniform(0.3, 0.9)});
    HSpace h(d);
    const FormSequence seq = gen::form_sequence(rng, h, head, 0.0, tail, /*hermitian=*/true);
    const SeriesLimit limit = limit_graph_and_convergence(seq, schedule);
    worst_final = std::max(worst_final, limit.report.errors.back());
    for (size_t k = 1; k < limit.report.errors.size(); ++k)
      worst_jitter = std::max(worst_jitter,
                              limit.report.errors[k] - limit.report.errors[k - 1]);
  }
  c.require(worst_final <= tol, "final error " + fmt(worst_final) + " > " + fmt(tol));
  c.require(worst_jitter <= 1e-9, "monotonicity jitter " + fmt(worst_jitter) + " > 1e-9");
  return {"kato-simon-monotone", "monotone convergence of symmetric nonnegative series",
          c.pass,
          c.pass ? "final " + fmt(worst_final) + ", jitter " + fmt(worst_jitter)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 5. semigroup-resolvent-oracle: the resolvent-power approximation converges
//    to the semigroup at rate 1/n.
CriterionResult semigroup_resolvent_oracle(const Options& opt) {
  Check c;
  const std::vector<long> schedule = powers_of_two(4, 12);
  double worst_scaled_final = 0.0, worst_slope = -1e300;

  for (int i = 0; i < 100; ++i) {
    Rng rng = Rng::derived(opt.seed, 500 + i);
    const int d = static_cast<int>(rng.uniform_int(2, 8));
    HSpace h(d);
    const LinearRelation a = gen::m_sectorial_relation(rng, h, 0.8);
    const Matrix target = semigroup(a, 1.0);
    const double op_norm = single_valued_part(a).op.norm();

    std::vector<double> errors;
    errors.reserve(schedule.size());
    for (long n : schedule)
      errors.push_back(h.operator_norm(Matrix(resolvent_power_approx(a, 1.0, n) - target)));
    const double budget = 1e-3 * (1.0 + op_norm * op_norm);
    worst_scaled_final = std::max(worst_scaled_final, errors.back() / budget);
    if (errors.back() > 1e-14) {
      const double slope = fit_log_log_slope(schedule, errors);
      worst_slope = std::max(worst_slope, slope);
    }
  }
  c.require(worst_scaled_final <= 1.0,
            "final error exceeded 1e-3 (1 + ||A||^2) by factor " + fmt(worst_scaled_final));
  c.require(worst_slope <= -0.9, "fitted slope " + fmt(worst_slope) + " > -0.9");
  return {"semigroup-resolvent-oracle",
          "resolvent powers converge to the semigroup at rate 1/n", c.pass,
          c.pass ? "worst slope " + fmt(worst_slope) + ", worst scaled final " +
                       fmt(worst_scaled_final)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 6. bounded-absorption-product: bounded absorbed forms with corank >= 1;
//    both convergence tracks reach 1e-6 by the end of the schedule and the
//    two projector constructions agree.
CriterionResult bounded_absorption_product(const Options& opt) {
  Check c;
  const double tol = opt.tol_conv.value_or(1e-6);
  const std::vector<long> schedule = powers_of_two(4, 26, 2);
  double worst_res = 0.0, worst_prod = 0.0, worst_gap = 0.0;

  for (int i = 0; i < 25; ++i) {
    Rng rng = Rng::derived(opt.seed, 600 + i);
    const int d = static_cast<int>(rng.uniform_int(2, 6));
    HSpace h(d);
    Matrix a_op = gen::accretive_operator(rng, d, 0.6);
    a_op *= 1.5 / std::max(1.5, h.operator_norm(a_op));
    const Index corank = rng.uniform_int(1, d - 1);
    Matrix b_op = gen::vertex0_coeff(rng, d, 0.6, d - corank);
    b_op /= std::max(1.0, h.operator_norm(b_op));

    const AbsorptionProblem problem =
        AbsorptionProblem::from_forms(SesqForm::from_operator(h, a_op),
                                      SesqForm::from_operator(h, b_op));
    const Matrix p_closed = vanishing_set_projector(problem);
    const Matrix p_bounded = bounded_part_projector(problem, b_op);
    worst_gap = std::max(worst_gap, (p_closed - p_bounded).norm());

    const AbsorptionReport report = verify_absorption(problem, p_bounded, 1.0, schedule);
    worst_res = std::max(worst_res, report.resolvent_track.errors.back());
    worst_prod = std::max(worst_prod, report.product_track.errors.back());
  }
  c.require(worst_res <= tol, "resolvent track " + fmt(worst_res) + " > " + fmt(tol));
  c.require(worst_prod <= tol, "product track " + fmt(worst_prod) + " > " + fmt(tol));
  c.require(worst_gap <= 1e-8, "projector constructions differ by " + fmt(worst_gap));
  return {"bounded-absorption-product",
          "product formula for bounded absorbed forms with corank >= 1", c.pass,
          c.pass ? "tracks " + fmt(worst_res) + "/" + fmt(worst_prod) + ", projector gap " +
                       fmt(worst_gap)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 7. tower-bound: compatibility decisions agree with the brute-force check
//    and the tower-norm bound holds with nonnegative slack.
CriterionResult tower_bound(const Options& opt) {
  Check c;
  int checked = 0;
  double worst_slack = 1e300;

  for (int i = 0; checked < 100 && i < 200; ++i) {
    Rng rng = Rng::derived(opt.seed, 700 + i);
    const int d = static_cast<int>(rng.uniform_int(3, 6));
    const int head = static_cast<int>(rng.uniform_int(1, 4));
    const TailRule tail = (i % 3 == 0) ? TailRule(ZeroTail{})
                          : (i % 3 == 1)
                              ? TailRule(ConstantTail{})
                              : TailRule(GeometricTail{rng.uniform(0.3, 0.9)});
    HSpace h(d);
    // Near-full domains keep the level intersections nontrivial.
    std::vector<SesqForm> forms;
    for (int k = 0; k < head; ++k) {
      const Index dom_dim = rng.uniform_int(d - 1, d);
      forms.push_back(gen::vertex0_form(rng, h, dom_dim, 1.0));
    }
    const FormSequence seq(forms, tail);
    const Tower tower = build_tower(seq, head);

    for (int e = 0; e < 5; ++e) {
      // Candidate element: a compatible tuple, possibly broken at one level.
      const Index top_dim = tower.level_space(tower.depth()).dim();
      if (top_dim == 0) continue;
      Vector u_top = rng.cnormal_vector(top_dim);
      std::vector<Vector> element;
      for (int n = 0; n <= tower.depth(); ++n)
        element.push_back(tower.phi(tower.depth(), n) * u_top);
      const bool broken = (e % 2 == 1) && tower.depth() >= 1;
      if (broken) {
        const int level = 1 + static_cast<int>(rng.uniform_int(0, tower.depth() - 1));
        if (element[level].size() > 0)
          element[level] += Vector::Ones(element[level].size());
      }

      const TowerElementCheck check = check_tower_element(tower, element);

      // Brute-force route: membership of the assembled tuple in W_inf.
      Vector tuple = Vector::Zero(tower.sum_space().dim());
      for (int n = 0; n <= tower.depth(); ++n)
        tuple.segment(tower.offset(n), element[n].size()) = element[n];
      const bool in_w_inf = tower.w_inf().contains_vector(tuple);

      ++checked;
      if (check.compatible != in_w_inf) {
        c.require(false, "compatibility decision disagrees with the subspace oracle");
        continue;
      }
      if (check.compatible) {
        c.require(check.bound_holds, "tower bound violated");
        worst_slack = std::min(worst_slack, check.slack);
      }
    }
  }
  c.require(checked >= 100, "only " + std::to_string(checked) + " elements checked");
  return {"tower-bound", "compatible towers satisfy the direct-sum norm bound", c.pass,
          c.pass ? std::to_string(checked) + " elements, min slack " + fmt(worst_slack)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 8. graph-algebra-oracle: shift, reflection and resolvent agree with
//    brute-force subspace computations.
CriterionResult graph_algebra_oracle(const Options& opt) {
  Check c;
  double worst_subspace = 0.0, worst_resolvent = 0.0, worst_identity = 0.0;

  for (int i = 0; i < 500; ++i) {
    Rng rng = Rng::derived(opt.seed, 800 + i);
    const int d = static_cast<int>(rng.uniform_int(1, 6));
    HSpace h(d);
    HSpace pair_space(2 * d);
    const Index k = rng.uniform_int(0, 2 * d);
    const LinearRelation a(h, rng.random_subspace(pair_space, k));
    const Complex lambda(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));

    // Oracle route: block maps applied to the basis, image via pivoted QR.
    const Matrix basis = a.graph().basis();
    Matrix block = Matrix::Zero(2 * d, 2 * d);
    block.topLeftCorner(d, d) = Matrix::Identity(d, d);
    block.bottomLeftCorner(d, d) = lambda * Matrix::Identity(d, d);
    block.bottomRightCorner(d, d) = Matrix::Identity(d, d);
    Matrix swap = Matrix::Zero(2 * d, 2 * d);
    swap.topRightCorner(d, d) = Matrix::Identity(d, d);
    swap.bottomLeftCorner(d, d) = Matrix::Identity(d, d);

    const auto image_projector = [&](const Matrix& cols) {
      if (cols.cols() == 0) return Matrix(Matrix::Zero(2 * d, 2 * d));
      Eigen::ColPivHouseholderQR<Matrix> qr(cols);
      qr.setThreshold(1e-10);
      const Matrix q = qr.householderQ();
      const Matrix img = q.leftCols(qr.rank());
      return Matrix(img * img.adjoint());
    };

    const double shift_dev =
        (shift(a, lambda).graph().projector() - image_projector(Matrix(block * basis))).norm();
    const double refl_dev =
        (invert(a).reflected.graph().projector() - image_projector(Matrix(swap * basis)))
            .norm();
    worst_subspace = std::max({worst_subspace, shift_dev, refl_dev});

    // Resolvent against a brute-force pair solve on m-sectorial instances.
    if (d >= 1) {
      const LinearRelation ms = gen::m_sectorial_relation(rng, h, 0.7);
      const Matrix r1 = resolvent(ms, Complex(-1.0));
      const Matrix x = ms.first_block();
      const Matrix y = ms.second_block();
      // Solve (A + I) c = f columnwise: y + x applied to coordinates.
      const Matrix lhs = y + x;
      for (int probe = 0; probe < 3; ++probe) {
        const Vector f = rng.cnormal_vector(d);
        const Vector coeffs = lhs.completeOrthogonalDecomposition().solve(f);
        const Vector residual = lhs * coeffs - f;
        if (residual.norm() > 1e-9 * f.norm()) continue;  // f outside the range
        const Vector u_oracle = x * coeffs;
        worst_resolvent = std::max(worst_resolvent, (r1 * f - u_oracle).norm());
      }
      const Matrix r2 = resolvent(ms, Complex(-2.0));
      const Matrix identity_gap = (r1 - r2) - (Complex(-1.0) - Complex(-2.0)) * r1 * r2;
      worst_identity = std::max(worst_identity, identity_gap.norm());
    }
  }
  c.require(worst_subspace <= 1e-9,
            "subspace computations deviate by " + fmt(worst_subspace));
  c.require(worst_resolvent <= 1e-9, "resolvent deviates by " + fmt(worst_resolvent));
  c.require(worst_identity <= 1e-8, "resolvent identity off by " + fmt(worst_identity));
  return {"graph-algebra-oracle", "graph algebra agrees with brute-force computations", c.pass,
          c.pass ? "deviations " + fmt(worst_subspace) + "/" + fmt(worst_resolvent) + "/" +
                       fmt(worst_identity)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 9. sector-calculus: the sector Cauchy-Schwarz bound never fails and the
//    canonical parameters are invariant under re-basing.
CriterionResult sector_calculus(const Options& opt) {
  Check c;
  double worst_cs = 0.0, worst_param_dev = 0.0;

  for (int i = 0; i < 200; ++i) {
    Rng rng = Rng::derived(opt.seed, 900 + i);
    const int d = static_cast<int>(rng.uniform_int(1, 6));
    HSpace h(d);
    const Index dom_dim = rng.uniform_int(1, d);
    const SesqForm b = gen::vertex0_form(rng, h, dom_dim, 1.0);

    for (int s = 0; s < 50; ++s) {
      const Vector u = b.domain().embed(rng.cnormal_vector(b.domain().dim()));
      const Vector v = b.domain().embed(rng.cnormal_vector(b.domain().dim()));
      const auto [lhs, rhs] = sector_cs_bound(b, u, v);
      worst_cs = std::max(worst_cs, lhs - rhs);
    }

    // Basis invariance of the canonical decision and parameters.
    const Matrix mix = rng.cnormal_matrix(b.domain().dim(), b.domain().dim());
    const Subspace dom2 = Subspace::orthonormalize(h, Matrix(b.domain().basis() * mix));
    if (dom2.dim() != b.domain().dim()) continue;
    const Matrix x = b.domain().basis().adjoint() * h.gram() * dom2.basis();
    const SesqForm b2(dom2, Matrix(x.adjoint() * b.coeff() * x));
    if (b.is_sectorial() != b2.is_sectorial()) {
      c.require(false, "canonical sector decision changed under re-basing");
      continue;
    }
    if (b.is_sectorial()) {
      worst_param_dev = std::max(worst_param_dev,
                                 std::abs(b.sector()->vertex - b2.sector()->vertex));
      const double scale = 1.0 + b.sector()->tan_theta;
      worst_param_dev =
          std::max(worst_param_dev,
                   std::abs(b.sector()->tan_theta - b2.sector()->tan_theta) / scale);
    }
  }
  c.require(worst_cs <= 1e-10, "sector bound violated by " + fmt(worst_cs));
  c.require(worst_param_dev <= 1e-8, "parameters moved by " + fmt(worst_param_dev));
  return {"sector-calculus", "sector bound and basis invariance over seeded forms", c.pass,
          c.pass ? "worst bound slack " + fmt(worst_cs) + ", param deviation " +
                       fmt(worst_param_dev)
                 : c.detail.str()};
}

// ---------------------------------------------------------------------------
// 10. csv-determinism: identical (config, seed) produce byte-identical CSV.
CriterionResult csv_determinism(const Options& opt) {
  Check c;
  ScenarioConfig config;
  config.kind = "example43";
  config.dimension = 3;
  config.seed = opt.seed;
  config.schedule = {16, 64, 256, 1024, 4096};
  config.t_values = {1.0};
  const std::string first = emit_csv(run_scenario(config));
  const std::string second = emit_csv(run_scenario(config));
  c.require(!first.empty(), "empty CSV");
  c.require(first == second, "two runs differ");
  return {"csv-determinism", "repeated scenario runs emit identical bytes", c.pass,
          c.pass ? std::to_string(first.size()) + " bytes, identical" : c.detail.str()};
}

}  // namespace

std::vector<CriterionResult> run_battery(const Options& options) {
  using Runner = CriterionResult (*)(const Options&);
  const std::vector<std::pair<std::string, Runner>> runners = {
      {"example43-exact", example43_exact},
      {"example43-no-projection", example43_no_projection},
      {"series-resolvent-convergence", series_resolvent_convergence},
      {"kato-simon-monotone", kato_simon_monotone},
      {"semigroup-resolvent-oracle", semigroup_resolvent_oracle},
      {"bounded-absorption-product", bounded_absorption_product},
      {"tower-bound", tower_bound},
      {"graph-algebra-oracle", graph_algebra_oracle},
      {"sector-calculus", sector_calculus},
      {"csv-determinism", csv_determinism},
  };

  std::vector<CriterionResult> results;
  for (const auto& [id, run] : runners) {
    if (!options.filter.empty() && id.find(options.filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = run(options);
    } catch (const std::exception& e) {
      // A crashed criterion is a failed criterion.
      result.id = id;
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(result));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  if (results.empty()) return false;
  for (const CriterionResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace sectoria::acceptance
