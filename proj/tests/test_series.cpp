#include <doctest.h>

#include <cmath>

#include "sectoria/scenario.hpp"
#include "sectoria/semigroups.hpp"
#include "sectoria/series.hpp"

using namespace sectoria;

TEST_CASE("partial sums follow the tail rule") {
  HSpace h(2);
  const SesqForm zero = SesqForm::zero(h);
  const SesqForm id = SesqForm::identity(h);
  Rng rng(0x9A);
  const Vector u = rng.cnormal_vector(2), v = rng.cnormal_vector(2);

  // All-zero heads: every partial sum equals the first one.
  const FormSequence zeros({zero, zero}, ZeroTail{});
  for (long n : {1L, 2L, 7L})
    CHECK(std::abs(evaluate(zeros.partial_sum(n), u, v)) <= 1e-14);

  // Constant tail b2 = b1: a_2 = 2 b_1.
  const FormSequence constant({id}, ConstantTail{});
  CHECK(std::abs(evaluate(constant.partial_sum(2), u, v) -
                 evaluate(scale(id, 2.0), u, v)) <= 1e-13);

  // Geometric(1/2) tail contributes exactly +1 b_N in the limit.
  const FormSequence geo({id}, GeometricTail{0.5});
  const SesqForm a_inf = limit_form(geo);
  CHECK(std::abs(evaluate(a_inf, u, v) - evaluate(scale(id, 2.0), u, v)) <= 1e-13);
}

TEST_CASE("partial-sum graphs have intersected domains") {
  Rng rng(0xD0);
  HSpace h(4);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<SesqForm> head;
    for (int k = 0; k < 3; ++k)
      head.push_back(gen::vertex0_form(rng, h, rng.uniform_int(2, 4), 0.8));
    const FormSequence seq(head, ZeroTail{});
    const auto graphs = partial_sum_graphs(seq, 3);
    REQUIRE(graphs.size() == 3);
    Subspace expected = head[0].domain();
    for (int k = 1; k < 3; ++k) {
      expected = intersect(expected, head[static_cast<size_t>(k)].domain());
      CHECK(domain(graphs[static_cast<size_t>(k)]).equals(expected));
    }
  }
}

TEST_CASE("limit form of a constant tail restricts to the vanishing set") {
  HSpace h(2);
  // Rank-one nonnegative form: b(u) = |u_1 + u_2|^2 / 2.
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  const SesqForm b(Subspace::full(h), m);
  const FormSequence seq({b}, ConstantTail{});
  const SesqForm a_inf = limit_form(seq);
  CHECK(a_inf.domain().dim() == 1);
  Vector kernel(2);
  kernel << 1.0, -1.0;
  CHECK(a_inf.domain().contains_vector(kernel));

  // Positive definite constant tail: the domain collapses to zero and the
  // limit graph is {0} x H.
  const FormSequence seq2({SesqForm::identity(h)}, ConstantTail{});
  const SesqForm a_inf2 = limit_form(seq2);
  CHECK(a_inf2.domain().dim() == 0);
  CHECK(relation_equal(graph_of_closed_form(a_inf2),
                       LinearRelation::zero_domain_full_range(h)));
}

TEST_CASE("limit forms stay sectorial with vertex 0 and the common bound") {
  Rng rng(0x1AB);
  HSpace h(4);
  for (int trial = 0; trial < 10; ++trial) {
    const TailRule tail = (trial % 3 == 0) ? TailRule(ZeroTail{})
                          : (trial % 3 == 1)
                              ? TailRule(ConstantTail{})
                              : TailRule(GeometricTail{0.5});
    const FormSequence seq = gen::form_sequence(rng, h, 3, 1.0, tail);
    const SesqForm a_inf = limit_form(seq);
    const auto tan0 = tan_semi_angle_at_vertex(a_inf, 0.0);
    REQUIRE(tan0.has_value());
    CHECK(*tan0 <= seq.common_tan_theta() + 1e-8);
  }
}

TEST_CASE("zero tails converge exactly beyond the head") {
  Rng rng(0x2B);
  HSpace h(3);
  const FormSequence seq = gen::form_sequence(rng, h, 2, 0.9, ZeroTail{});
  std::vector<long> schedule{2, 4, 16, 64};
  const SeriesLimit limit = limit_graph_and_convergence(seq, schedule);
  for (size_t i = 1; i < limit.report.errors.size(); ++i)
    CHECK(limit.report.errors[i] <= 1e-12);
  CHECK(limit.norm_bound_slack >= -1e-10);
  CHECK(limit.energy_bound_slack >= -1e-10);
}

TEST_CASE("constant tails converge to the restricted graph at rate 1/n") {
  Rng rng(0x2C);
  HSpace h(3);
  std::vector<SesqForm> head{gen::vertex0_form(rng, h, 3, 0.4)};
  Matrix rank_one = gen::vertex0_coeff(rng, 3, 0.0, 1);
  head.push_back(SesqForm(Subspace::full(h), rank_one));
  const FormSequence seq(head, ConstantTail{});

  std::vector<long> schedule{16, 64, 256, 1024};
  const SeriesLimit limit = limit_graph_and_convergence(seq, schedule);
  // Direct computation against n = 2^10 confirms convergence with the
  // expected first-order rate.
  CHECK(limit.report.errors.back() <= 10.0 / 1024.0);
  CHECK(limit.report.fitted_rate <= -0.8);
  CHECK(limit.norm_bound_slack >= -1e-10);
  CHECK(limit.energy_bound_slack >= -1e-10);
}

TEST_CASE("resolvents of vertex-0 partial sums are contractions") {
  Rng rng(0x2D);
  HSpace h(4);
  const FormSequence seq = gen::form_sequence(rng, h, 3, 0.8, GeometricTail{0.6});
  for (long n : {1L, 3L, 9L}) {
    const Matrix r = resolvent(graph_of_closed_form(seq.partial_sum(n)), Complex(-1.0));
    CHECK(h.operator_norm(r) <= 1.0 + 1e-10);
  }
}

TEST_CASE("tower levels carry the weighted norms") {
  HSpace h(2);
  // Single zero head form: ||u||_1^2 = 2^{-1} ||u||^2.
  const FormSequence seq({SesqForm::zero(h)}, ZeroTail{});
  const Tower tower = build_tower(seq, 1);
  Rng rng(0x70);
  for (int i = 0; i < 5; ++i) {
    const Vector u = rng.cnormal_vector(2);
    const Vector q1 = tower.level_coords(1, u);
    CHECK(tower.level_space(1).norm(q1) ==
          doctest::Approx(std::sqrt(0.5) * h.norm(u)).epsilon(1e-12));
    // Phi_{n0} q_n(u) = u.
    const Vector back = tower.level_domain(0).embed(Vector(tower.phi(1, 0) * q1));
    CHECK(h.norm(Vector(back - u)) <= 1e-12);
  }
}

TEST_CASE("tower norm identity and transfer consistency") {
  Rng rng(0x71);
  HSpace h(4);
  for (int trial = 0; trial < 5; ++trial) {
    const TailRule tail = trial % 2 == 0 ? TailRule(ConstantTail{}) : TailRule(ZeroTail{});
    const FormSequence seq = gen::form_sequence(rng, h, 3, 0.9, tail);
    const Tower tower = build_tower(seq, 3);

    for (int n = 0; n <= 3; ++n) {
      const Index kn = tower.level_space(n).dim();
      for (int rep = 0; rep < 4; ++rep) {
        const Vector u = rng.cnormal_vector(kn);
        // ||u||_{V_n}^2 = sum_k 2^{-(n-k)} Re b~_{nk}(u).
        double expected = 0.0;
        for (int k = 0; k <= n; ++k) {
          const Matrix& b = tower.lifted_form(n, k);
          expected += std::ldexp(((u.adjoint() * b * u)(0, 0)).real(), -(n - k));
        }
        const double got = std::pow(tower.level_space(n).norm(u), 2);
        CHECK(got == doctest::Approx(expected).epsilon(1e-10).scale(1.0));

        // b~_{nk}(u) = b~_{mk}(Phi_{nm} u) for k <= m <= n.
        for (int m_lvl = 0; m_lvl <= n; ++m_lvl) {
          const Vector moved = tower.phi(n, m_lvl) * u;
          for (int k = 0; k <= m_lvl; ++k) {
            const Complex lhs = (u.adjoint() * tower.lifted_form(n, k) * u)(0, 0);
            const Complex rhs = (moved.adjoint() * tower.lifted_form(m_lvl, k) * moved)(0, 0);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
          }
        }
      }
    }
  }
}

TEST_CASE("tower injections reproduce the form values") {
  Rng rng(0x72);
  HSpace h(3);
  const FormSequence seq = gen::form_sequence(rng, h, 2, 0.8, ZeroTail{});
  const Tower tower = build_tower(seq, 2);
  const SesqForm a2 = seq.partial_sum(2);

  for (int i = 0; i < 8; ++i) {
    const Vector x = rng.cnormal_vector(a2.domain().dim());
    const Vector u = a2.domain().embed(x);
    const Vector tuple = tower.inject(2, tower.level_coords(2, u));
    // hat a_2 (I_2 q_2 u) = a_2(u).
    const Complex lifted = (tuple.adjoint() * tower.hat_a(2) * tuple)(0, 0);
    const Complex direct = evaluate(a2, u);
    CHECK(std::abs(lifted - direct) <= 1e-9 * (1.0 + std::abs(direct)));
    // j (I_2 q_2 u) = u.
    const Vector back = tower.level_domain(0).embed(tower.project(0, tuple));
    CHECK(h.norm(Vector(back - u)) <= 1e-10);
  }
}

TEST_CASE("truncations keep compatible prefixes and form values") {
  Rng rng(0x73);
  HSpace h(3);
  const FormSequence seq = gen::form_sequence(rng, h, 3, 0.7, ConstantTail{});
  const Tower tower = build_tower(seq, 3);

  for (int n = 1; n <= 3; ++n) {
    const Index kn = tower.level_space(n).dim();
    for (int rep = 0; rep < 3; ++rep) {
      const Vector u = rng.cnormal_vector(kn);
      const Vector w_n = tower.inject(n, u);
      for (int m = 0; m <= n; ++m) {
        const Vector truncated = tower.truncate(m, w_n);
        // T_m(W_n) lies in W_m.
        CHECK(tower.w(m).contains_vector(truncated));
        // hat a_m(T_m u) = hat a_m(u).
        const Complex lhs = (truncated.adjoint() * tower.hat_a(m) * truncated)(0, 0);
        const Complex rhs = (w_n.adjoint() * tower.hat_a(m) * w_n)(0, 0);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("constant elliptic tails make the transfer maps bijective") {
  Rng rng(0x78);
  HSpace h(3);
  // Full-domain positive definite absorbed form: all level domains agree
  // and every transfer map between levels n >= m >= 1 is a bijection.
  std::vector<SesqForm> head{
      SesqForm(Subspace::full(h), gen::vertex0_coeff(rng, 3, 0.5, 3)),
      SesqForm(Subspace::full(h),
               Matrix(gen::vertex0_coeff(rng, 3, 0.5, 3) + Matrix::Identity(3, 3)))};
  const FormSequence seq(head, ConstantTail{});
  const Tower tower = build_tower(seq, 4);

  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= n; ++m) {
      const Matrix& phi = tower.phi(n, m);
      REQUIRE(phi.rows() == phi.cols());
      const auto sv = phi.jacobiSvd().singularValues();
      CHECK(sv(sv.size() - 1) > 1e-6);  // condition-number certificate
    }
    // Two-sided comparison of the weighted norms along the transfers:
    // 2^{-(n-1)} ||u||_1^2 <= ||u||_n^2 on the common domain.
    for (int rep = 0; rep < 5; ++rep) {
      const Vector u = rng.cnormal_vector(tower.level_space(n).dim());
      const Vector down = tower.phi(n, 1) * u;
      const double lhs = std::ldexp(std::pow(tower.level_space(1).norm(down), 2), -(n - 1));
      const double rhs = std::pow(tower.level_space(n).norm(u), 2);
      CHECK(lhs <= rhs * (1.0 + 1e-10) + 1e-12);
    }
  }
}

TEST_CASE("tower element checks: canonical members and broken levels") {
  Rng rng(0x74);
  HSpace h(4);
  const FormSequence seq = gen::form_sequence(rng, h, 2, 0.8, GeometricTail{0.5});
  const Tower tower = build_tower(seq, 2);
  const SesqForm a_inf = limit_form(seq);

  for (int i = 0; i < 10; ++i) {
    const Vector x = rng.cnormal_vector(a_inf.domain().dim());
    const Vector u = a_inf.domain().embed(x);
    std::vector<Vector> element;
    for (int n = 0; n <= 2; ++n) element.push_back(tower.level_coords(n, u));
    const auto ok = check_tower_element(tower, element);
    CHECK(ok.compatible);
    CHECK(ok.bound_holds);
    CHECK(ok.slack >= -1e-10);

    // Breaking one level destroys compatibility.
    if (element[1].size() > 0) {
      element[1] += Vector::Ones(element[1].size());
      CHECK_FALSE(check_tower_element(tower, element).compatible);
    }
  }
}

TEST_CASE("random compatible towers satisfy the bound with nonnegative slack") {
  Rng rng(0x75);
  HSpace h(3);
  const FormSequence seq = gen::form_sequence(rng, h, 3, 0.9, GeometricTail{0.5});
  const Tower tower = build_tower(seq, 3);
  const Index top = tower.level_space(3).dim();
  for (int i = 0; i < 100; ++i) {
    const Vector u = rng.cnormal_vector(top);
    std::vector<Vector> element;
    for (int n = 0; n <= 3; ++n) element.push_back(tower.phi(3, n) * u);
    const auto ok = check_tower_element(tower, element);
    CHECK(ok.compatible);
    CHECK(ok.bound_holds);
    CHECK(ok.slack >= -1e-10);
  }
}

TEST_CASE("limit domain inclusion and single-valuedness") {
  Rng rng(0x76);
  HSpace h(3);

  // Zero tail with full-domain head: dense domain, single-valued limit.
  const FormSequence dense({SesqForm::identity(h)}, ZeroTail{});
  CHECK(limit_domain_inclusion(dense));

  // Rank-one constant tail: the domain is a line, inclusion still holds.
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  HSpace h2(2);
  const FormSequence line({SesqForm(Subspace::full(h2), m)}, ConstantTail{});
  CHECK(limit_domain_inclusion(line));

  // Positive definite constant tail: trivial domain, multivalued limit.
  const FormSequence collapse({SesqForm::identity(h2)}, ConstantTail{});
  CHECK(limit_domain_inclusion(collapse));
}

TEST_CASE("stationary sequences from the monotone symmetric regime converge") {
  Rng rng(0x77);
  HSpace h(3);
  const FormSequence seq = gen::form_sequence(rng, h, 3, 0.0, ZeroTail{}, /*hermitian=*/true);
  // Monotonicity of the energies on the common domain.
  const SesqForm a1 = seq.partial_sum(1);
  const SesqForm a3 = seq.partial_sum(3);
  for (int i = 0; i < 10; ++i) {
    const Vector x = rng.cnormal_vector(a3.domain().dim());
    const Vector u = a3.domain().embed(x);
    CHECK(evaluate(a1, u).real() <= evaluate(a3, u).real() + 1e-10);
  }
  std::vector<long> schedule{2, 8, 32};
  const SeriesLimit limit = limit_graph_and_convergence(seq, schedule);
  CHECK(limit.report.errors.back() <= 1e-10);
}
