#include <doctest.h>

#include <cmath>

#include "sectoria/forms.hpp"
#include "sectoria/rng.hpp"

using namespace sectoria;

namespace {

Vector e(int d, int i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return v;
}

// Brute-force sector oracle on the unit sphere of the domain coordinates:
// samples gamma as the smallest Re value and the semi-angle as the largest
// ratio |Im| / (Re - gamma).  One-sided by construction.
struct SampledSector {
  double gamma;      // smallest sampled Re value
  double tan_theta;  // largest sampled |Im| / (Re - vertex)
};

SampledSector sample_sector(const Matrix& m, double vertex, int samples, Rng& rng) {
  SampledSector out{1e300, 0.0};
  for (int i = 0; i < samples; ++i) {
    Vector x = rng.cnormal_vector(m.rows());
    x /= x.norm();
    const Complex val = (x.adjoint() * m * x)(0, 0);
    out.gamma = std::min(out.gamma, val.real());
    const double denom = val.real() - vertex;
    if (denom > 1e-9) out.tan_theta = std::max(out.tan_theta, std::abs(val.imag()) / denom);
  }
  return out;
}

// Vertex-0 sectorial coefficient matrix with semi-angle at most
// atan(max_tan): R + i R^{1/2} S0 R^{1/2} with Hermitian ||S0|| <= max_tan.
// With rank < k the Hermitian part is singular and the numerical range has
// a corner at 0, so the canonical (maximal-vertex) parameters exist.
Matrix random_vertex0_coeff(Rng& rng, int k, double max_tan, int rank = -1) {
  if (rank < 0) rank = k;
  const Matrix c = rng.cnormal_matrix(rank, k);
  const Matrix r = c.adjoint() * c;
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  const Matrix sqrt_r = es.eigenvectors() *
                        es.eigenvalues().array().max(0.0).sqrt().matrix().asDiagonal() *
                        es.eigenvectors().adjoint();
  Matrix s0 = rng.cnormal_matrix(k, k);
  s0 = 0.5 * (s0 + s0.adjoint().eval());
  const double ns = s0.jacobiSvd().singularValues()(0);
  if (ns > 0) s0 *= (max_tan * rng.uniform()) / ns;
  return r + Complex(0, 1) * (sqrt_r * s0 * sqrt_r);
}

}  // namespace

TEST_CASE("evaluate on simple forms") {
  HSpace h(2);
  const SesqForm id = SesqForm::identity(h);
  CHECK(std::abs(evaluate(id, e(2, 0), e(2, 0)) - Complex(1.0)) <= 1e-14);

  const SesqForm zero = SesqForm::zero(h);
  Rng rng(7);
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(evaluate(zero, rng.cnormal_vector(2), rng.cnormal_vector(2))) <= 1e-14);
  }

  const Subspace line = Subspace::orthonormalize(h, e(2, 0));
  const SesqForm a(line, Matrix::Constant(1, 1, Complex(1.0, 1.0)));
  CHECK(std::abs(evaluate(a, e(2, 0), e(2, 0)) - Complex(1.0, 1.0)) <= 1e-14);
  CHECK_THROWS_AS(evaluate(a, e(2, 1), e(2, 0)), DomainViolation);
}

TEST_CASE("evaluate is sesquilinear") {
  Rng rng(0x5E5);
  HSpace h(4);
  const SesqForm a = SesqForm::from_operator(h, rng.cnormal_matrix(4, 4));
  const Vector u = rng.cnormal_vector(4), v = rng.cnormal_vector(4), w = rng.cnormal_vector(4);
  const Complex s(0.3, -1.2);
  CHECK(std::abs(evaluate(a, Vector(s * u + w), v) - s * evaluate(a, u, v) - evaluate(a, w, v)) <=
        1e-12);
  CHECK(std::abs(evaluate(a, u, Vector(s * v + w)) - std::conj(s) * evaluate(a, u, v) -
                 evaluate(a, u, w)) <= 1e-12);
}

TEST_CASE("canonical sector parameters of simple forms") {
  HSpace h1(1);
  const SesqForm id = SesqForm::identity(HSpace(2));
  REQUIRE(id.is_sectorial());
  CHECK(id.sector()->vertex == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.sector()->tan_theta <= 1e-12);

  // Purely imaginary form: Re vanishes identically but Im does not, so no
  // sector with the maximal vertex exists.
  const SesqForm imag(Subspace::full(h1), Matrix::Constant(1, 1, Complex(0.0, 1.0)));
  CHECK_FALSE(imag.is_sectorial());
  // At any strictly smaller vertex the form is sectorial.
  CHECK(tan_semi_angle_at_vertex(imag, -1.0).has_value());
  CHECK(*tan_semi_angle_at_vertex(imag, -1.0) == doctest::Approx(1.0).epsilon(1e-9));

  // 1 + i: maximal vertex would be 1, where the ratio is unbounded.
  const SesqForm onepi(Subspace::full(h1), Matrix::Constant(1, 1, Complex(1.0, 1.0)));
  CHECK_FALSE(onepi.is_sectorial());
  CHECK(*tan_semi_angle_at_vertex(onepi, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled sector oracle confirms the canonical parameters") {
  Rng rng(0x0AC1E);
  for (int trial = 0; trial < 10; ++trial) {
    // Singular Hermitian part: the numerical range has a corner at 0, the
    // canonical vertex.
    const Matrix m = random_vertex0_coeff(rng, 4, 0.8, /*rank=*/2);
    const SesqForm a(Subspace::full(HSpace(4)), m);
    REQUIRE(a.is_sectorial());
    const auto p = *a.sector();
    CHECK(std::abs(p.vertex) <= 1e-9);

    Rng sampler(0xBEEF + trial);
    const SampledSector s = sample_sector(m, p.vertex, 4000, sampler);
    // Sampling can only shrink the sector.
    CHECK(s.gamma >= p.vertex - 1e-9);
    CHECK(s.tan_theta <= p.tan_theta + 1e-8);

    // Every sample satisfies the membership inequality.
    for (int i = 0; i < 2000; ++i) {
      Vector x = sampler.cnormal_vector(4);
      x /= x.norm();
      const Complex val = (x.adjoint() * m * x)(0, 0);
      CHECK(val.real() >= p.vertex - 1e-10);
      CHECK(std::abs(val.imag()) <= p.tan_theta * (val.real() - p.vertex) + 1e-10);
    }
  }

  // A strictly positive shift moves the maximal vertex to where the
  // numerical range has no corner: the canonical decision is NotSectorial,
  // while every smaller vertex still works.
  Matrix shifted = random_vertex0_coeff(rng, 4, 0.8, /*rank=*/2);
  shifted += 0.1 * Matrix::Identity(4, 4);
  const SesqForm b(Subspace::full(HSpace(4)), shifted);
  if (!b.is_sectorial()) {
    CHECK(tan_semi_angle_at_vertex(b, 0.0).has_value());
  }
}

TEST_CASE("sector tightness against dense sampling in small dimension") {
  Rng rng(0x712);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_vertex0_coeff(rng, 2, 1.0, /*rank=*/1);
    const SesqForm a(Subspace::full(HSpace(2)), m);
    REQUIRE(a.is_sectorial());
    Rng sampler(0xD15C + trial);
    const SampledSector s = sample_sector(m, a.sector()->vertex, 60000, sampler);
    CHECK(s.gamma <= a.sector()->vertex + 0.05 * m.norm());
    // Round-off in near-kernel denominators inflates sampled ratios by a
    // whisker; allow a small relative slack.
    CHECK(s.tan_theta <= a.sector()->tan_theta * (1.0 + 1e-5) + 1e-8);
    CHECK(s.tan_theta >= 0.8 * a.sector()->tan_theta - 1e-8);
  }
}

TEST_CASE("sector parameters are invariant under domain re-basing") {
  Rng rng(0x5EED);
  HSpace h(5);
  for (int trial = 0; trial < 8; ++trial) {
    const Subspace dom = rng.random_subspace(h, 3);
    const int rank = 1 + static_cast<int>(trial % 2);  // singular Hermitian part
    const SesqForm a(dom, random_vertex0_coeff(rng, 3, 0.7, rank));

    // Re-span the same subspace from shuffled random combinations.
    const Matrix mix = rng.cnormal_matrix(3, 3);
    const Subspace dom2 = Subspace::orthonormalize(h, dom.basis() * mix);
    REQUIRE(dom2.equals(dom));
    const Matrix x = dom.basis().adjoint() * h.gram() * dom2.basis();
    const SesqForm b(dom2, x.adjoint() * a.coeff() * x);

    CHECK(a.is_sectorial() == b.is_sectorial());
    if (a.is_sectorial() && b.is_sectorial()) {
      CHECK(b.sector()->vertex == doctest::Approx(a.sector()->vertex).epsilon(1e-8).scale(1.0));
      CHECK(b.sector()->tan_theta ==
            doctest::Approx(a.sector()->tan_theta).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("add and scale") {
  HSpace h(2);
  const SesqForm id = SesqForm::identity(h);
  const SesqForm zero = SesqForm::zero(h);
  Rng rng(0xADD);
  const Vector u = rng.cnormal_vector(2), v = rng.cnormal_vector(2);

  CHECK(std::abs(evaluate(add(id, zero), u, v) - evaluate(id, u, v)) <= 1e-13);
  CHECK(std::abs(evaluate(add(id, id), u, v) - evaluate(scale(id, 2.0), u, v)) <= 1e-13);

  const Subspace l1 = Subspace::orthonormalize(h, e(2, 0));
  const Subspace l2 = Subspace::orthonormalize(h, e(2, 1));
  const SesqForm a1(l1, Matrix::Identity(1, 1));
  const SesqForm a2(l2, Matrix::Identity(1, 1));
  CHECK(add(a1, a2).domain().dim() == 0);

  CHECK_THROWS_AS(scale(id, -1.0), Error);
}

TEST_CASE("add is commutative and associative on the common domain") {
  Rng rng(0xCACA);
  HSpace h(4);
  for (int trial = 0; trial < 5; ++trial) {
    const SesqForm a(rng.random_subspace(h, 3), rng.cnormal_matrix(3, 3));
    const SesqForm b(rng.random_subspace(h, 3), rng.cnormal_matrix(3, 3));
    const SesqForm c(rng.random_subspace(h, 2), rng.cnormal_matrix(2, 2));

    const SesqForm ab = add(a, b);
    const SesqForm ba = add(b, a);
    const SesqForm abc1 = add(ab, c);
    const SesqForm abc2 = add(a, add(b, c));

    const Subspace common = abc1.domain();
    for (int i = 0; i < 6; ++i) {
      const Vector x = common.embed(rng.cnormal_vector(common.dim()));
      const Vector y = common.embed(rng.cnormal_vector(common.dim()));
      CHECK(std::abs(evaluate(ab, x, y) - evaluate(ba, x, y)) <= 1e-10);
      CHECK(std::abs(evaluate(abc1, x, y) - evaluate(abc2, x, y)) <= 1e-10);
    }
  }
}

TEST_CASE("graph norm") {
  HSpace h(2);
  Rng rng(0x6A);
  const Vector u = rng.cnormal_vector(2);

  const SesqForm zero = SesqForm::zero(h);  // vertex 0
  CHECK(graph_norm(zero, u) == doctest::Approx(h.norm(u)).epsilon(1e-12));

  const SesqForm id = SesqForm::identity(h);  // vertex 1
  CHECK(graph_norm(id, u) == doctest::Approx(h.norm(u)).epsilon(1e-12));

  // M = [[2]] on span{e1} in C^2: vertex 2, graph norm sqrt(2 + (1-2)) = 1.
  const Subspace line = Subspace::orthonormalize(h, e(2, 0));
  const SesqForm two(line, Matrix::Constant(1, 1, Complex(2.0)));
  REQUIRE(two.sector()->vertex == doctest::Approx(2.0));
  CHECK(graph_norm(two, e(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Hermitian and skew parts reproduce Re and Im of the form") {
  Rng rng(0x4E);
  HSpace h(4);
  const SesqForm a = SesqForm::from_operator(h, rng.cnormal_matrix(4, 4));
  for (int i = 0; i < 10; ++i) {
    const Vector u = rng.cnormal_vector(4);
    const Vector x = a.domain().coords(u);
    const Complex val = evaluate(a, u);
    const double re = ((x.adjoint() * a.hermitian_part() * x)(0, 0)).real();
    const double im = ((x.adjoint() * a.skew_part() * x)(0, 0)).real();
    CHECK(std::abs(val.real() - re) <= 1e-10);
    CHECK(std::abs(val.imag() - im) <= 1e-10);
  }
}

TEST_CASE("sector Cauchy-Schwarz bound") {
  HSpace h(3);
  Rng rng(0xC5);

  // Symmetric PSD, u = v: equality against (1+0) Re b(u).
  const Matrix c = rng.cnormal_matrix(3, 3);
  const SesqForm psd(Subspace::full(h), Matrix(c.adjoint() * c));
  const Vector u = rng.cnormal_vector(3);
  const auto [lhs, rhs] = sector_cs_bound(psd, u, u);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  // Orthogonal vectors of a diagonal PSD form.
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  const SesqForm dform(Subspace::full(HSpace(2)), diag);
  const auto [l2, r2] = sector_cs_bound(dform, e(2, 0), e(2, 1));
  CHECK(l2 <= 1e-14);
  CHECK(r2 >= 0.0);

  // Randomized property check at semi-angle pi/4.
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_vertex0_coeff(rng, 3, 1.0);
    const SesqForm b(Subspace::full(h), m);
    for (int i = 0; i < 500; ++i) {
      const Vector x = rng.cnormal_vector(3), y = rng.cnormal_vector(3);
      const auto [a1, a2] = sector_cs_bound(b, x, y);
      CHECK(a1 <= a2 + 1e-10 * std::max(1.0, a2));
    }
  }
}

TEST_CASE("vertex-0 forms vanish where their real part vanishes") {
  Rng rng(0xF00);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_vertex0_coeff(rng, 4, 0.9, /*rank=*/2);
    const SesqForm b(Subspace::full(HSpace(4)), m);
    const Matrix null = kernel_basis(b.hermitian_part(), 1e-10);
    for (Index j = 0; j < null.cols(); ++j) {
      const Vector u = null.col(j);
      CHECK(std::abs(evaluate(b, u)) <= 1e-10);
    }
  }
}

TEST_CASE("form bound constants") {
  Rng rng(0xB0);
  HSpace h(3);

  // b = a symmetric PSD: (1, 0) is feasible.
  const Matrix c = rng.cnormal_matrix(3, 3);
  const SesqForm a(Subspace::full(h), Matrix(c.adjoint() * c));
  CHECK(form_bound_feasible(a, a, 1.0, 0.0));
  const auto ba = form_bound_constants(a, a);
  REQUIRE(ba.has_value());
  CHECK(form_bound_feasible(a, a, ba->c1, ba->c2));

  // b = 0: (0, 0).
  const SesqForm zero = SesqForm::zero(h);
  const auto bz = form_bound_constants(a, zero);
  REQUIRE(bz.has_value());
  CHECK(bz->c1 == 0.0);
  CHECK(bz->c2 <= 1e-12);

  // b from an operator with ||B|| = 3: (0, 3) feasible.
  Matrix bop = rng.cnormal_matrix(3, 3);
  bop *= 3.0 / bop.jacobiSvd().singularValues()(0);
  const SesqForm b = SesqForm::from_operator(h, bop);
  CHECK(form_bound_feasible(a, b, 0.0, 3.0 + 1e-9));
  const auto bb = form_bound_constants(a, b);
  REQUIRE(bb.has_value());
  CHECK(form_bound_feasible(a, b, bb->c1, bb->c2));

  // Oracle: the returned constants dominate |b(u)| on random samples.
  for (int i = 0; i < 300; ++i) {
    const Vector u = rng.cnormal_vector(3);
    const double lhs = std::abs(evaluate(b, u));
    const double rhs = bb->c1 * evaluate(a, u).real() + bb->c2 * std::pow(h.norm(u), 2);
    CHECK(lhs <= rhs + 1e-8 * std::max(1.0, rhs));
  }
}
