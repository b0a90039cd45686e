#include "sectoria/absorption.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sectoria/semigroups.hpp"

namespace sectoria {

namespace {

Matrix hermitian_of(const Matrix& m) { return 0.5 * (m + m.adjoint().eval()); }

Matrix g_calibrated(const HSpace& h, const Matrix& m) {
  if (h.standard()) return m;
  return h.gram_factor().adjoint() * m;
}

}  // namespace

AbsorptionProblem::AbsorptionProblem(RepresentedForm base, Matrix absorbed,
                                     std::optional<BoundConstants> bounds)
    : base_(std::move(base)), absorbed_(std::move(absorbed)), bounds_(bounds) {
  if (absorbed_.rows() != base_.aux().dim() || absorbed_.cols() != base_.aux().dim())
    throw DimensionMismatch("AbsorptionProblem: absorbed form must live on the auxiliary space");
  if (!detail::quadratic_tan_at_vertex(absorbed_, 0.0, base_.tol()))
    throw NotSectorialError("AbsorptionProblem: absorbed form must have vertex 0");
}

AbsorptionProblem AbsorptionProblem::from_forms(const SesqForm& a, const SesqForm& b) {
  if (!a.domain().equals(b.domain()))
    throw DomainViolation("AbsorptionProblem: forms must share their domain");
  RepresentedForm base = wrap_form(a);
  const Matrix x = b.domain().basis().adjoint() * b.space().gram() * a.domain().basis();
  Matrix absorbed = x.adjoint() * b.coeff() * x;
  AbsorptionProblem p(std::move(base), std::move(absorbed));
  return p.with_bounds(p.compute_bounds());
}

AbsorptionProblem AbsorptionProblem::with_bounds(BoundConstants bounds) const {
  return AbsorptionProblem(base_, absorbed_, bounds);
}

BoundConstants AbsorptionProblem::compute_bounds() const {
  const Matrix ra = base_.hermitian_part();
  const Matrix k = base_.map().adjoint() * base_.target().gram() * base_.map();
  const Index m = base_.aux().dim();
  if (m == 0) return BoundConstants{0.0, 0.0};
  // k may be singular (j need not be injective); regularize the reference
  // metric with the auxiliary Gram so the scan stays finite, then verify.
  const double ratio = absorbed_.norm() / std::max(ra.norm(), 1e-30);
  BoundConstants best{0.0, 0.0};
  double best_score = std::numeric_limits<double>::infinity();
  for (int j = -6; j <= 8; ++j) {
    const double c1 = j == -6 ? 0.0 : std::ldexp(ratio, j);
    const double c2 = detail::smallest_c2(absorbed_, ra, Matrix(k + 1e-12 * base_.aux().gram()), c1);
    if (!detail::modulus_bound_feasible(absorbed_, ra, k, c1, c2 * (1.0 + 1e-6) + 1e-12, 1e-9))
      continue;
    const double score = std::max(c1, c2);
    if (score < best_score) {
      best_score = score;
      best = BoundConstants{c1, c2 * (1.0 + 1e-6) + 1e-12};
    }
  }
  if (!std::isfinite(best_score))
    throw MissingBoundConstants("compute_bounds: no constants found; b is not a-bounded");
  return best;
}

LinearRelation absorption_graphs(const AbsorptionProblem& p, long n) {
  if (n < 1) throw Error("absorption_graphs: n must be >= 1");
  const double factor = static_cast<double>(n - 1);
  return graph_of_represented_form(
      p.base().with_coeff(Matrix(p.base().coeff() + factor * p.absorbed())));
}

LinearRelation limit_graph_absorption(const AbsorptionProblem& p) {
  if (!p.bounds())
    throw MissingBoundConstants(
        "limit_graph_absorption: bound constants |b(u)| <= c1 Re a(u) + c2 ||u||^2 are required");
  const Matrix null = kernel_basis(hermitian_of(p.absorbed()), p.base().tol());
  const Subspace z_inf = Subspace::orthonormalize(p.base().aux(), null, p.base().tol());
  return graph_of_represented_form(p.base().restricted_to_aux(z_inf));
}

Matrix vanishing_set_projector(const AbsorptionProblem& p) {
  const RepresentedForm& rf = p.base();
  const Matrix ker_j = kernel_basis(g_calibrated(rf.target(), rf.map()), rf.tol());

  RepresentedForm reduced = rf;
  Matrix absorbed = p.absorbed();
  if (ker_j.cols() > 0) {
    // Closable case: both forms must descend along the quotient by ker j.
    const double scale_a = 1.0 + rf.coeff().norm();
    const double scale_b = 1.0 + absorbed.norm();
    const bool descends = (rf.coeff() * ker_j).norm() <= 1e-8 * scale_a &&
                          (ker_j.adjoint() * rf.coeff()).norm() <= 1e-8 * scale_a &&
                          (absorbed * ker_j).norm() <= 1e-8 * scale_b &&
                          (ker_j.adjoint() * absorbed).norm() <= 1e-8 * scale_b;
    if (!descends)
      throw NotClosableFailure(
          "vanishing_set_projector: the representation does not reduce to an injective one; "
          "use limit_graph_absorption for the projection-free limit");
    const Subspace complement =
        ortho_complement(Subspace::orthonormalize(rf.aux(), ker_j, rf.tol()));
    reduced = rf.restricted_to_aux(complement);
    absorbed = complement.basis().adjoint() * absorbed * complement.basis();
  }

  const Matrix null = kernel_basis(hermitian_of(absorbed), reduced.tol());
  const Matrix image = reduced.map() * null;
  return Subspace::orthonormalize(reduced.target(), image, reduced.tol()).projector();
}

Matrix bounded_part_projector(const AbsorptionProblem& p, const Matrix& b_op) {
  const RepresentedForm& rf = p.base();
  const HSpace& h = rf.target();
  if (b_op.rows() != h.dim() || b_op.cols() != h.dim())
    throw DimensionMismatch("bounded_part_projector: B must act on H");
  // b(u, v) = (B j u, j v)_H on V.
  const Matrix expected = rf.map().adjoint() * h.gram() * b_op * rf.map();
  if ((expected - p.absorbed()).norm() > 1e-8 * (1.0 + expected.norm()))
    throw MismatchWithFormB("bounded_part_projector: b(u,v) != (B u, v)_H on the domain");
  const Matrix sym = b_op + h.adjoint(b_op);
  const Matrix null = kernel_basis(g_calibrated(h, sym), kDefaultRankTol);
  return Subspace::orthonormalize(h, null, kDefaultRankTol).projector();
}

AbsorptionReport verify_absorption(const AbsorptionProblem& p, const Matrix& projector, double t,
                                   std::span<const long> schedule) {
  const LinearRelation base = absorption_graphs(p, 1);
  const LinearRelation limit = limit_graph_absorption(p);
  const Matrix r_inf = resolvent(limit, Complex(-1.0));
  const std::vector<Vector> probes = probe_vectors(p.base().target());

  std::vector<long> ns(schedule.begin(), schedule.end());
  std::vector<double> res_errors;
  res_errors.reserve(ns.size());
  for (long n : ns) {
    const Matrix r_n = resolvent(absorption_graphs(p, n), Complex(-1.0));
    double worst = 0.0;
    for (const Vector& f : probes)
      worst = std::max(worst, p.base().target().norm(Vector((r_n - r_inf) * f)));
    res_errors.push_back(worst);
  }
  ConvergenceReport resolvent_track =
      make_report("absorption_resolvent", ns, std::move(res_errors));
  ConvergenceReport product_track = product_formula_report(base, projector, limit, t, ns);
  product_track.scenario = "absorption_product";
  return AbsorptionReport{std::move(resolvent_track), std::move(product_track)};
}

double Example43::base_zero_deviation() const {
  const SingleValuedPart part = single_valued_part(base_graph);
  double dev = part.op.norm();
  if (part.domain.dim() != base_graph.ambient().dim())
    dev = std::numeric_limits<double>::infinity();
  return dev;
}

bool Example43::z_inf_is_span_phi_one() const {
  const Index d = phi.size();
  Vector w(d + 1);
  w.head(d) = phi;
  w(d) = 1.0;
  const Subspace expected =
      Subspace::orthonormalize(problem.base().aux(), Matrix(w / std::sqrt(2.0)));
  return z_inf.equals(expected);
}

bool Example43::limit_matches_expected() const {
  return relation_equal(limit_graph, expected_limit);
}

double Example43::semigroup_deviation(double t) const {
  const Matrix e = semigroup(limit_graph, t);
  return (e - std::exp(-t) * p1).norm();
}

double Example43::product_error(const Matrix& p, double t, long n) const {
  const Matrix prod = trotter_product(base_graph, p, t, n);
  const Matrix target = semigroup(limit_graph, t);
  const std::vector<Vector> probes = probe_vectors(base_graph.ambient());
  double worst = 0.0;
  for (const Vector& f : probes)
    worst = std::max(worst, base_graph.ambient().norm(Vector((prod - target) * f)));
  return worst;
}

Example43 example43_scenario(int d, const Vector& phi) {
  if (phi.size() != d) throw DimensionMismatch("example43_scenario: phi must live in C^d");
  HSpace h(d);
  if (std::abs(h.norm(phi) - 1.0) > 1e-12)
    throw Error("example43_scenario: phi must be a unit vector");

  // Z = H x C with the product inner product; j forgets the extra
  // coordinate, the base form sees only it.
  HSpace z(d + 1);
  Matrix j = Matrix::Zero(d, d + 1);
  j.leftCols(d) = Matrix::Identity(d, d);
  Matrix base_coeff = Matrix::Zero(d + 1, d + 1);
  base_coeff(d, d) = 1.0;

  Vector w(d + 1);
  w.head(d) = phi;
  w(d) = 1.0;
  w /= std::sqrt(2.0);
  const Matrix p0 = w * w.adjoint();
  const Matrix absorbed = Matrix::Identity(d + 1, d + 1) - p0;

  RepresentedForm base(h, z, std::move(j), std::move(base_coeff));
  AbsorptionProblem problem(base, absorbed);
  problem = problem.with_bounds(problem.compute_bounds());

  const Matrix p1 = phi * phi.adjoint();

  LinearRelation base_graph = graph_of_represented_form(problem.base());
  const Matrix null = kernel_basis(hermitian_of(problem.absorbed()), problem.base().tol());
  Subspace z_inf = Subspace::orthonormalize(problem.base().aux(), null, problem.base().tol());
  LinearRelation limit_graph = limit_graph_absorption(problem);

  // Expected: { (c phi, c phi + y) : y perp phi }.
  const Subspace phi_line = Subspace::orthonormalize(h, phi);
  const Subspace phi_perp = ortho_complement(phi_line);
  Matrix xs(d, 1 + phi_perp.dim());
  Matrix ys(d, 1 + phi_perp.dim());
  xs << phi, Matrix::Zero(d, phi_perp.dim());
  ys << phi, phi_perp.basis();
  LinearRelation expected_limit = LinearRelation::from_pairs(h, xs, ys);

  return Example43{std::move(problem),     phi,
                   p0,                     p1,
                   std::move(base_graph),  std::move(z_inf),
                   std::move(limit_graph), std::move(expected_limit)};
}

AbsorptionProblem grid_boundary_absorption(int d) {
  if (d < 3) throw Error("grid_boundary_absorption: need at least 3 grid points");
  HSpace h(d);
  // Quadratic sum of forward differences.
  Matrix a = Matrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    a(i, i) += 1.0;
    a(i + 1, i + 1) += 1.0;
    a(i, i + 1) -= 1.0;
    a(i + 1, i) -= 1.0;
  }
  Matrix b = Matrix::Zero(d, d);
  b(0, 0) = 1.0;
  b(d - 1, d - 1) = 1.0;
  return AbsorptionProblem::from_forms(SesqForm::from_operator(h, a),
                                       SesqForm::from_operator(h, b));
}

}  // namespace sectoria
