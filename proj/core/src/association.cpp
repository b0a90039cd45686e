#include "sectoria/association.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sectoria/rng.hpp"

namespace sectoria {

namespace {

double sigma_max(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

double min_eig(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

RepresentedForm::RepresentedForm(HSpace target, HSpace aux, Matrix map, Matrix coeff, double tol)
    : target_(std::move(target)), aux_(std::move(aux)), map_(std::move(map)),
      coeff_(std::move(coeff)), tol_(tol) {
  if (map_.rows() != target_.dim() || map_.cols() != aux_.dim())
    throw DimensionMismatch("represented form: map must be dim(H) x dim(V)");
  if (coeff_.rows() != aux_.dim() || coeff_.cols() != aux_.dim())
    throw DimensionMismatch("represented form: coefficient matrix must live on V");
}

Matrix RepresentedForm::hermitian_part() const {
  return 0.5 * (coeff_ + coeff_.adjoint().eval());
}

double RepresentedForm::continuity_constant() const {
  return sigma_max(detail::whiten(coeff_, aux_.gram()));
}

RepresentedForm RepresentedForm::with_coeff(Matrix coeff) const {
  return RepresentedForm(target_, aux_, map_, std::move(coeff), tol_);
}

RepresentedForm RepresentedForm::restricted_to_aux(const Subspace& sub) const {
  if (!sub.space().same_as(aux_))
    throw AmbientMismatch("restricted_to_aux: subspace must live in the auxiliary space");
  // Basis columns are G_V-orthonormal, so the restricted Gram is I.
  HSpace smaller(sub.dim());
  Matrix new_map = map_ * sub.basis();
  Matrix new_coeff = sub.basis().adjoint() * coeff_ * sub.basis();
  return RepresentedForm(target_, std::move(smaller), std::move(new_map), std::move(new_coeff),
                         tol_);
}

std::optional<Ellipticity> check_j_elliptic(const RepresentedForm& rf) {
  const Index m = rf.aux().dim();
  if (m == 0) return Ellipticity{0.0, 1.0};
  const Matrix k = rf.map().adjoint() * rf.target().gram() * rf.map();
  // Calibrate both quadratic forms to the V inner product.
  const Matrix rt = detail::whiten(rf.hermitian_part(), rf.aux().gram());
  const Matrix kt = detail::whiten(k, rf.aux().gram());

  auto best_mu = [&](double omega) { return min_eig(rt + omega * kt); };

  const double thresh = 100.0 * rf.tol() * (rt.norm() + 1.0);
  if (best_mu(0.0) > thresh) return Ellipticity{0.0, best_mu(0.0)};

  const double unit = (rt.norm() + 1.0) / std::max(kt.norm(), 1e-30);
  double lo = 0.0;
  double hi = -1.0;
  for (int j = -4; j <= 48; ++j) {
    const double omega = std::ldexp(unit, j);
    if (best_mu(omega) > thresh) {
      hi = omega;
      break;
    }
    lo = omega;
  }
  if (hi < 0.0) return std::nullopt;

  // Certify half of the scale reached, then push omega down to a
  // near-minimal feasible value.
  const double mu = 0.5 * best_mu(hi);
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (best_mu(mid) >= mu)
      hi = mid;
    else
      lo = mid;
  }
  return Ellipticity{hi, mu};
}

bool j_elliptic_feasible(const RepresentedForm& rf, double omega, double mu, double slack) {
  const Matrix k = rf.map().adjoint() * rf.target().gram() * rf.map();
  const Matrix rt = detail::whiten(rf.hermitian_part(), rf.aux().gram());
  const Matrix kt = detail::whiten(k, rf.aux().gram());
  const Matrix h = rt + omega * kt - mu * Matrix::Identity(rt.rows(), rt.cols());
  return min_eig(h) >= -slack * (1.0 + h.norm());
}

LinearRelation graph_of_closed_form(const SesqForm& a) {
  const Subspace& dom = a.domain();
  const HSpace& h = a.space();
  const Index d = h.dim();
  const Index k = dom.dim();

  // Pairs (u, f): with u = B x, the defining identity a(u, v) = (f, v)_H for
  // all v pins the D(a)-component of f to M x and leaves the complement free.
  const Subspace perp = ortho_complement(dom);
  Matrix xs(d, k + perp.dim());
  Matrix ys(d, k + perp.dim());
  xs << dom.basis(), Matrix::Zero(d, perp.dim());
  ys << dom.basis() * a.coeff(), perp.basis();
  LinearRelation rel = LinearRelation::from_pairs(h, xs, ys, dom.tol());
  if (!certify_m_sectorial(rel))
    throw NotSectorialError("graph_of_closed_form: certification of the graph failed");
  return rel;
}

LinearRelation graph_of_represented_form(const RepresentedForm& rf) {
  if (!check_j_elliptic(rf))
    throw EllipticityFailure("graph_of_represented_form: representation is not j-elliptic");
  const Index m = rf.aux().dim();
  const Index d = rf.target().dim();

  // a(u,v) = (f, j v)_H for all v  <=>  coeff u - J^* G f = 0.
  Matrix cond(m, m + d);
  cond.leftCols(m) = -rf.coeff();
  cond.rightCols(d) = rf.map().adjoint() * rf.target().gram();
  const Matrix null = kernel_basis(cond, rf.tol());

  const Matrix xs = rf.map() * null.topRows(m);
  const Matrix ys = null.bottomRows(d);
  LinearRelation rel = LinearRelation::from_pairs(rf.target(), xs, ys, rf.tol());
  if (!certify_m_sectorial(rel))
    throw EllipticityFailure("graph_of_represented_form: certification of the graph failed");
  return rel;
}

RepresentedForm wrap_form(const SesqForm& a) {
  const Index k = a.domain().dim();
  const Matrix r = a.hermitian_part();
  const double gamma = k > 0 ? min_eig(r) : 0.0;
  Matrix gram = r + (1.0 - gamma) * Matrix::Identity(k, k);
  HSpace aux(k, std::move(gram));
  return RepresentedForm(a.space(), std::move(aux), a.domain().basis(), a.coeff(),
                         a.domain().tol());
}

bool sequential_association_check(const SesqForm& a, const LinearRelation& rel, int trials,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const Matrix x = rel.first_block();
  const Matrix y = rel.second_block();
  const Index k = rel.graph_dim();
  const Matrix& g = a.space().gram();
  const Matrix mdom = a.domain().basis().adjoint() * g;

  for (int t = 0; t < trials; ++t) {
    const Vector c = k > 0 ? rng.cnormal_vector(k) : Vector(0);
    const Vector u = x * c;
    const Vector f = y * c;
    if (!a.domain().contains_vector(u)) continue;

    // Constant-sequence witness: a(u, v) = (f, v)_H for all v in D(a).
    const Vector residual = a.coeff() * a.domain().coords(u) - mdom * f;
    const double scale = 1.0 + a.space().norm(u) + a.space().norm(f);
    if (residual.norm() > 1e-7 * scale) return false;

    // A perturbed pair must lose its witness.
    if (a.domain().dim() > 0) {
      const Vector w = a.domain().embed(rng.unit_vector(HSpace(a.domain().dim())));
      const Vector f_bad = f + 0.5 * scale * w;
      const Vector bad = a.coeff() * a.domain().coords(u) - mdom * f_bad;
      if (bad.norm() <= 1e-7 * scale) return false;
      if (rel.member(u, f_bad)) return false;
    }
  }
  return true;
}

bool represented_form_consistency(const SesqForm& a, const RepresentedForm& rf, const Matrix& q) {
  const Index k = a.domain().dim();
  const Index m = rf.aux().dim();
  if (q.rows() != m || q.cols() != k)
    throw DimensionMismatch("represented_form_consistency: q must be dim(V) x dim(D(a))");

  // Density of q(D(a)) in V: full row rank, measured in the V inner product.
  if (m > 0) {
    const Matrix calibrated = rf.aux().gram_factor().adjoint() * q;
    Eigen::JacobiSVD<Matrix> svd(calibrated);
    const auto& sv = svd.singularValues();
    const Index rank =
        sv.size() == 0 ? 0 : (sv.array() > sv(0) * rf.tol()).count();
    if (rank < m) throw HypothesisViolation("density", "q(D(a)) is not dense in V");
  }

  // Two-sided norm equivalence: c^{-1} ||q u||_V <= ||u||_{D(a)} <= c ||q u||_V.
  const Matrix r = a.hermitian_part();
  const double gamma = k > 0 ? min_eig(r) : 0.0;
  const Matrix graph_gram = r + (1.0 - gamma) * Matrix::Identity(k, k);
  const Matrix qgram = q.adjoint() * rf.aux().gram() * q;
  if (k > 0) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(qgram, graph_gram,
                                                         Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    const double lo = ges.eigenvalues()(0);
    if (lo <= 100.0 * rf.tol() * (1.0 + qgram.norm()))
      throw HypothesisViolation("norm_equivalence",
                                "no two-sided constant relates ||q u||_V and the graph norm");
  }

  // j(q(u)) = u.
  const Matrix jq = rf.map() * q;
  if ((jq - a.domain().basis()).norm() > 1e-8 * (1.0 + a.domain().basis().norm()))
    throw HypothesisViolation("jq", "j(q(u)) != u on D(a)");

  // Form transport a~(q u, q v) = a(u, v).
  const Matrix transported = q.adjoint() * rf.coeff() * q;
  if ((transported - a.coeff()).norm() > 1e-8 * (1.0 + a.coeff().norm()))
    throw HypothesisViolation("form_match", "a~(q u, q v) != a(u, v)");

  return relation_equal(graph_of_closed_form(a), graph_of_represented_form(rf));
}

}  // namespace sectoria
