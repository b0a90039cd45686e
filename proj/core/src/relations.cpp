#include "sectoria/relations.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace sectoria {

namespace {

HSpace pair_space_of(const HSpace& h) {
  if (h.standard()) return HSpace(2 * h.dim());
  const Index d = h.dim();
  Matrix g2 = Matrix::Zero(2 * d, 2 * d);
  g2.topLeftCorner(d, d) = h.gram();
  g2.bottomRightCorner(d, d) = h.gram();
  return HSpace(2 * d, std::move(g2));
}

// Coordinates in which the ambient G-norm is the plain 2-norm.
Matrix g_calibrated(const HSpace& h, const Matrix& m) {
  if (h.standard()) return m;
  return h.gram_factor().adjoint() * m;
}

double sigma_max(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace

LinearRelation::LinearRelation(HSpace ambient, Subspace graph)
    : ambient_(std::move(ambient)), graph_(std::move(graph)) {
  if (graph_.ambient_dim() != 2 * ambient_.dim())
    throw DimensionMismatch("relation graph must be a subspace of H x H");
  if (!graph_.space().same_as(pair_space_of(ambient_)))
    throw AmbientMismatch("relation graph carries the wrong pair inner product");
}

LinearRelation LinearRelation::from_operator(const HSpace& space, const Matrix& m, double tol) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw DimensionMismatch("from_operator: matrix must match the ambient dimension");
  const Index d = space.dim();
  Matrix stacked(2 * d, d);
  stacked.topRows(d) = Matrix::Identity(d, d);
  stacked.bottomRows(d) = m;
  return LinearRelation(space, Subspace::orthonormalize(pair_space_of(space), stacked, tol));
}

LinearRelation LinearRelation::from_pairs(const HSpace& space, const Matrix& xs, const Matrix& ys,
                                          double tol) {
  if (xs.rows() != space.dim() || ys.rows() != space.dim() || xs.cols() != ys.cols())
    throw DimensionMismatch("from_pairs: blocks must be d x p with matching p");
  const Index d = space.dim();
  Matrix stacked(2 * d, xs.cols());
  stacked.topRows(d) = xs;
  stacked.bottomRows(d) = ys;
  return LinearRelation(space, Subspace::orthonormalize(pair_space_of(space), stacked, tol));
}

LinearRelation LinearRelation::zero_domain_full_range(const HSpace& space, double tol) {
  const Index d = space.dim();
  return from_pairs(space, Matrix::Zero(d, d), Matrix::Identity(d, d), tol);
}

Matrix LinearRelation::first_block() const { return graph_.basis().topRows(ambient_.dim()); }

Matrix LinearRelation::second_block() const { return graph_.basis().bottomRows(ambient_.dim()); }

bool LinearRelation::member(const Vector& x, const Vector& y) const {
  Vector stacked(2 * ambient_.dim());
  stacked.head(ambient_.dim()) = x;
  stacked.tail(ambient_.dim()) = y;
  return graph_.contains_vector(stacked);
}

Subspace domain(const LinearRelation& a) {
  return Subspace::orthonormalize(a.ambient(), a.first_block(), a.tol());
}

Subspace range(const LinearRelation& a) {
  return Subspace::orthonormalize(a.ambient(), a.second_block(), a.tol());
}

SingleValuedness is_single_valued(const LinearRelation& a) {
  const Matrix x = a.first_block();
  const Matrix null = kernel_basis(g_calibrated(a.ambient(), x), a.tol());
  const Matrix mul = a.second_block() * null;
  Subspace part = Subspace::orthonormalize(a.ambient(), mul, a.tol());
  const bool single = part.dim() == 0;
  return SingleValuedness{single, std::move(part)};
}

LinearRelation shift(const LinearRelation& a, Complex lambda) {
  const Matrix x = a.first_block();
  const Matrix y = a.second_block() + lambda * x;
  return LinearRelation::from_pairs(a.ambient(), x, y, a.tol());
}

LinearRelation reflect(const LinearRelation& a) {
  return LinearRelation::from_pairs(a.ambient(), a.second_block(), a.first_block(), a.tol());
}

Inversion invert(const LinearRelation& a) {
  LinearRelation reflected = reflect(a);
  const Index d = a.ambient().dim();
  const bool surjective = range(a).dim() == d;
  const bool refl_single = is_single_valued(reflected).single_valued;
  if (!surjective || !refl_single)
    return Inversion{false, Matrix(), std::move(reflected)};
  // Surjective with single-valued reflection forces graph dimension d, and
  // the input block of the reflected graph is then invertible.
  const Matrix yb = reflected.first_block();
  const Matrix xb = reflected.second_block();
  if (yb.cols() != d) return Inversion{false, Matrix(), std::move(reflected)};
  // T yb = xb  =>  T = xb yb^{-1}
  Matrix t = yb.transpose().partialPivLu().solve(xb.transpose()).transpose();
  return Inversion{true, std::move(t), std::move(reflected)};
}

Matrix resolvent(const LinearRelation& a, Complex lambda) {
  Inversion inv = invert(shift(a, -lambda));
  if (!inv.invertible)
    throw NotInResolventSet("resolvent: requested point is not in the resolvent set");
  return std::move(inv.inverse);
}

namespace {

std::optional<SectorParams> m_sectorial_analysis(const LinearRelation& a, bool allow_fallback) {
  const Matrix x = a.first_block();
  const Matrix y = a.second_block();
  const Matrix& g = a.ambient().gram();
  const double tol = a.tol();

  // Split coordinates along ker X.  Pairs over the kernel are (0, w); they
  // contribute nothing to the pair inner products, but the mixed terms
  // (Y c0, X c1)_H must vanish or the numerical range escapes every sector.
  const Matrix null = kernel_basis(g_calibrated(a.ambient(), x), tol);
  if (null.cols() > 0) {
    const Matrix cross = (y * null).adjoint() * g * x;
    if (sigma_max(cross) > 100.0 * tol) return std::nullopt;
  }

  SectorParams params{0.0, 0.0};
  const Matrix compl_basis = kernel_basis(null.adjoint(), tol);
  if (compl_basis.cols() > 0) {
    const Matrix x1 = x * compl_basis;
    const Matrix y1 = y * compl_basis;
    const Matrix w1 = y1.adjoint() * g * x1;
    const Matrix q1 = x1.adjoint() * g * x1;
    const Matrix wt = detail::whiten(w1, q1);
    if (auto p = detail::sector_of_quadratic(wt, tol)) {
      params = *p;
    } else if (allow_fallback) {
      // No sector with the maximal vertex (the numerical range has no corner
      // at its leftmost point); every smaller vertex works once the
      // structural checks above pass.  Certify a deterministic fallback.
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (wt + wt.adjoint().eval()),
                                               Eigen::EigenvaluesOnly);
      const double gmax = es.eigenvalues()(0);
      const double gamma = gmax - std::max(1.0, std::abs(gmax));
      const auto tan = detail::quadratic_tan_at_vertex(wt, gamma, tol);
      if (!tan) return std::nullopt;
      params = SectorParams{gamma, *tan};
    } else {
      return std::nullopt;
    }
  }

  Inversion inv = invert(shift(a, Complex(-(params.vertex - 1.0), 0.0)));
  if (!inv.invertible) return std::nullopt;
  return params;
}

}  // namespace

std::optional<SectorParams> is_m_sectorial(const LinearRelation& a) {
  return m_sectorial_analysis(a, /*allow_fallback=*/false);
}

std::optional<SectorParams> certify_m_sectorial(const LinearRelation& a) {
  return m_sectorial_analysis(a, /*allow_fallback=*/true);
}

SingleValuedPart single_valued_part(const LinearRelation& a) {
  const Subspace dom = domain(a);
  const Index d = a.ambient().dim();
  const Index kd = dom.dim();

  // D(A) x D(A) as a subspace of the pair space.
  Matrix dd = Matrix::Zero(2 * d, 2 * kd);
  dd.topLeftCorner(d, kd) = dom.basis();
  dd.bottomRightCorner(d, kd) = dom.basis();
  const Subspace dxd = Subspace::orthonormalize(a.pair_space(), dd, a.tol());
  const Subspace op_graph = intersect(a.graph(), dxd);

  const Matrix ix = op_graph.basis().topRows(d);
  const Matrix iy = op_graph.basis().bottomRows(d);
  if (op_graph.dim() != kd)
    throw DecompositionFailure("single_valued_part: operator part does not cover the domain");
  const Matrix p = dom.basis().adjoint() * a.ambient().gram() * ix;
  const Matrix q = dom.basis().adjoint() * a.ambient().gram() * iy;
  Matrix op(0, 0);
  if (kd > 0) {
    Eigen::JacobiSVD<Matrix> svd(p);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= a.tol() * sv(0))
      throw DecompositionFailure("single_valued_part: operator part is not single-valued");
    // op p = q
    op = p.transpose().partialPivLu().solve(q.transpose()).transpose();
  }

  // Reconstruction A = A_op + {0} x D(A)^perp.
  const Subspace dperp = ortho_complement(dom);
  Matrix zstack = Matrix::Zero(2 * d, dperp.dim());
  zstack.bottomRows(d) = dperp.basis();
  const Subspace mul_part = Subspace::orthonormalize(a.pair_space(), zstack, a.tol());
  const Subspace recon = subspace_sum(op_graph, mul_part);
  const bool ok = recon.equals(a.graph());

  return SingleValuedPart{std::move(op), dom, ok};
}

bool relation_equal(const LinearRelation& a, const LinearRelation& b) {
  return a.ambient().same_as(b.ambient()) && a.graph().equals(b.graph());
}

}  // namespace sectoria
