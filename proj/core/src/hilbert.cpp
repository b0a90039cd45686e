#include "sectoria/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace sectoria {

namespace {

Matrix identity(Index d) { return Matrix::Identity(d, d); }

}  // namespace

HSpace::HSpace(Index dim)
    : dim_(dim), standard_(true), gram_(identity(dim)), factor_(identity(dim)) {
  if (dim < 0) throw DimensionMismatch("HSpace dimension must be >= 0");
}

HSpace::HSpace(Index dim, Matrix gram) : dim_(dim), standard_(false), gram_(std::move(gram)) {
  if (gram_.rows() != dim_ || gram_.cols() != dim_)
    throw DimensionMismatch("Gram matrix does not match the ambient dimension");
  if (dim_ == 0) {
    standard_ = true;
    factor_ = Matrix(0, 0);
    return;
  }
  const double scale = gram_.norm();
  if ((gram_ - gram_.adjoint()).norm() > 1e-12 * (scale > 0 ? scale : 1.0))
    throw DimensionMismatch("Gram matrix must be Hermitian");
  gram_ = 0.5 * (gram_ + gram_.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
  if (dim_ > 0 && es.eigenvalues().minCoeff() <= 0.0)
    throw DimensionMismatch("Gram matrix must be positive definite");
  Eigen::LLT<Matrix> llt(gram_);
  factor_ = llt.matrixL();
  if ((gram_ - identity(dim_)).norm() <= 1e-15 * static_cast<double>(dim_)) standard_ = true;
}

Complex HSpace::inner(const Vector& u, const Vector& v) const {
  if (u.size() != dim_ || v.size() != dim_)
    throw DimensionMismatch("inner product argument dimension mismatch");
  if (standard_) return v.dot(u);  // Eigen's dot conjugates its object
  return v.adjoint() * gram_ * u;
}

double HSpace::norm(const Vector& u) const {
  return std::sqrt(std::max(0.0, inner(u, u).real()));
}

double HSpace::operator_norm(const Matrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_)
    throw DimensionMismatch("operator_norm expects a square matrix on H");
  if (dim_ == 0) return 0.0;
  if (standard_) return m.jacobiSvd().singularValues()(0);
  // || L^* M L^{-*} ||_2 equals the (H,G) -> (H,G) operator norm.
  const Matrix lstar = factor_.adjoint();
  Matrix t = lstar * m;
  t = lstar.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(t);
  return t.jacobiSvd().singularValues()(0);
}

Matrix HSpace::adjoint(const Matrix& m) const {
  if (standard_) return m.adjoint();
  // G^{-1} M^H G via the stored Cholesky factor.
  const Matrix rhs = m.adjoint() * gram_;
  Matrix x = factor_.triangularView<Eigen::Lower>().solve(rhs);
  return factor_.adjoint().eval().triangularView<Eigen::Upper>().solve(x);
}

bool HSpace::same_as(const HSpace& other, double tol) const {
  if (dim_ != other.dim_) return false;
  const double scale = std::max(gram_.norm(), other.gram_.norm());
  return (gram_ - other.gram_).norm() <= tol * (scale > 0 ? scale : 1.0);
}

Subspace::Subspace(HSpace space, Matrix basis, double tol)
    : space_(std::move(space)), basis_(std::move(basis)), tol_(tol) {}

Subspace Subspace::orthonormalize(const HSpace& space, const Matrix& spanning, double tol) {
  if (spanning.cols() == 0) return zero(space, tol);
  if (spanning.rows() != space.dim())
    throw DimensionMismatch("spanning vectors do not live in the ambient space");
  // Work in the coordinates w = L^* v, in which G-orthonormality is the
  // standard one; then map the left singular vectors back.
  const Matrix lstar = space.gram_factor().adjoint();
  Matrix w = space.standard() ? spanning : Matrix(lstar * spanning);
  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * tol;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0) ++rank;
  Matrix u = svd.matrixU().leftCols(rank);
  if (!space.standard()) u = lstar.triangularView<Eigen::Upper>().solve(u);
  return Subspace(space, std::move(u), tol);
}

Subspace Subspace::zero(const HSpace& space, double tol) {
  return Subspace(space, Matrix(space.dim(), 0), tol);
}

Subspace Subspace::full(const HSpace& space, double tol) {
  return orthonormalize(space, identity(space.dim()), tol);
}

Matrix Subspace::projector() const {
  return basis_ * basis_.adjoint() * space_.gram();
}

Vector Subspace::coords(const Vector& v) const {
  return basis_.adjoint() * space_.gram() * v;
}

double Subspace::distance(const Vector& v) const {
  const Vector r = v - basis_ * coords(v);
  return space_.norm(r);
}

bool Subspace::contains_vector(const Vector& v) const {
  const double n = space_.norm(v);
  if (n == 0.0) return true;
  return distance(v) <= 100.0 * tol_ * std::max(1.0, n);
}

bool Subspace::contains(const Subspace& other) const {
  if (other.dim() == 0) return true;
  if (other.dim() > dim()) return false;
  const Matrix r =
      other.basis() - basis_ * (basis_.adjoint() * space_.gram() * other.basis());
  double worst = 0.0;
  for (Index j = 0; j < r.cols(); ++j) worst = std::max(worst, space_.norm(r.col(j)));
  return worst <= 100.0 * std::max(tol_, other.tol_);
}

bool Subspace::equals(const Subspace& other) const {
  return dim() == other.dim() && contains(other) && other.contains(*this);
}

Subspace ortho_complement(const Subspace& s) {
  if (s.dim() == 0) return Subspace::full(s.space(), s.tol());
  // { v : B^* G v = 0 }
  const Matrix a = s.basis().adjoint() * s.space().gram();
  const Matrix n = kernel_basis(a, s.tol());
  return Subspace::orthonormalize(s.space(), n, s.tol());
}

Subspace subspace_sum(const Subspace& s, const Subspace& t) {
  if (!s.space().same_as(t.space())) throw AmbientMismatch("subspace_sum: ambient spaces differ");
  Matrix joined(s.ambient_dim(), s.dim() + t.dim());
  joined << s.basis(), t.basis();
  return Subspace::orthonormalize(s.space(), joined, std::max(s.tol(), t.tol()));
}

Subspace intersect(const Subspace& s, const Subspace& t) {
  if (!s.space().same_as(t.space())) throw AmbientMismatch("intersect: ambient spaces differ");
  return ortho_complement(subspace_sum(ortho_complement(s), ortho_complement(t)));
}

Matrix matrix_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix_exp requires a square matrix");
  if (m.rows() == 0) return Matrix(0, 0);
  return m.exp();
}

Matrix matrix_power(const Matrix& m, long n) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix_power requires a square matrix");
  if (n < 0) throw DimensionMismatch("matrix_power requires n >= 0");
  Matrix result = identity(m.rows());
  Matrix base = m;
  long k = n;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Matrix kernel_basis(const Matrix& a, double tol) {
  if (a.cols() == 0) return Matrix(0, 0);
  if (a.rows() == 0) return identity(a.cols());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0 ? sv(0) : 0.0) * tol;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace sectoria
