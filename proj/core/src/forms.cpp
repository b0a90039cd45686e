#include "sectoria/forms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace sectoria {
namespace detail {

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix hermitian_of(const Matrix& w) { return 0.5 * (w + w.adjoint().eval()); }

Matrix skew_of(const Matrix& w) {
  return (w - w.adjoint().eval()) / Complex(0.0, 2.0);
}

// cos(psi) Re-part - sin(psi) Im-part of the quadratic form of (r, s).
Matrix rotated_real_part(const Matrix& r, const Matrix& s, double psi) {
  return std::cos(psi) * r - std::sin(psi) * s;
}

double min_eig(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

template <typename F>
double refine_extremum(F&& f, double lo, double hi, bool maximize) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    const bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
    if (keep_left) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return maximize ? std::max({f(a), f1, f2, f(b)}) : std::min({f(a), f1, f2, f(b)});
}

// Extremum over psi in [0, 2pi) of a smooth periodic eigenvalue function:
// coarse grid, then golden-section around the best cell.
template <typename F>
double scan_extremum(F&& f, bool maximize, int grid = 256) {
  double best = f(0.0);
  int best_i = 0;
  for (int i = 1; i < grid; ++i) {
    const double psi = 2.0 * kPi * i / grid;
    const double v = f(psi);
    if (maximize ? (v > best) : (v < best)) {
      best = v;
      best_i = i;
    }
  }
  const double h = 2.0 * kPi / grid;
  const double mid = 2.0 * kPi * best_i / grid;
  const double refined = refine_extremum(f, mid - h, mid + h, maximize);
  return maximize ? std::max(best, refined) : std::min(best, refined);
}

}  // namespace

std::optional<SectorParams> sector_of_quadratic(const Matrix& w, double tol) {
  const Index k = w.rows();
  if (k == 0) return SectorParams{0.0, 0.0};
  const Matrix r = hermitian_of(w);
  const Matrix s = skew_of(w);
  const double scale = w.norm();
  if (scale == 0.0) return SectorParams{0.0, 0.0};

  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  const double gamma = es.eigenvalues()(0);
  const RealVector shifted = es.eigenvalues().array() - gamma;
  const double cut = tol * scale;

  Index null_dim = 0;
  while (null_dim < k && shifted(null_dim) <= cut) ++null_dim;
  const Matrix null_basis = es.eigenvectors().leftCols(null_dim);
  const Matrix range_basis = es.eigenvectors().rightCols(k - null_dim);

  // Sectorial with the maximal vertex iff the skew part annihilates the
  // kernel of the shifted Hermitian part.
  if (null_dim > 0) {
    const Matrix sn = s * null_basis;
    if (sn.jacobiSvd().singularValues()(0) > 100.0 * tol * scale) return std::nullopt;
  }
  if (null_dim == k) return SectorParams{gamma, 0.0};

  const Matrix s1 = range_basis.adjoint() * s * range_basis;
  Matrix r1 = Matrix::Zero(k - null_dim, k - null_dim);
  r1.diagonal() = shifted.tail(k - null_dim).cast<Complex>();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(s1, r1,
                                                       Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const auto& ev = ges.eigenvalues();
  const double tan_theta = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return SectorParams{gamma, tan_theta};
}

std::optional<double> quadratic_tan_at_vertex(const Matrix& w, double vertex, double tol) {
  const Index k = w.rows();
  if (k == 0) return 0.0;
  const Matrix r0 = hermitian_of(w) - vertex * Matrix::Identity(k, k);
  const Matrix s = skew_of(w);
  const double scale = w.norm() + std::abs(vertex);
  if (scale == 0.0) return 0.0;

  Eigen::SelfAdjointEigenSolver<Matrix> es(r0);
  if (es.eigenvalues()(0) < -100.0 * tol * scale) return std::nullopt;
  const double cut = tol * scale;

  Index null_dim = 0;
  while (null_dim < k && es.eigenvalues()(null_dim) <= cut) ++null_dim;
  const Matrix null_basis = es.eigenvectors().leftCols(null_dim);
  const Matrix range_basis = es.eigenvectors().rightCols(k - null_dim);

  if (null_dim > 0) {
    const Matrix sn = s * null_basis;
    if (sn.jacobiSvd().singularValues()(0) > 100.0 * tol * scale) return std::nullopt;
  }
  if (null_dim == k) return 0.0;

  const Matrix s1 = range_basis.adjoint() * s * range_basis;
  Matrix r1 = Matrix::Zero(k - null_dim, k - null_dim);
  r1.diagonal() = es.eigenvalues().tail(k - null_dim).array().max(cut).cast<Complex>();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(s1, r1,
                                                       Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const auto& ev = ges.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Matrix whiten(const Matrix& w, const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  const Matrix isq = es.operatorInverseSqrt();
  return isq * w * isq;
}

double smallest_c2(const Matrix& m, const Matrix& ra, const Matrix& k, double c1) {
  if (m.rows() == 0) return 0.0;
  const Matrix r = hermitian_of(m);
  const Matrix s = skew_of(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const Matrix isq = es.operatorInverseSqrt();
  auto lam = [&](double psi) {
    const Matrix h = rotated_real_part(r, s, psi) - c1 * ra;
    return max_eig(isq * h * isq);
  };
  // Tiny inflation so the scanned maximum is feasible within round-off.
  const double v = std::max(0.0, scan_extremum(lam, /*maximize=*/true));
  return v * (1.0 + 1e-9) + 1e-15;
}

bool modulus_bound_feasible(const Matrix& m, const Matrix& ra, const Matrix& k, double c1,
                            double c2, double slack) {
  if (m.rows() == 0) return true;
  const Matrix r = hermitian_of(m);
  const Matrix s = skew_of(m);
  const double scale = m.norm() + c1 * ra.norm() + c2 * k.norm();
  auto lam = [&](double psi) {
    return min_eig(c1 * ra + c2 * k - rotated_real_part(r, s, psi));
  };
  return scan_extremum(lam, /*maximize=*/false) >= -slack * std::max(1.0, scale);
}

}  // namespace detail

namespace {

Complex quad_value(const Matrix& m, const Vector& x, const Vector& y) {
  return (y.adjoint() * m * x)(0, 0);
}

}  // namespace

SesqForm::SesqForm(Subspace domain, Matrix coeff)
    : domain_(std::move(domain)), coeff_(std::move(coeff)) {
  if (coeff_.rows() != domain_.dim() || coeff_.cols() != domain_.dim())
    throw DimensionMismatch("form coefficient matrix must match the domain dimension");
  sector_ = detail::sector_of_quadratic(coeff_, domain_.tol());
}

SesqForm SesqForm::zero(const HSpace& space, double tol) {
  Subspace full = Subspace::full(space, tol);
  const Index k = full.dim();
  return SesqForm(std::move(full), Matrix::Zero(k, k));
}

SesqForm SesqForm::identity(const HSpace& space, double tol) {
  Subspace full = Subspace::full(space, tol);
  const Index k = full.dim();
  return SesqForm(std::move(full), Matrix::Identity(k, k));
}

SesqForm SesqForm::from_operator(const HSpace& space, const Matrix& m, double tol) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw DimensionMismatch("operator matrix must match the ambient dimension");
  Subspace full = Subspace::full(space, tol);
  Matrix coeff = full.basis().adjoint() * space.gram() * m * full.basis();
  return SesqForm(std::move(full), std::move(coeff));
}

Matrix SesqForm::hermitian_part() const { return 0.5 * (coeff_ + coeff_.adjoint().eval()); }

Matrix SesqForm::skew_part() const {
  return (coeff_ - coeff_.adjoint().eval()) / Complex(0.0, 2.0);
}

SesqForm SesqForm::restricted_to(const Subspace& sub) const {
  if (!domain_.contains(sub))
    throw DomainViolation("restriction target is not contained in the form domain");
  const Matrix x = domain_.basis().adjoint() * space().gram() * sub.basis();
  return SesqForm(sub, x.adjoint() * coeff_ * x);
}

Complex evaluate(const SesqForm& a, const Vector& u, const Vector& v) {
  if (!a.domain().contains_vector(u) || !a.domain().contains_vector(v))
    throw DomainViolation("evaluate: argument outside the form domain");
  return quad_value(a.coeff(), a.domain().coords(u), a.domain().coords(v));
}

Complex evaluate(const SesqForm& a, const Vector& u) { return evaluate(a, u, u); }

std::optional<SectorParams> sector_params(const SesqForm& a) { return a.sector(); }

std::optional<double> tan_semi_angle_at_vertex(const SesqForm& a, double vertex) {
  return detail::quadratic_tan_at_vertex(a.coeff(), vertex, a.domain().tol());
}

SesqForm add(const SesqForm& a, const SesqForm& b) {
  if (!a.space().same_as(b.space())) throw AmbientMismatch("add: ambient spaces differ");
  const Subspace common = intersect(a.domain(), b.domain());
  const Matrix xa = a.domain().basis().adjoint() * a.space().gram() * common.basis();
  const Matrix xb = b.domain().basis().adjoint() * b.space().gram() * common.basis();
  Matrix coeff = xa.adjoint() * a.coeff() * xa + xb.adjoint() * b.coeff() * xb;
  return SesqForm(common, std::move(coeff));
}

SesqForm scale(const SesqForm& a, double s) {
  if (s < 0.0) throw Error("scale: factor must be >= 0");
  return SesqForm(a.domain(), s * a.coeff());
}

double graph_norm(const SesqForm& a, const Vector& u) {
  if (!a.is_sectorial()) throw NotSectorialError("graph_norm: form has no canonical sector");
  if (!a.domain().contains_vector(u))
    throw DomainViolation("graph_norm: argument outside the form domain");
  const Vector x = a.domain().coords(u);
  const double re = quad_value(a.coeff(), x, x).real();
  const double gamma = a.sector()->vertex;
  const double n2 = x.squaredNorm();  // domain basis is G-orthonormal
  return std::sqrt(std::max(0.0, re + (1.0 - gamma) * n2));
}

std::pair<double, double> sector_cs_bound(const SesqForm& b, const Vector& u, const Vector& v) {
  const auto tan0 = tan_semi_angle_at_vertex(b, 0.0);
  if (!tan0) throw NotSectorialError("sector_cs_bound: form does not have vertex 0");
  const Complex buv = evaluate(b, u, v);
  const double re_u = std::max(0.0, evaluate(b, u).real());
  const double re_v = std::max(0.0, evaluate(b, v).real());
  const double lhs = std::abs(buv);
  const double rhs = (1.0 + *tan0) * std::sqrt(re_u) * std::sqrt(re_v);
  return {lhs, rhs};
}

std::optional<BoundConstants> form_bound_constants(const SesqForm& a, const SesqForm& b) {
  if (!a.domain().equals(b.domain()))
    throw DomainViolation("form_bound_constants: forms must share their domain");
  // Express b in the coordinates of a's domain basis.
  const Matrix x = b.domain().basis().adjoint() * b.space().gram() * a.domain().basis();
  const Matrix mb = x.adjoint() * b.coeff() * x;
  const Matrix ra = a.hermitian_part();
  const Index k = ra.rows();
  const Matrix id = Matrix::Identity(k, k);
  if (k == 0) return BoundConstants{0.0, 0.0};

  const double ratio = mb.norm() / std::max(ra.norm(), 1e-30);
  std::vector<double> candidates{0.0};
  for (int j = -6; j <= 6; ++j) candidates.push_back(std::ldexp(ratio, j));

  bool found = false;
  BoundConstants best{0.0, 0.0};
  double best_score = 0.0;
  for (double c1 : candidates) {
    const double c2 = detail::smallest_c2(mb, ra, id, c1);
    const double score = std::max(c1, c2);
    if (!found || score < best_score - 1e-15 ||
        (std::abs(score - best_score) <= 1e-15 && c1 < best.c1)) {
      found = true;
      best = BoundConstants{c1, c2};
      best_score = score;
    }
  }
  // Finite dimension always admits constants (c1 = 0, c2 = ||b||).
  return best;
}

bool form_bound_feasible(const SesqForm& a, const SesqForm& b, double c1, double c2,
                         double slack) {
  if (!a.domain().equals(b.domain()))
    throw DomainViolation("form_bound_feasible: forms must share their domain");
  const Matrix x = b.domain().basis().adjoint() * b.space().gram() * a.domain().basis();
  const Matrix mb = x.adjoint() * b.coeff() * x;
  const Matrix ra = a.hermitian_part();
  const Matrix id = Matrix::Identity(ra.rows(), ra.cols());
  return detail::modulus_bound_feasible(mb, ra, id, c1, c2, slack);
}

}  // namespace sectoria
