#pragma once

#include <optional>
#include <utility>

#include "sectoria/hilbert.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

// Vertex gamma and semi-angle theta of a sector
//   gamma + { r e^{i alpha} : r >= 0, |alpha| <= theta },  theta in [0, pi/2).
struct SectorParams {
  double vertex = 0.0;
  double tan_theta = 0.0;
};

// A sesquilinear form on a subspace D(a) of H, stored in domain coordinates:
// a(u,v) = y^* M x for u = basis x, v = basis y.  Linear in u, conjugate
// linear in v.  Storing the form in domain coordinates (rather than ambient
// ones) keeps domain violations detectable.
//
// The sector parameters cached at construction are canonical: the vertex is
// the maximal one (the smallest eigenvalue of the Hermitian part), and the
// semi-angle is the minimal one for that vertex.  A form may admit sectors
// with smaller vertices even when no sector with the maximal vertex exists;
// such forms carry the NotSectorial marker (empty optional) and
// tan_semi_angle_at_vertex() still answers vertex-specific queries.
class SesqForm {
 public:
  SesqForm(Subspace domain, Matrix coeff);

  static SesqForm zero(const HSpace& space, double tol = kDefaultRankTol);
  static SesqForm identity(const HSpace& space, double tol = kDefaultRankTol);
  // Form a(u,v) = (M u, v)_H with domain H.
  static SesqForm from_operator(const HSpace& space, const Matrix& m,
                                double tol = kDefaultRankTol);

  const Subspace& domain() const { return domain_; }
  const Matrix& coeff() const { return coeff_; }
  const HSpace& space() const { return domain_.space(); }
  const std::optional<SectorParams>& sector() const { return sector_; }
  bool is_sectorial() const { return sector_.has_value(); }

  Matrix hermitian_part() const;  // (M + M^*)/2
  Matrix skew_part() const;       // (M - M^*)/(2i), Hermitian

  // Same form on a smaller domain (sub must be contained in the domain).
  SesqForm restricted_to(const Subspace& sub) const;

 private:
  Subspace domain_;
  Matrix coeff_;
  std::optional<SectorParams> sector_;
};

Complex evaluate(const SesqForm& a, const Vector& u, const Vector& v);
// a(u) = a(u,u)
Complex evaluate(const SesqForm& a, const Vector& u);

std::optional<SectorParams> sector_params(const SesqForm& a);
// Minimal tan(theta) such that a(u) - vertex ||u||^2 lies in Sigma_theta for
// all u in D(a); empty when no semi-angle below pi/2 works at this vertex.
std::optional<double> tan_semi_angle_at_vertex(const SesqForm& a, double vertex);

SesqForm add(const SesqForm& a, const SesqForm& b);
SesqForm scale(const SesqForm& a, double s);

// (Re a(u) + (1 - gamma) ||u||_H^2)^{1/2} with the cached canonical vertex.
double graph_norm(const SesqForm& a, const Vector& u);

// lhs = |b(u,v)|, rhs = (1 + tan theta)(Re b(u))^{1/2}(Re b(v))^{1/2} with
// the minimal vertex-0 semi-angle; requires b sectorial with vertex 0.
std::pair<double, double> sector_cs_bound(const SesqForm& b, const Vector& u, const Vector& v);

struct BoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Constants with |b(u)| <= c1 Re a(u) + c2 ||u||_H^2 on the common domain.
// c1 is chosen by a line search, c2 as the smallest feasible value for that
// c1 (largest eigenvalue of a one-parameter Hermitian family).  In finite
// dimension constants always exist; the optional return keeps the contract
// explicit.
std::optional<BoundConstants> form_bound_constants(const SesqForm& a, const SesqForm& b);
bool form_bound_feasible(const SesqForm& a, const SesqForm& b, double c1, double c2,
                         double slack = 1e-10);

namespace detail {

// Sector analysis of the values { x^* w x : x in C^k } against ||x||^2.
// Returns the canonical (maximal-vertex) parameters, or empty if the
// skew part does not vanish on the kernel of the shifted Hermitian part.
std::optional<SectorParams> sector_of_quadratic(const Matrix& w, double tol);
std::optional<double> quadratic_tan_at_vertex(const Matrix& w, double vertex, double tol);
// q^{-1/2} w q^{-1/2} for Hermitian positive definite q.
Matrix whiten(const Matrix& w, const Matrix& q);
// Smallest c2 >= 0 with  |x^* m x| <= x^* (c1 ra + c2 k) x  for all x, where
// k is Hermitian PD; empty when c2 grows without bound (never for PD k).
double smallest_c2(const Matrix& m, const Matrix& ra, const Matrix& k, double c1);
bool modulus_bound_feasible(const Matrix& m, const Matrix& ra, const Matrix& k, double c1,
                            double c2, double slack);

}  // namespace detail

}  // namespace sectoria
