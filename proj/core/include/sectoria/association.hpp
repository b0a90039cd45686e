#pragma once

#include <cstdint>
#include <optional>

#include "sectoria/forms.hpp"
#include "sectoria/relations.hpp"

namespace sectoria {

// A sesquilinear form presented on an auxiliary Hilbert space V together
// with a continuous map j : V -> H.  Models forms whose natural domain is
// not a subspace of H; with a non-injective map this reaches the phenomena
// that plain SesqForm (always closed in finite dimension) cannot express.
//
// Conventions: elements of V are coordinate vectors u in C^m with inner
// product (u,v)_V = v^* G_V u; the form is a(u,v) = v^* coeff u (the Gram
// matrix does not enter the pairing).
class RepresentedForm {
 public:
  RepresentedForm(HSpace target, HSpace aux, Matrix map, Matrix coeff,
                  double tol = kDefaultRankTol);

  const HSpace& target() const { return target_; }
  const HSpace& aux() const { return aux_; }
  const Matrix& map() const { return map_; }      // d x m
  const Matrix& coeff() const { return coeff_; }  // m x m
  double tol() const { return tol_; }

  Matrix hermitian_part() const;
  // Smallest M with |a(u,v)| <= M ||u||_V ||v||_V.
  double continuity_constant() const;

  // Same (V, j) carrying a different form.
  RepresentedForm with_coeff(Matrix coeff) const;
  // Restriction of V to a subspace (j and the form restrict along).
  RepresentedForm restricted_to_aux(const Subspace& sub) const;

 private:
  HSpace target_;
  HSpace aux_;
  Matrix map_;
  Matrix coeff_;
  double tol_;
};

struct Ellipticity {
  double omega = 0.0;
  double mu = 0.0;
};

// Certified pair with Re a(u) + omega ||j(u)||_H^2 >= mu ||u||_V^2.  The
// search fixes the scale first (largest feasible mu at the first power-of-two
// omega that works, halved for slack) and then bisects omega down to a
// near-minimal value; empty when no pair with mu > 0 exists.
std::optional<Ellipticity> check_j_elliptic(const RepresentedForm& rf);
bool j_elliptic_feasible(const RepresentedForm& rf, double omega, double mu,
                         double slack = 1e-10);

// The m-sectorial graph of a closed form:
//   A = { (u, f) in D(a) x H : a(u,v) = (f,v)_H for all v in D(a) }.
// Every form on a finite-dimensional subspace is closed; the certification
// of the produced graph throws NotSectorialError when it fails.
LinearRelation graph_of_closed_form(const SesqForm& a);

// The m-sectorial graph of (a, j):
//   A = { (j(u), f) : u in V, a(u,v) = (f, j(v))_H for all v in V }.
// Requires a continuous j-elliptic representation; throws
// EllipticityFailure otherwise.
LinearRelation graph_of_represented_form(const RepresentedForm& rf);

// D(a) itself as the auxiliary space, carrying the graph-norm inner product
// Re a(u,v) + (1 - gamma)(u,v)_H, with j the inclusion into H.
RepresentedForm wrap_form(const SesqForm& a);

// Desk-scale consistency check of the sequential association: for sampled
// members (x, f) of the relation with x in D(a), the constant sequence
// u_n = x witnesses the sequential definition; for perturbed non-members no
// one-step witness exists.
bool sequential_association_check(const SesqForm& a, const LinearRelation& rel, int trials,
                                  std::uint64_t seed);

// Consistency bridge between the two associations.  q maps D(a)-coordinates
// into V.  Verifies the hypotheses -- q(D(a)) dense in V, two-sided norm
// equivalence against the graph norm, j(q(u)) = u, and the form transport
// a~(q u, q v) = a(u, v) -- throwing HypothesisViolation("density" |
// "norm_equivalence" | "jq" | "form_match") on failure, then decides whether
// the two graphs coincide as subspaces of H x H.
bool represented_form_consistency(const SesqForm& a, const RepresentedForm& rf, const Matrix& q);

}  // namespace sectoria
