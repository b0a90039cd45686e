#pragma once

#include <optional>
#include <span>

#include "sectoria/association.hpp"
#include "sectoria/forms.hpp"
#include "sectoria/relations.hpp"
#include "sectoria/report.hpp"
#include "sectoria/series.hpp"

namespace sectoria {

// Absorption data: a base form in its auxiliary-space representation and an
// absorbed form b on the same auxiliary space, sectorial with vertex 0.
// The family a_n = a + (n-1) b (so A_1 is the graph of a itself) has a
// strong resolvent limit supported where b vanishes.
class AbsorptionProblem {
 public:
  AbsorptionProblem(RepresentedForm base, Matrix absorbed,
                    std::optional<BoundConstants> bounds = std::nullopt);

  // Wraps a plain form (auxiliary space = D(a) with the graph-norm inner
  // product) and restricts b to it; requires D(a) = D(b).  Bound constants
  // |b(u)| <= c1 Re a(u) + c2 ||u||_H^2 are computed and attached.
  static AbsorptionProblem from_forms(const SesqForm& a, const SesqForm& b);

  const RepresentedForm& base() const { return base_; }
  const Matrix& absorbed() const { return absorbed_; }
  const std::optional<BoundConstants>& bounds() const { return bounds_; }
  AbsorptionProblem with_bounds(BoundConstants bounds) const;

  // Near-minimal constants for |b(u)| <= c1 Re a(u) + c2 ||j(u)||_H^2.
  BoundConstants compute_bounds() const;

 private:
  RepresentedForm base_;
  Matrix absorbed_;
  std::optional<BoundConstants> bounds_;
};

// Graph of a + (n-1) b; n = 1 returns the graph of a.
LinearRelation absorption_graphs(const AbsorptionProblem& p, long n);

// The strong resolvent limit: restrict (a, j) to the vanishing set
// Z_inf = { u in V : b(u) = 0 }, computed exactly as the kernel of the
// Hermitian part of b.  Requires bound constants (throws
// MissingBoundConstants otherwise).
LinearRelation limit_graph_absorption(const AbsorptionProblem& p);

// Orthogonal projector of H onto the closure of { u in D(a) : b(u) = 0 }.
// Valid for a closed in the represented sense (injective j); a closable
// representation is reduced first by quotienting ker j, which requires both
// forms to vanish against it.  Throws NotClosableFailure when no such
// reduction exists (the projection-free route is limit_graph_absorption).
Matrix vanishing_set_projector(const AbsorptionProblem& p);

// Orthogonal projector onto ((B + B^*)(H))^perp = ker(B + B^*) for the
// bounded-operator case b(u,v) = (B u, v)_H; the representation of b is
// checked against B (MismatchWithFormB).
Matrix bounded_part_projector(const AbsorptionProblem& p, const Matrix& b_op);

struct AbsorptionReport {
  ConvergenceReport resolvent_track;  // ||(A_n + I)^{-1} f - (A_inf + I)^{-1} f||
  ConvergenceReport product_track;    // ||(e^{-(t/n)A} P)^n f - e^{-t A_inf} f||
};

AbsorptionReport verify_absorption(const AbsorptionProblem& p, const Matrix& projector, double t,
                                   std::span<const long> schedule);

// The rank-one-defect scenario on Z = C^d x C: j(u, lambda) = u, the base
// form a((u1,l1),(u2,l2)) = l1 conj(l2), and b = ((I - P0) ., .)_Z with P0
// the projector onto span(phi, 1).  The base graph is the zero operator,
// the limit graph is { (c phi, c phi + y) : y perp phi } with semigroup
// e^{-t} P1, and no projector P can satisfy the product formula, since
// (e^{-(t/n) 0} P)^n = P for every n.
struct Example43 {
  AbsorptionProblem problem;
  Vector phi;
  Matrix p0;                   // projector in Z onto span(phi, 1)
  Matrix p1;                   // projector in H onto span(phi)
  LinearRelation base_graph;   // computed graph of (a, j)
  Subspace z_inf;              // computed vanishing set in Z
  LinearRelation limit_graph;  // computed limit
  LinearRelation expected_limit;

  double base_zero_deviation() const;               // || base - zero operator ||
  bool z_inf_is_span_phi_one() const;               // Z_inf = span(phi, 1)
  bool limit_matches_expected() const;              // A_inf as predicted
  double semigroup_deviation(double t) const;       // || e^{-t A_inf} - e^{-t} P1 ||
  // Product-formula error of candidate projector P at time t and step n;
  // equals || P - e^{-t A_inf} || ... applied to probes (strong mode).
  double product_error(const Matrix& p, double t, long n) const;
};

Example43 example43_scenario(int d, const Vector& phi);

// Discretized boundary-absorption analogue: the quadratic sum of forward
// differences of a grid function as the base form on C^d, absorbed boundary
// form b(u) = |u_1|^2 + |u_d|^2.  The vanishing-set projector is the
// projector onto the interior coordinates.
AbsorptionProblem grid_boundary_absorption(int d);

}  // namespace sectoria
