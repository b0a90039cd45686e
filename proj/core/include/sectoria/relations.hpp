#pragma once

#include <optional>

#include "sectoria/forms.hpp"
#include "sectoria/hilbert.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

// A linear relation (graph) in H: a subspace of H x H, stored as a
// G+G-orthonormal basis of a subspace of C^{2d} with pairs (x, y) stacked as
// (x; y).  Operators and genuinely multivalued graphs share this
// representation; all algebra reduces to the subspace calculus.
class LinearRelation {
 public:
  LinearRelation(HSpace ambient, Subspace graph);

  static LinearRelation from_operator(const HSpace& space, const Matrix& m,
                                      double tol = kDefaultRankTol);
  // Relation spanned by the pairs (xs.col(i), ys.col(i)).
  static LinearRelation from_pairs(const HSpace& space, const Matrix& xs, const Matrix& ys,
                                   double tol = kDefaultRankTol);
  // { 0 } x H
  static LinearRelation zero_domain_full_range(const HSpace& space,
                                               double tol = kDefaultRankTol);

  const HSpace& ambient() const { return ambient_; }
  const HSpace& pair_space() const { return graph_.space(); }
  const Subspace& graph() const { return graph_; }
  Index graph_dim() const { return graph_.dim(); }
  double tol() const { return graph_.tol(); }

  Matrix first_block() const;   // d x k, inputs
  Matrix second_block() const;  // d x k, outputs

  bool member(const Vector& x, const Vector& y) const;

 private:
  HSpace ambient_;
  Subspace graph_;
};

Subspace domain(const LinearRelation& a);
Subspace range(const LinearRelation& a);

struct SingleValuedness {
  bool single_valued = false;
  Subspace multivalued_part;  // { y : (0, y) in A }
};
SingleValuedness is_single_valued(const LinearRelation& a);

// (A + lambda I) = { (x, y + lambda x) : (x, y) in A }
LinearRelation shift(const LinearRelation& a, Complex lambda);
// { (y, x) : (x, y) in A }
LinearRelation reflect(const LinearRelation& a);

struct Inversion {
  bool invertible = false;
  Matrix inverse;            // valid iff invertible
  LinearRelation reflected;  // always the reflected graph
};
// A is invertible iff it is surjective and the reflected graph is
// single-valued (closedness is automatic in finite dimension).
Inversion invert(const LinearRelation& a);

// (A - lambda I)^{-1}; throws NotInResolventSet outside the resolvent set.
Matrix resolvent(const LinearRelation& a, Complex lambda);

// Canonical m-sectoriality decision, mirroring the form canonicalization:
// gamma is the maximal vertex (the infimum of the pair products
// Re (x,y)_H / ||x||^2), theta the minimal semi-angle for it, and the
// result is empty when no sector with that vertex contains the pair
// products or when A - (gamma - 1) I fails to be invertible.
std::optional<SectorParams> is_m_sectorial(const LinearRelation& a);

// Existential certificate: parameters of some sector that works.  Agrees
// with is_m_sectorial when the canonical analysis succeeds; otherwise
// retreats to the vertex gamma_max - max(1, |gamma_max|), at which every
// relation whose multivalued part is orthogonal to its domain is sectorial.
// The semigroup and association pipelines certify with this.
std::optional<SectorParams> certify_m_sectorial(const LinearRelation& a);

struct SingleValuedPart {
  Matrix op;                      // matrix of the operator part in a basis of D(A)
  Subspace domain;                // D(A) (its own closure in finite dimension)
  bool decomposition_ok = false;  // A == graph(op) + {0} x D(A)^perp verified
};
// Throws DecompositionFailure when the direct-sum reconstruction fails
// (the relation was not m-sectorial).
SingleValuedPart single_valued_part(const LinearRelation& a);

bool relation_equal(const LinearRelation& a, const LinearRelation& b);

}  // namespace sectoria
