#pragma once

#include <optional>

#include "sectoria/types.hpp"

namespace sectoria {

// A finite-dimensional complex Hilbert space.  The inner product is the
// standard one on C^d unless a Hermitian positive-definite Gram matrix G is
// attached, in which case (u,v) = v^* G u (linear in the first argument).
class HSpace {
 public:
  explicit HSpace(Index dim);
  HSpace(Index dim, Matrix gram);

  Index dim() const { return dim_; }
  bool standard() const { return standard_; }
  const Matrix& gram() const { return gram_; }
  // Lower-triangular L with G = L L^*.
  const Matrix& gram_factor() const { return factor_; }

  Complex inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& u) const;
  // Operator norm of M as a map (H, G) -> (H, G).
  double operator_norm(const Matrix& m) const;
  // G-adjoint of M: the unique M* with (Mu, v) = (u, M* v).
  Matrix adjoint(const Matrix& m) const;

  bool same_as(const HSpace& other, double tol = 1e-12) const;

 private:
  Index dim_;
  bool standard_;
  Matrix gram_;
  Matrix factor_;
};

// A linear subspace of an HSpace, stored as a d x k matrix whose columns are
// G-orthonormal.  k = 0 encodes the zero subspace.  All set-level decisions
// (rank, membership, equality) use the stored relative tolerance.
class Subspace {
 public:
  // G-orthonormal span of the columns of `spanning`; singular values below
  // tol * (largest singular value) are truncated.
  static Subspace orthonormalize(const HSpace& space, const Matrix& spanning,
                                 double tol = kDefaultRankTol);
  static Subspace zero(const HSpace& space, double tol = kDefaultRankTol);
  static Subspace full(const HSpace& space, double tol = kDefaultRankTol);

  const HSpace& space() const { return space_; }
  const Matrix& basis() const { return basis_; }
  Index ambient_dim() const { return space_.dim(); }
  Index dim() const { return basis_.cols(); }
  double tol() const { return tol_; }

  // Orthogonal projector of H onto the subspace: P = B B^* G.
  Matrix projector() const;
  // Coordinates of v with respect to the basis (exact when v lies in the
  // subspace): x = B^* G v.
  Vector coords(const Vector& v) const;
  Vector embed(const Vector& x) const { return basis_ * x; }
  // G-norm of v - Pv.
  double distance(const Vector& v) const;
  bool contains_vector(const Vector& v) const;
  bool contains(const Subspace& other) const;
  bool equals(const Subspace& other) const;

 private:
  Subspace(HSpace space, Matrix basis, double tol);

  HSpace space_;
  Matrix basis_;
  double tol_;
};

Subspace ortho_complement(const Subspace& s);
Subspace subspace_sum(const Subspace& s, const Subspace& t);
// Computed as complement(sum(complement(s), complement(t))).
Subspace intersect(const Subspace& s, const Subspace& t);

// Matrix exponential (scaling-and-squaring Pade).
Matrix matrix_exp(const Matrix& m);
// m^n for n >= 0 by binary exponentiation.
Matrix matrix_power(const Matrix& m, long n);

// Orthonormal basis of { x : a x = 0 }, singular values below
// tol * sigma_max are treated as zero.  Standard coordinates.
Matrix kernel_basis(const Matrix& a, double tol = kDefaultRankTol);

}  // namespace sectoria
