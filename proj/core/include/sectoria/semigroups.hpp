#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sectoria/relations.hpp"
#include "sectoria/report.hpp"

namespace sectoria {

// Seed of the deterministic probe batch used by every convergence report.
inline constexpr std::uint64_t kProbeSeed = 0x5EC7AB1E0001ULL;

// e^{-tA} for an m-sectorial relation: exponentiate the single-valued part
// on closure(D(A)) and extend by 0 on D(A)^perp.  The resolvent-power limit
// below is the defining formula; tests verify the limit, production code
// uses the closed form.
Matrix semigroup(const LinearRelation& a, double t);

// ((I + (t/n) A)^{-1})^n, the defining approximation of e^{-tA}; serves as
// the independent oracle for semigroup().
Matrix resolvent_power_approx(const LinearRelation& a, double t, long n);

// (e^{-(t/n)A} P)^n for an orthogonal projector P.
Matrix trotter_product(const LinearRelation& a, const Matrix& projector, double t, long n);

// Bundled semigroup value, convenient for property checks.
struct SemigroupEval {
  LinearRelation relation;
  double t;
  Matrix matrix;
};
SemigroupEval semigroup_eval(const LinearRelation& a, double t);

// Deterministic probe set: the canonical basis plus `extra` seeded unit
// vectors, all normalized in the space's inner product.
std::vector<Vector> probe_vectors(const HSpace& space, int extra = 16,
                                  std::uint64_t seed = kProbeSeed);

// errors[i] = max over the probe set of
//   || trotter_product(a, p, t, n_i) f - semigroup(a_inf, t) f ||_H
// (strong, per-vector convergence rather than operator-norm convergence).
ConvergenceReport product_formula_report(const LinearRelation& a, const Matrix& p,
                                         const LinearRelation& a_inf, double t,
                                         std::span<const long> schedule);

}  // namespace sectoria
