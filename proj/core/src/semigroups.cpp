#include "sectoria/semigroups.hpp"

#include <cmath>

#include "sectoria/rng.hpp"

namespace sectoria {

Matrix semigroup(const LinearRelation& a, double t) {
  if (!(t > 0.0)) throw Error("semigroup: t must be > 0");
  if (!certify_m_sectorial(a))
    throw NotMSectorialError("semigroup: relation is not m-sectorial");
  const SingleValuedPart part = single_valued_part(a);
  if (!part.decomposition_ok)
    throw NotMSectorialError("semigroup: direct-sum decomposition failed");
  const Matrix core = matrix_exp(Matrix(-t * part.op));
  return part.domain.basis() * core * part.domain.basis().adjoint() * a.ambient().gram();
}

Matrix resolvent_power_approx(const LinearRelation& a, double t, long n) {
  if (!(t > 0.0)) throw Error("resolvent_power_approx: t must be > 0");
  if (n < 1) throw Error("resolvent_power_approx: n must be >= 1");
  const double s = t / static_cast<double>(n);
  // I + s A = { (x, x + s y) }.
  const Matrix x = a.first_block();
  const Matrix y = a.second_block();
  const LinearRelation stepped =
      LinearRelation::from_pairs(a.ambient(), x, Matrix(x + s * y), a.tol());
  const Inversion inv = invert(stepped);
  if (!inv.invertible)
    throw NotInResolventSet("resolvent_power_approx: I + (t/n) A is not invertible");
  return matrix_power(inv.inverse, n);
}

Matrix trotter_product(const LinearRelation& a, const Matrix& projector, double t, long n) {
  if (!(t > 0.0)) throw Error("trotter_product: t must be > 0");
  if (n < 1) throw Error("trotter_product: n must be >= 1");
  const Index d = a.ambient().dim();
  if (projector.rows() != d || projector.cols() != d)
    throw DimensionMismatch("trotter_product: projector must be d x d");
  const double scale = std::max(1.0, projector.norm());
  if ((projector * projector - projector).norm() > 1e-10 * scale)
    throw ProjectorViolation("trotter_product: P is not idempotent");
  const Matrix& g = a.ambient().gram();
  if ((g * projector - projector.adjoint() * g).norm() > 1e-10 * scale)
    throw ProjectorViolation("trotter_product: P is not self-adjoint");
  const Matrix factor = semigroup(a, t / static_cast<double>(n)) * projector;
  return matrix_power(factor, n);
}

SemigroupEval semigroup_eval(const LinearRelation& a, double t) {
  return SemigroupEval{a, t, semigroup(a, t)};
}

std::vector<Vector> probe_vectors(const HSpace& space, int extra, std::uint64_t seed) {
  std::vector<Vector> probes;
  const Index d = space.dim();
  probes.reserve(static_cast<size_t>(d + extra));
  for (Index i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e(i) = 1.0;
    const double norm = space.norm(e);
    probes.push_back(e / norm);
  }
  Rng rng = Rng::derived(seed, 0);
  for (int i = 0; i < extra; ++i) probes.push_back(rng.unit_vector(space));
  return probes;
}

ConvergenceReport product_formula_report(const LinearRelation& a, const Matrix& p,
                                         const LinearRelation& a_inf, double t,
                                         std::span<const long> schedule) {
  const Matrix target = semigroup(a_inf, t);
  const std::vector<Vector> probes = probe_vectors(a.ambient());
  std::vector<long> ns(schedule.begin(), schedule.end());
  std::vector<double> errors;
  errors.reserve(ns.size());
  for (long n : ns) {
    const Matrix diff = trotter_product(a, p, t, n) - target;
    double worst = 0.0;
    for (const Vector& f : probes) worst = std::max(worst, a.ambient().norm(diff * f));
    errors.push_back(worst);
  }
  return make_report("product_formula", std::move(ns), std::move(errors));
}

}  // namespace sectoria
