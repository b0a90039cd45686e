#include "sectoria/rng.hpp"

#include <cmath>

namespace sectoria {

std::uint64_t Rng::split(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng Rng::derived(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xA0761D6478BD642FULL * (stream + 1));
  return Rng(split(state));
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

long Rng::uniform_int(long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  // Modulo bias is irrelevant for the tiny spans used here, but rejection
  // keeps the documented stream exact.
  const std::uint64_t limit = (~0ULL / span) * span;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + static_cast<long>(x % span);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double two_pi = 6.283185307179586476925286766559;
  spare_ = mag * std::sin(two_pi * u2);
  have_spare_ = true;
  return mag * std::cos(two_pi * u2);
}

Complex Rng::cnormal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

Vector Rng::cnormal_vector(Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = cnormal();
  return v;
}

Matrix Rng::cnormal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

Vector Rng::unit_vector(const HSpace& space) {
  Vector v = cnormal_vector(space.dim());
  double n = space.norm(v);
  while (n < 1e-8) {
    v = cnormal_vector(space.dim());
    n = space.norm(v);
  }
  return v / n;
}

Subspace Rng::random_subspace(const HSpace& space, Index dim, double tol) {
  if (dim <= 0) return Subspace::zero(space, tol);
  return Subspace::orthonormalize(space, cnormal_matrix(space.dim(), dim), tol);
}

}  // namespace sectoria
