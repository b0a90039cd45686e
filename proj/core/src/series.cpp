#include "sectoria/series.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sectoria/semigroups.hpp"

namespace sectoria {

namespace {

Matrix hermitian_of(const Matrix& m) { return 0.5 * (m + m.adjoint().eval()); }

double tail_factor_at(const TailRule& tail, long n, long head) {
  // Multiple of b_N absorbed into a_n by the terms N+1..n.
  if (n <= head) return 0.0;
  if (std::holds_alternative<ZeroTail>(tail)) return 0.0;
  if (std::holds_alternative<ConstantTail>(tail)) return static_cast<double>(n - head);
  const double rho = std::get<GeometricTail>(tail).rho;
  // rho + rho^2 + ... + rho^{n-N}
  return rho * (1.0 - std::pow(rho, static_cast<double>(n - head))) / (1.0 - rho);
}

}  // namespace

FormSequence::FormSequence(std::vector<SesqForm> head, TailRule tail)
    : head_(std::move(head)), tail_(tail), common_tan_theta_(0.0) {
  if (head_.empty()) throw Error("FormSequence: head must contain at least one form");
  for (const SesqForm& b : head_) {
    if (!b.space().same_as(head_.front().space()))
      throw AmbientMismatch("FormSequence: head forms live in different spaces");
    const auto tan0 = tan_semi_angle_at_vertex(b, 0.0);
    if (!tan0)
      throw NotSectorialError("FormSequence: head form is not sectorial with vertex 0");
    common_tan_theta_ = std::max(common_tan_theta_, *tan0);
  }
  if (const auto* geo = std::get_if<GeometricTail>(&tail_)) {
    if (!(geo->rho > 0.0 && geo->rho < 1.0))
      throw Error("FormSequence: geometric ratio must lie in (0, 1)");
  }
}

SesqForm FormSequence::term(long k) const {
  if (k < 1) throw Error("FormSequence::term: k must be >= 1");
  const long n = head_count();
  if (k <= n) return head_[static_cast<size_t>(k - 1)];
  if (std::holds_alternative<ZeroTail>(tail_)) return SesqForm::zero(space());
  if (std::holds_alternative<ConstantTail>(tail_)) return head_.back();
  const double rho = std::get<GeometricTail>(tail_).rho;
  return scale(head_.back(), std::pow(rho, static_cast<double>(k - n)));
}

SesqForm FormSequence::partial_sum(long n) const {
  if (n < 1) throw Error("FormSequence::partial_sum: n must be >= 1");
  const long head = head_count();
  SesqForm sum = head_.front();
  for (long k = 2; k <= std::min(n, head); ++k) sum = add(sum, head_[static_cast<size_t>(k - 1)]);
  const double extra = tail_factor_at(tail_, n, head);
  if (extra > 0.0) sum = add(sum, scale(head_.back(), extra));
  return sum;
}

std::vector<LinearRelation> partial_sum_graphs(const FormSequence& seq, long n) {
  if (n < 1) throw Error("partial_sum_graphs: n must be >= 1");
  std::vector<LinearRelation> graphs;
  graphs.reserve(static_cast<size_t>(n));
  for (long k = 1; k <= n; ++k) graphs.push_back(graph_of_closed_form(seq.partial_sum(k)));
  return graphs;
}

SesqForm limit_form(const FormSequence& seq) {
  const long head = seq.head_count();
  const SesqForm head_sum = seq.partial_sum(head);
  if (std::holds_alternative<ZeroTail>(seq.tail())) return head_sum;
  if (const auto* geo = std::get_if<GeometricTail>(&seq.tail())) {
    return add(head_sum, scale(seq.head(static_cast<int>(head)), geo->rho / (1.0 - geo->rho)));
  }
  // Constant tail: the domain collapses to the vanishing set of b_N, exact
  // as the kernel of the Hermitian part (vertex 0 makes Re b(u) = 0 and
  // b(u) = 0 equivalent).
  const SesqForm& last = seq.head(static_cast<int>(head));
  const Matrix null = kernel_basis(last.hermitian_part(), last.domain().tol());
  const Subspace vanishing = Subspace::orthonormalize(
      seq.space(), Matrix(last.domain().basis() * null), last.domain().tol());
  const Subspace dom = intersect(head_sum.domain(), vanishing);
  return head_sum.restricted_to(dom);
}

SeriesLimit limit_graph_and_convergence(const FormSequence& seq, std::span<const long> schedule) {
  const SesqForm a_inf = limit_form(seq);
  LinearRelation a_inf_graph = graph_of_closed_form(a_inf);
  const Matrix r_inf = resolvent(a_inf_graph, Complex(-1.0));
  const std::vector<Vector> probes = probe_vectors(seq.space());

  std::vector<long> ns(schedule.begin(), schedule.end());
  std::vector<double> errors;
  errors.reserve(ns.size());
  double norm_slack = std::numeric_limits<double>::infinity();
  double energy_slack = std::numeric_limits<double>::infinity();

  for (long n : ns) {
    const SesqForm a_n = seq.partial_sum(n);
    const LinearRelation graph_n = graph_of_closed_form(a_n);
    const Matrix r_n = resolvent(graph_n, Complex(-1.0));
    double worst = 0.0;
    for (const Vector& f : probes) {
      const Vector u = r_n * f;
      worst = std::max(worst, seq.space().norm(Vector(u - r_inf * f)));
      const double fn = seq.space().norm(f);
      norm_slack = std::min(norm_slack, fn - seq.space().norm(u));
      // Re a_n(u_n) via the domain projection of u_n (the residual is of
      // the order of the solve round-off).
      const Vector x = a_n.domain().coords(u);
      const double energy = ((x.adjoint() * a_n.coeff() * x)(0, 0)).real();
      energy_slack = std::min(energy_slack, fn * fn - energy);
    }
    errors.push_back(worst);
  }
  ConvergenceReport report = make_report("series_resolvent", std::move(ns), std::move(errors));
  return SeriesLimit{std::move(a_inf_graph), std::move(report), norm_slack, energy_slack};
}

Tower::Tower(const FormSequence& seq, int depth)
    : depth_(depth), tail_(seq.tail()), tol_(kDefaultRankTol) {
  if (depth < 1) throw Error("Tower: depth must be >= 1");
  const HSpace& h = seq.space();

  // Level 0 is H itself with its own norm.
  level_domains_.push_back(Subspace::full(h));
  tol_ = level_domains_.front().tol();

  for (int n = 1; n <= depth; ++n) level_domains_.push_back(seq.partial_sum(n).domain());

  // Lifted forms:  b~_{nk}(q_n u, q_n v) = b_k(u, v)  in level coordinates.
  lifted_forms_.resize(static_cast<size_t>(depth) + 1);
  lifted_sums_.resize(static_cast<size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    const Subspace& dom_n = level_domains_[static_cast<size_t>(n)];
    const Index kn = dom_n.dim();
    auto& row = lifted_forms_[static_cast<size_t>(n)];
    row.resize(static_cast<size_t>(n) + 1);
    row[0] = Matrix::Identity(kn, kn);  // b_0 = (.,.)_H restricted
    Matrix sum = Matrix::Zero(kn, kn);
    for (int k = 1; k <= n; ++k) {
      const SesqForm b_k = seq.term(k);
      const Matrix x = b_k.domain().basis().adjoint() * h.gram() * dom_n.basis();
      row[static_cast<size_t>(k)] = x.adjoint() * b_k.coeff() * x;
      sum += row[static_cast<size_t>(k)];
    }
    lifted_sums_[static_cast<size_t>(n)] = sum;

    Matrix gram = Matrix::Zero(kn, kn);
    for (int k = 0; k <= n; ++k)
      gram += std::ldexp(1.0, -(n - k)) * hermitian_of(row[static_cast<size_t>(k)]);
    level_spaces_.emplace_back(kn, std::move(gram));
  }

  // Transfer maps Phi_{nm} = coordinates of the inclusion D(a_n) into D(a_m).
  phi_.resize(static_cast<size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    phi_[static_cast<size_t>(n)].resize(static_cast<size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
      phi_[static_cast<size_t>(n)][static_cast<size_t>(m)] =
          level_domains_[static_cast<size_t>(m)].basis().adjoint() * h.gram() *
          level_domains_[static_cast<size_t>(n)].basis();
    }
  }

  // Direct sum with the block Gram.
  offsets_.resize(static_cast<size_t>(depth) + 2);
  offsets_[0] = 0;
  for (int n = 0; n <= depth; ++n)
    offsets_[static_cast<size_t>(n) + 1] =
        offsets_[static_cast<size_t>(n)] + level_spaces_[static_cast<size_t>(n)].dim();
  const Index total = offsets_.back();
  Matrix big_gram = Matrix::Zero(total, total);
  for (int n = 0; n <= depth; ++n) {
    const Index off = offsets_[static_cast<size_t>(n)];
    const Index kn = level_spaces_[static_cast<size_t>(n)].dim();
    big_gram.block(off, off, kn, kn) = level_spaces_[static_cast<size_t>(n)].gram();
  }
  sum_space_.emplace(total, std::move(big_gram));

  // W_n = range of I_n; the Gram of the direct sum orthonormalizes it.
  for (int n = 0; n <= depth; ++n)
    w_.push_back(Subspace::orthonormalize(*sum_space_, inject_matrix(n), tol_));

  // hat b_k (u, v) = b~_{kk}(pi_k u, pi_k v) on V.
  hat_b_.resize(static_cast<size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k) {
    const Index off = offsets_[static_cast<size_t>(k)];
    const Index kk = level_spaces_[static_cast<size_t>(k)].dim();
    Matrix hat = Matrix::Zero(total, total);
    hat.block(off, off, kk, kk) = lifted_forms_[static_cast<size_t>(k)][static_cast<size_t>(k)];
    hat_b_[static_cast<size_t>(k)] = std::move(hat);
  }

  // W_inf: compatible tuples, the tail rule deciding which top-level
  // vectors extend with bounded energies.
  const Index k_top = level_spaces_[static_cast<size_t>(depth)].dim();
  Matrix admissible = Matrix::Identity(k_top, k_top);
  if (std::holds_alternative<ConstantTail>(tail_)) {
    admissible = kernel_basis(
        hermitian_of(lifted_forms_[static_cast<size_t>(depth)][static_cast<size_t>(depth)]),
        tol_);
  }
  w_inf_ = Subspace::orthonormalize(*sum_space_, Matrix(inject_matrix(depth) * admissible), tol_);

  // hat a_inf on W_inf: head contributions plus the geometric tail factor.
  hat_a_inf_ = Matrix::Zero(total, total);
  for (int k = 1; k <= depth; ++k) hat_a_inf_ += hat_b_[static_cast<size_t>(k)];
  if (const auto* geo = std::get_if<GeometricTail>(&tail_))
    hat_a_inf_ += (geo->rho / (1.0 - geo->rho)) * hat_b_[static_cast<size_t>(depth)];
}

const Matrix& Tower::lifted_form(int n, int k) const {
  return lifted_forms_.at(static_cast<size_t>(n)).at(static_cast<size_t>(k));
}

const Matrix& Tower::phi(int n, int m) const {
  return phi_.at(static_cast<size_t>(n)).at(static_cast<size_t>(m));
}

Vector Tower::level_coords(int n, const Vector& ambient) const {
  const Subspace& dom = level_domains_.at(static_cast<size_t>(n));
  if (!dom.contains_vector(ambient))
    throw DomainViolation("Tower::level_coords: vector outside the level domain");
  return dom.coords(ambient);
}

Matrix Tower::inject_matrix(int n) const {
  const Index total = offsets_.back();
  const Index kn = level_spaces_.at(static_cast<size_t>(n)).dim();
  Matrix out = Matrix::Zero(total, kn);
  for (int m = 0; m <= n; ++m)
    out.block(offsets_[static_cast<size_t>(m)], 0,
              level_spaces_[static_cast<size_t>(m)].dim(), kn) = phi(n, m);
  return out;
}

Vector Tower::inject(int n, const Vector& u) const { return inject_matrix(n) * u; }

Vector Tower::project(int n, const Vector& tuple) const {
  return tuple.segment(offsets_.at(static_cast<size_t>(n)),
                       level_spaces_.at(static_cast<size_t>(n)).dim());
}

Vector Tower::truncate(int m, const Vector& tuple) const {
  Vector out = Vector::Zero(tuple.size());
  const Index keep = offsets_.at(static_cast<size_t>(m) + 1);
  out.head(keep) = tuple.head(keep);
  return out;
}

Matrix Tower::hat_a(int n) const {
  const Index total = offsets_.back();
  Matrix sum = Matrix::Zero(total, total);
  for (int k = 1; k <= n; ++k) sum += hat_b_.at(static_cast<size_t>(k));
  return sum;
}

Tower build_tower(const FormSequence& seq, int depth) { return Tower(seq, depth); }

TowerElementCheck check_tower_element(const Tower& tower, const std::vector<Vector>& element) {
  const int depth = tower.depth();
  if (static_cast<int>(element.size()) != depth + 1)
    throw DimensionMismatch("check_tower_element: element must have depth + 1 levels");
  for (int n = 0; n <= depth; ++n)
    if (element[static_cast<size_t>(n)].size() != tower.level_space(n).dim())
      throw DimensionMismatch("check_tower_element: level coordinate size mismatch");

  TowerElementCheck out;

  // Compatibility of all transfers, measured in the target level norms.
  bool compatible = true;
  for (int n = 1; n <= depth && compatible; ++n) {
    for (int m = 0; m < n; ++m) {
      const Vector mapped = tower.phi(n, m) * element[static_cast<size_t>(n)];
      const Vector diff = mapped - element[static_cast<size_t>(m)];
      const double scale =
          1.0 + tower.level_space(n).norm(element[static_cast<size_t>(n)]);
      if (tower.level_space(m).norm(diff) > 1e-8 * scale) {
        compatible = false;
        break;
      }
    }
  }

  // Tail-rule boundedness of { Re a~_n(u_n) }.
  const Vector& top = element[static_cast<size_t>(depth)];
  const Matrix& b_top = tower.lifted_form(depth, depth);
  const double re_b_top = ((top.adjoint() * (0.5 * (b_top + b_top.adjoint().eval())) * top)(0, 0)).real();
  double sup_energy = 0.0;
  for (int n = 1; n <= depth; ++n) {
    const Vector& u = element[static_cast<size_t>(n)];
    const Matrix& an = tower.lifted_sum(n);
    sup_energy = std::max(sup_energy, ((u.adjoint() * an * u)(0, 0)).real());
  }
  if (std::holds_alternative<ConstantTail>(tower.tail())) {
    const double scale = 1.0 + std::pow(tower.level_space(depth).norm(top), 2);
    if (re_b_top > 1e-8 * scale) {
      compatible = false;
      sup_energy = std::numeric_limits<double>::infinity();
    }
  } else if (const auto* geo = std::get_if<GeometricTail>(&tower.tail())) {
    // Energies increase towards the limit value along the tail.
    const Vector& u = element[static_cast<size_t>(depth)];
    const Matrix& an = tower.lifted_sum(depth);
    const double top_energy = ((u.adjoint() * an * u)(0, 0)).real() +
                              (geo->rho / (1.0 - geo->rho)) * re_b_top;
    sup_energy = std::max(sup_energy, top_energy);
  }
  out.compatible = compatible;

  // The tower-norm bound, with the finite-truncation norm on the left.
  double lhs = 0.0;
  for (int n = 0; n <= depth; ++n)
    lhs += std::pow(tower.level_space(n).norm(element[static_cast<size_t>(n)]), 2);
  const double u0n = tower.level_space(0).norm(element[0]);
  const double rhs = 2.0 * (sup_energy + u0n * u0n);
  out.slack = rhs - lhs;
  out.bound_holds = out.slack >= -1e-10 * (1.0 + std::abs(rhs));
  return out;
}

bool limit_domain_inclusion(const FormSequence& seq) {
  const SesqForm a_inf = limit_form(seq);
  const LinearRelation graph = graph_of_closed_form(a_inf);
  const Subspace dom_graph = domain(graph);
  if (!dom_graph.contains(a_inf.domain())) return false;
  const bool dense = a_inf.domain().dim() == seq.space().dim();
  if (dense && !is_single_valued(graph).single_valued) return false;
  return true;
}

}  // namespace sectoria
