#pragma once

#include <span>
#include <variant>
#include <vector>

#include "sectoria/association.hpp"
#include "sectoria/forms.hpp"
#include "sectoria/relations.hpp"
#include "sectoria/report.hpp"

namespace sectoria {

// Tail rules give exact desk-scale semantics to infinite series of forms:
// after the explicit head b_1..b_N, the terms continue as zero forms, as
// the constant repetition of b_N (the absorption regime), or as geometric
// multiples rho^{k-N} b_N.
struct ZeroTail {};
struct ConstantTail {};
struct GeometricTail {
  double rho;  // in (0, 1)
};
using TailRule = std::variant<ZeroTail, ConstantTail, GeometricTail>;

// A sequence of sectorial forms with vertex 0 and a common semi-angle
// bound, all in the same ambient space.  Construction certifies vertex 0
// for every head form.
class FormSequence {
 public:
  FormSequence(std::vector<SesqForm> head, TailRule tail);

  const HSpace& space() const { return head_.front().space(); }
  int head_count() const { return static_cast<int>(head_.size()); }
  const TailRule& tail() const { return tail_; }
  double common_tan_theta() const { return common_tan_theta_; }
  const SesqForm& head(int k) const { return head_.at(static_cast<size_t>(k - 1)); }

  // b_k for any k >= 1, expanding the tail rule.
  SesqForm term(long k) const;
  // a_n = sum_{k=1}^n b_k with the tail summed in closed form.
  SesqForm partial_sum(long n) const;

 private:
  std::vector<SesqForm> head_;
  TailRule tail_;
  double common_tan_theta_;
};

std::vector<LinearRelation> partial_sum_graphs(const FormSequence& seq, long n);

// The limit form a_inf: domain and values determined exactly by the tail
// rule (for the constant tail, D(a_inf) is the vanishing set of b_N, using
// the vertex-0 equivalence Re b(u) = 0 <=> b(u) = 0).
SesqForm limit_form(const FormSequence& seq);

struct SeriesLimit {
  LinearRelation graph;       // graph of the limit form
  ConvergenceReport report;   // strong-resolvent errors over the schedule
  double norm_bound_slack;    // min over probes/n of ||f|| - ||u_n||
  double energy_bound_slack;  // min over probes/n of ||f||^2 - Re a_n(u_n)
};

// Computes the limit graph and verifies strong resolvent convergence of the
// partial-sum graphs along the schedule, together with the a-priori bounds
// ||u_n|| <= ||f|| and Re a_n(u_n) <= ||f||^2 for u_n = (A_n + I)^{-1} f.
SeriesLimit limit_graph_and_convergence(const FormSequence& seq, std::span<const long> schedule);

// The weighted tower over a form sequence, truncated at a finite depth:
// level spaces V_n = (D(a_n), ||.||_n) with
//   ||u||_n^2 = sum_{k=0}^n 2^{-(n-k)} Re b_k(u),   b_0 = (.,.)_H,
// transfer maps Phi_{nm} : V_n -> V_m, lifted forms, the direct sum V with
// its block inner product, the compatible-tuple spaces W_n and W_inf, and
// truncations T_m.
class Tower {
 public:
  Tower(const FormSequence& seq, int depth);

  int depth() const { return depth_; }
  const HSpace& level_space(int n) const { return level_spaces_.at(n); }
  const Subspace& level_domain(int n) const { return level_domains_.at(n); }
  // Lifted form of b_k on V_n (k <= n).
  const Matrix& lifted_form(int n, int k) const;
  // a~_n = sum_{k=1}^n b~_{nk} on V_n.
  const Matrix& lifted_sum(int n) const { return lifted_sums_.at(n); }
  const Matrix& phi(int n, int m) const;  // V_n -> V_m, m <= n
  const HSpace& sum_space() const { return *sum_space_; }
  Index offset(int n) const { return offsets_.at(n); }

  // q_n: coordinates of an ambient vector in V_n (must lie in D(a_n)).
  Vector level_coords(int n, const Vector& ambient) const;
  // I_n : V_n -> V, the compatible tuple through level n.
  Vector inject(int n, const Vector& u) const;
  Matrix inject_matrix(int n) const;
  Vector project(int n, const Vector& tuple) const;   // pi_n
  Vector truncate(int m, const Vector& tuple) const;  // T_m
  const Subspace& w(int n) const { return w_.at(n); }
  const Subspace& w_inf() const { return w_inf_; }

  const Matrix& hat_b(int k) const { return hat_b_.at(k); }  // on V
  Matrix hat_a(int n) const;                                 // sum_{k=1}^n hat_b_k
  const Matrix& hat_a_inf() const { return hat_a_inf_; }     // on W_inf

  const TailRule& tail() const { return tail_; }
  double tol() const { return tol_; }

 private:
  int depth_;
  TailRule tail_;
  double tol_;
  std::vector<HSpace> level_spaces_;
  std::vector<Subspace> level_domains_;
  std::vector<std::vector<Matrix>> lifted_forms_;  // [n][k]
  std::vector<Matrix> lifted_sums_;
  std::vector<std::vector<Matrix>> phi_;  // [n][m], m <= n
  std::optional<HSpace> sum_space_;
  std::vector<Index> offsets_;
  std::vector<Subspace> w_;
  Subspace w_inf_{Subspace::zero(HSpace(0))};
  std::vector<Matrix> hat_b_;
  Matrix hat_a_inf_;
};

Tower build_tower(const FormSequence& seq, int depth);

struct TowerElementCheck {
  bool compatible = false;   // Phi_{nm} u_n = u_m for all m <= n, tail bounded
  bool bound_holds = false;  // ||tuple||_V^2 <= 2 (sup_n Re a~_n(u_n) + ||u_0||_H^2)
  double slack = 0.0;        // rhs - lhs
};

// Element given as per-level coordinate vectors (u_0, ..., u_N).
TowerElementCheck check_tower_element(const Tower& tower, const std::vector<Vector>& element);

// Verifies closure(D(a_inf)) inside closure(D(A_inf)) and, when D(a_inf) is
// dense, that the limit graph is single-valued.
bool limit_domain_inclusion(const FormSequence& seq);

}  // namespace sectoria
