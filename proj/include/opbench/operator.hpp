#pragma once

#include <vector>

#include "opbench/linalg.hpp"
#include "opbench/spaces.hpp"

namespace opbench {

enum class OperatorBase { Identity, Zero };

/// x -> f(x) v
struct RankOneTerm {
  CoordFunctional f;
  SparseVector v;
};

/// base(x) + sum_j f_j(x) v_j. Terms keep their construction order.
class FiniteRankOperator {
 public:
  FiniteRankOperator() = default;
  FiniteRankOperator(OperatorBase base, std::vector<RankOneTerm> terms) : base_(base), terms_(std::move(terms)) {}

  static FiniteRankOperator identity() { return {OperatorBase::Identity, {}}; }
  static FiniteRankOperator zero() { return {OperatorBase::Zero, {}}; }

  OperatorBase base() const { return base_; }
  const std::vector<RankOneTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add_term(CoordFunctional f, SparseVector v) { terms_.push_back({std::move(f), std::move(v)}); }
  FiniteRankOperator with_term(CoordFunctional f, SparseVector v) const;

  /// The perturbation alone (same terms, base Zero).
  FiniteRankOperator perturbation() const { return {OperatorBase::Zero, terms_}; }
  FiniteRankOperator with_base(OperatorBase base) const { return {base, terms_}; }

  SparseVector operator()(const SparseVector& x) const;

  /// Largest coordinate touched by any term.
  Index extent() const;

  /// Columns T e_j for j = 1..n, read on coordinates 1..n.
  Matrix matrix_on(Index n, ScalarKind kind = ScalarKind::Rational) const;

 private:
  OperatorBase base_ = OperatorBase::Identity;
  std::vector<RankOneTerm> terms_;
};

SparseVector apply(const FiniteRankOperator& t, const SparseVector& x);

/// a o b as a finite-rank operator (exact).
FiniteRankOperator compose(const FiniteRankOperator& a, const FiniteRankOperator& b);

/// Extensional equality: same action on e_1..e_n.
bool equal_on_window(const FiniteRankOperator& a, const FiniteRankOperator& b, Index n);

/// Invertibility certificate c = sum_j p*(f_j) p_D(v_j) for an operator with
/// base Zero. When c < 1 and p <= p_D, I + T is invertible.
struct NeumannBudget {
  SeminormSpec p;
  DiskSpec disk;
  Scalar c;
  std::vector<Scalar> contributions;  // p*(f_j) p_D(v_j) per term
  std::vector<Scalar> epsilons;       // optional schedule the terms were built against
  bool p_bounded_on_disk = false;

  bool certifies_invertibility() const { return p_bounded_on_disk && c < Scalar::one(c.kind()); }
};

/// Throws BudgetExceeded when c >= 1, NotPBounded / NotInSpan when a term is
/// not admissible. Spot-checks p_D(Tx) <= c p(x) on the dual-norm maximizers
/// of the f_j.
NeumannBudget neumann_certificate(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                                  std::vector<Scalar> epsilons = {});

/// Running sum of the budget contributions without the c < 1 gate.
Scalar budget_sum(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk);

/// Whether p(x) <= p_D(x) on the disk (checked on its extreme points).
bool p_bounded_by_disk(const SeminormSpec& p, const DiskSpec& disk);

/// Exact inverse of I + sum f_i (x) v_i:
///   I - sum_i f_i (x) (sum_j H_ji v_j),   H = (I_k + G)^-1,  G_ij = f_i(v_j).
/// Throws Singular when I_k + G is singular (then J has a kernel).
FiniteRankOperator invert(const FiniteRankOperator& j, double tau = kDefaultTolerance);

/// x, Tx, ..., T^{horizon-1} x.
std::vector<SparseVector> orbit(const FiniteRankOperator& t, const SparseVector& x, std::size_t horizon);

/// Orbit of J T0 J^-1 starting at J x0 (the conjugate operator is assembled
/// explicitly, not by mapping J over the T0 orbit).
std::vector<SparseVector> conjugate_orbit(const FiniteRankOperator& t0, const SparseVector& x0,
                                          const FiniteRankOperator& j, std::size_t horizon);

}  // namespace opbench
