#include "opbench/operator.hpp"

#include <algorithm>

namespace opbench {

FiniteRankOperator FiniteRankOperator::with_term(CoordFunctional f, SparseVector v) const {
  FiniteRankOperator out = *this;
  out.add_term(std::move(f), std::move(v));
  return out;
}

SparseVector FiniteRankOperator::operator()(const SparseVector& x) const {
  SparseVector y = base_ == OperatorBase::Identity ? x : SparseVector{};
  const ScalarKind kind = x.kind_or(ScalarKind::Rational);
  for (const auto& term : terms_) {
    const Scalar fx = pair(term.f, x, kind);
    if (!fx.is_zero()) y.axpy(fx, term.v);
  }
  return y;
}

Index FiniteRankOperator::extent() const {
  Index n = 0;
  for (const auto& t : terms_) n = std::max({n, t.f.max_index(), t.v.max_index()});
  return n;
}

Matrix FiniteRankOperator::matrix_on(Index n, ScalarKind kind) const {
  Matrix m(n, n, kind);
  for (Index j = 1; j <= n; ++j) {
    const SparseVector col = (*this)(SparseVector::unit(j, kind));
    for (const auto& [i, v] : col.entries()) {
      if (i <= n) m(i - 1, j - 1) = v;
    }
  }
  return m;
}

SparseVector apply(const FiniteRankOperator& t, const SparseVector& x) { return t(x); }

FiniteRankOperator compose(const FiniteRankOperator& a, const FiniteRankOperator& b) {
  const bool a_id = a.base() == OperatorBase::Identity;
  const bool b_id = b.base() == OperatorBase::Identity;
  FiniteRankOperator out(a_id && b_id ? OperatorBase::Identity : OperatorBase::Zero, {});
  // a(b x) = [a_base b_base] x + [a_base] sum_j g_j(x) w_j + sum_i f_i(b x) v_i
  if (a_id) {
    for (const auto& t : b.terms()) out.add_term(t.f, t.v);
  }
  for (const auto& ta : a.terms()) {
    CoordFunctional h = b_id ? ta.f : CoordFunctional{};
    for (const auto& tb : b.terms()) {
      const Scalar c = pair(ta.f, tb.v);
      if (!c.is_zero()) h.axpy(c, tb.f);
    }
    out.add_term(std::move(h), ta.v);
  }
  return out;
}

bool equal_on_window(const FiniteRankOperator& a, const FiniteRankOperator& b, Index n) {
  for (Index j = 1; j <= n; ++j) {
    const SparseVector ej = SparseVector::unit(j);
    if (!(a(ej) == b(ej))) return false;
  }
  return true;
}

bool p_bounded_by_disk(const SeminormSpec& p, const DiskSpec& disk) {
  const Scalar one = Scalar::one(p.scalar_kind());
  if (disk.is_weight_form()) {
    // Extreme points of the weighted l1 ball are +-d_i e_i.
    for (const auto& [i, d] : disk.weights()) {
      auto w = p.weights().find(i);
      if (w != p.weights().end() && one < w->second * d) return false;
    }
    return true;
  }
  for (const auto& g : disk.generators()) {
    if (one < eval_seminorm(p, g)) return false;
  }
  return true;
}

Scalar budget_sum(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk) {
  Scalar c = Scalar::zero(p.scalar_kind());
  for (const auto& term : t.terms()) c += dual_norm(p, term.f) * minkowski(disk, term.v);
  return c;
}

NeumannBudget neumann_certificate(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                                  std::vector<Scalar> epsilons) {
  if (t.base() != OperatorBase::Zero) {
    throw Error(ErrorCode::InvalidArgument, "neumann_certificate expects the perturbation T (base Zero)");
  }
  NeumannBudget b{p, disk, Scalar::zero(p.scalar_kind()), {}, std::move(epsilons), p_bounded_by_disk(p, disk)};
  for (const auto& term : t.terms()) {
    Scalar contrib = dual_norm(p, term.f) * minkowski(disk, term.v);
    b.c += contrib;
    b.contributions.push_back(std::move(contrib));
  }
  if (!(b.c < Scalar::one(b.c.kind()))) {
    throw Error(ErrorCode::BudgetExceeded, "budget c = " + b.c.str() + " is not below 1");
  }
  for (const auto& term : t.terms()) {
    const SparseVector x = dual_norm_maximizer(p, term.f);
    auto pd = try_minkowski(disk, t(x));
    if (!pd || b.c * eval_seminorm(p, x) < *pd) {
      throw Error(ErrorCode::InvalidArgument, "continuity bound p_D(Tx) <= c p(x) fails at " + x.str());
    }
  }
  return b;
}

FiniteRankOperator invert(const FiniteRankOperator& j, double tau) {
  if (j.base() != OperatorBase::Identity) throw Error(ErrorCode::InvalidArgument, "invert expects I + T");
  const auto& terms = j.terms();
  const std::size_t k = terms.size();
  if (k == 0) return FiniteRankOperator::identity();

  ScalarKind kind = ScalarKind::Rational;
  for (const auto& t : terms) {
    if (!t.f.empty()) kind = t.f.kind_or(kind);
  }
  Matrix m = Matrix::identity(k, kind);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) m(r, c) += pair(terms[r].f, terms[c].v, kind);
  const auto h = inverse(m, tau);
  if (!h) throw Error(ErrorCode::Singular, "I + G is singular; I + T has a nontrivial kernel");

  FiniteRankOperator out = FiniteRankOperator::identity();
  for (std::size_t i = 0; i < k; ++i) {
    SparseVector w;
    for (std::size_t c = 0; c < k; ++c) w.axpy(-(*h)(c, i), terms[c].v);
    out.add_term(terms[i].f, std::move(w));
  }
  return out;
}

std::vector<SparseVector> orbit(const FiniteRankOperator& t, const SparseVector& x, std::size_t horizon) {
  std::vector<SparseVector> out;
  out.reserve(horizon);
  SparseVector cur = x;
  for (std::size_t n = 0; n < horizon; ++n) {
    out.push_back(cur);
    if (n + 1 < horizon) cur = t(cur);
  }
  return out;
}

std::vector<SparseVector> conjugate_orbit(const FiniteRankOperator& t0, const SparseVector& x0,
                                          const FiniteRankOperator& j, std::size_t horizon) {
  const FiniteRankOperator conj = compose(j, compose(t0, invert(j)));
  return orbit(conj, j(x0), horizon);
}

}  // namespace opbench
