#pragma once

#include <map>
#include <optional>
#include <vector>

#include "opbench/error.hpp"
#include "opbench/scalar.hpp"
#include "opbench/sparse.hpp"

namespace opbench {

enum class SeminormKind { Sup, L1 };

/// Weighted coordinate seminorm: max_i w_i|x_i| (Sup) or sum_i w_i|x_i| (L1)
/// over the active coordinates. Its kernel is every vector supported off the
/// active set.
class SeminormSpec {
 public:
  SeminormSpec() = default;
  /// Throws InvalidArgument unless every weight is strictly positive.
  SeminormSpec(SeminormKind kind, std::map<Index, Scalar> weights);

  /// Unit weights on `active`.
  static SeminormSpec uniform(SeminormKind kind, const IndexSet& active, ScalarKind scalars = ScalarKind::Rational);
  /// Unit weights on 1..n.
  static SeminormSpec on_window(SeminormKind kind, Index n, ScalarKind scalars = ScalarKind::Rational);

  SeminormKind kind() const { return kind_; }
  const std::map<Index, Scalar>& weights() const { return weights_; }
  IndexSet active() const;
  bool is_active(Index i) const { return weights_.count(i) != 0; }
  ScalarKind scalar_kind() const;

  bool in_kernel(const SparseVector& x) const;

 private:
  SeminormKind kind_ = SeminormKind::Sup;
  std::map<Index, Scalar> weights_;
};

Scalar eval_seminorm(const SeminormSpec& p, const SparseVector& x);

/// p*(f) = sup{|f(x)| : p(x) <= 1}. Throws NotPBounded when f charges a
/// coordinate outside active(p).
Scalar dual_norm(const SeminormSpec& p, const CoordFunctional& f);

/// A vector x with p(x) <= 1 and f(x) = p*(f), certifying that the dual norm
/// is attained (sign pattern for Sup, a single coordinate for L1).
SparseVector dual_norm_maximizer(const SeminormSpec& p, const CoordFunctional& f);

/// Banach disk given either by l1-type weights d_i (p_D(x) = sum |x_i|/d_i)
/// or by finitely many generators (the absolutely convex hull).
class DiskSpec {
 public:
  static DiskSpec from_weights(std::map<Index, Scalar> weights);
  /// p_D is the l1 norm on 1..n.
  static DiskSpec l1_window(Index n, ScalarKind scalars = ScalarKind::Rational);
  static DiskSpec from_generators(std::vector<SparseVector> generators);

  bool is_weight_form() const { return !generators_; }
  const std::map<Index, Scalar>& weights() const { return weights_; }
  const std::vector<SparseVector>& generators() const;

 private:
  std::map<Index, Scalar> weights_;
  std::optional<std::vector<SparseVector>> generators_;
};

/// Minkowski functional p_D(u). Weight form evaluates directly; generator form
/// solves min ||a||_1 s.t. sum a_n x_n = u exactly. Throws NotInSpan when u
/// lies outside the span of the disk.
Scalar minkowski(const DiskSpec& disk, const SparseVector& u);

/// Same as minkowski but returns nullopt instead of throwing NotInSpan.
std::optional<Scalar> try_minkowski(const DiskSpec& disk, const SparseVector& u);

/// Finite-dimensional replacement of the Hahn-Banach step: a functional with
/// support in active(p), vanishing on L, nonzero at u, and p*(f) = 1; among
/// those the one with the largest |f(u)| (exact LP).
/// Throws NoSeparation when (u + span L) meets ker p.
CoordFunctional separating_functional(const SeminormSpec& p, const std::vector<SparseVector>& L,
                                      const SparseVector& u);

/// Rank of the projections onto active(p); equals the count iff the family is p-independent.
std::size_t p_rank(const SeminormSpec& p, const std::vector<SparseVector>& xs);
bool p_independent(const SeminormSpec& p, const std::vector<SparseVector>& xs);

}  // namespace opbench
