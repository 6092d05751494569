#pragma once

#include <vector>

#include "opbench/check.hpp"
#include "opbench/linalg.hpp"
#include "opbench/operator.hpp"

namespace opbench {

template <class T>
struct GreedyPick {
  std::size_t position;  // index into the candidate list
  T item;
  Scalar det;            // determinant of the enlarged (n+1) x (n+1) matrix
};

/// Given f_1..f_{n+1} and x_1..x_n with det{f_j(x_k)} != 0, returns the first
/// candidate x with det{f_j(x_k)}_{n+1} != 0. Uses g = f_{n+1} - sum c_j f_j,
/// g(x_k) = 0 for k <= n, so the new determinant is g(x) det B.
/// Throws Exhausted when every candidate lies in ker g.
GreedyPick<SparseVector> greedy_extend_vector(const std::vector<CoordFunctional>& funcs,
                                              const std::vector<SparseVector>& chosen,
                                              const std::vector<SparseVector>& candidates);

/// Dual step: x_1..x_{n+1}, f_1..f_n; h = x_{n+1} - sum c_k x_k with
/// f_j(h) = 0, new determinant f(h) det B.
GreedyPick<CoordFunctional> greedy_extend_functional(const std::vector<SparseVector>& vectors,
                                                     const std::vector<CoordFunctional>& chosen,
                                                     const std::vector<CoordFunctional>& candidates);

struct TriangularizeState {
  std::vector<SparseVector> basis;
  std::vector<CoordFunctional> funcs;
  std::vector<Index> alpha;                  // 1-based indices into funcs
  std::vector<Index> beta;                   // 1-based indices into basis
  std::vector<std::vector<Scalar>> coeffs;   // coeffs[m-1][j-1] = c_{j,m}, j <= m
  std::vector<SparseVector> v;               // v_m = sum_j c_{j,m} u_{beta(j)}
  std::vector<Scalar> minors;                // det A_n, n = 1..2k, from the greedy chain
  std::size_t stages = 0;

  std::size_t size() const { return alpha.size(); }
  /// A_n = {f_alpha(j)(u_beta(k))}_{j,k <= n}.
  Matrix leading_matrix(std::size_t n) const;
};

/// Alternating construction: alpha_{2m+1} = min unused, beta_{2m+1} greedy;
/// beta_{2m+2} = min unused, alpha_{2m+2} greedy. Coefficients from
/// A_m c = (0,..,0,1). Needs at least 2k basis vectors and functionals.
TriangularizeState interleave_triangularize(const std::vector<SparseVector>& basis,
                                            const std::vector<CoordFunctional>& funcs, std::size_t stages);

/// Recomputes every invariant from the raw lists: injectivity, coverage of
/// {1..n} for n <= k, leading minors, c_{m,m} != 0, biorthogonal
/// triangularity, span property.
CheckList verify_triangularize(const TriangularizeState& s);

/// T x = sum_n x_{alpha(n)} v_n (base Zero).
FiniteRankOperator build_omega_operator(const std::vector<Index>& alpha, const std::vector<SparseVector>& v);
FiniteRankOperator build_omega_operator(const TriangularizeState& s);

/// Matrix of T on the shuffled basis e_alpha(1), .., e_alpha(n).
Matrix shuffled_matrix(const FiniteRankOperator& t, const std::vector<Index>& alpha);

bool is_unit_lower_triangular(const Matrix& m);

/// x supported on {alpha(n)} with T x = y, by forward substitution on the
/// shuffled coordinates. Only meaningful for y in span{v_1..v_n}.
SparseVector omega_preimage(const std::vector<Index>& alpha, const std::vector<SparseVector>& v,
                            const SparseVector& y);

}  // namespace opbench
