#include "opbench/triangular.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace opbench {

namespace {

// B_{jk} = f_j(x_k), j,k < n
Matrix pairing_matrix(const std::vector<CoordFunctional>& fs, const std::vector<SparseVector>& xs, std::size_t n,
                      ScalarKind kind) {
  Matrix b(n, n, kind);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) b(j, k) = pair(fs[j], xs[k], kind);
  return b;
}

Index min_unused(const std::vector<Index>& used) {
  const std::set<Index> s(used.begin(), used.end());
  Index i = 1;
  while (s.count(i)) ++i;
  return i;
}

std::string join(const std::vector<Index>& xs) {
  std::string out;
  for (Index i : xs) out += (out.empty() ? "" : ",") + std::to_string(i);
  return "(" + out + ")";
}

}  // namespace

GreedyPick<SparseVector> greedy_extend_vector(const std::vector<CoordFunctional>& funcs,
                                              const std::vector<SparseVector>& chosen,
                                              const std::vector<SparseVector>& candidates) {
  const std::size_t n = chosen.size();
  if (funcs.size() != n + 1) throw Error(ErrorCode::InvalidArgument, "greedy_extend_vector needs n+1 functionals");
  const ScalarKind kind = kind_of(funcs);
  const Matrix b = pairing_matrix(funcs, chosen, n, kind);
  const Scalar det_b = n == 0 ? Scalar::one(kind) : determinant(b);
  if (det_b.is_zero()) throw Error(ErrorCode::InvalidArgument, "{f_j(x_k)} is singular");

  // B^T c = (f_{n+1}(x_k))_k
  std::vector<Scalar> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = pair(funcs[n], chosen[k], kind);
  const auto c = n == 0 ? std::optional<std::vector<Scalar>>(std::vector<Scalar>{}) : solve(b.transposed(), r);
  if (!c) throw Error(ErrorCode::InvalidArgument, "{f_j(x_k)} is singular");
  CoordFunctional g = funcs[n];
  for (std::size_t j = 0; j < n; ++j) g.axpy(-(*c)[j], funcs[j]);

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Scalar gx = pair(g, candidates[i], kind);
    if (!gx.is_zero()) return {i, candidates[i], gx * det_b};
  }
  throw Error(ErrorCode::Exhausted, "every candidate vector lies in ker g");
}

GreedyPick<CoordFunctional> greedy_extend_functional(const std::vector<SparseVector>& vectors,
                                                     const std::vector<CoordFunctional>& chosen,
                                                     const std::vector<CoordFunctional>& candidates) {
  const std::size_t n = chosen.size();
  if (vectors.size() != n + 1) throw Error(ErrorCode::InvalidArgument, "greedy_extend_functional needs n+1 vectors");
  const ScalarKind kind = kind_of(vectors);
  const Matrix b = pairing_matrix(chosen, vectors, n, kind);
  const Scalar det_b = n == 0 ? Scalar::one(kind) : determinant(b);
  if (det_b.is_zero()) throw Error(ErrorCode::InvalidArgument, "{f_j(x_k)} is singular");

  // B c = (f_j(x_{n+1}))_j
  std::vector<Scalar> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = pair(chosen[j], vectors[n], kind);
  const auto c = n == 0 ? std::optional<std::vector<Scalar>>(std::vector<Scalar>{}) : solve(b, s);
  if (!c) throw Error(ErrorCode::InvalidArgument, "{f_j(x_k)} is singular");
  SparseVector h = vectors[n];
  for (std::size_t k = 0; k < n; ++k) h.axpy(-(*c)[k], vectors[k]);

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Scalar fh = pair(candidates[i], h, kind);
    if (!fh.is_zero()) return {i, candidates[i], fh * det_b};
  }
  throw Error(ErrorCode::Exhausted, "every candidate functional vanishes on h");
}

Matrix TriangularizeState::leading_matrix(std::size_t n) const {
  const ScalarKind kind = kind_of(basis);
  Matrix a(n, n, kind);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) a(j, k) = pair(funcs[alpha[j] - 1], basis[beta[k] - 1], kind);
  return a;
}

TriangularizeState interleave_triangularize(const std::vector<SparseVector>& basis,
                                            const std::vector<CoordFunctional>& funcs, std::size_t stages) {
  const std::size_t len = 2 * stages;
  if (basis.size() < len || funcs.size() < len) {
    throw Error(ErrorCode::Exhausted, std::to_string(stages) + " stages need " + std::to_string(len) +
                                          " basis vectors and functionals");
  }
  if (rank_of(basis) != basis.size()) throw Error(ErrorCode::InvalidArgument, "basis is linearly dependent");

  TriangularizeState s;
  s.basis = basis;
  s.funcs = funcs;
  s.stages = stages;

  auto chosen_funcs = [&] {
    std::vector<CoordFunctional> out;
    for (Index a : s.alpha) out.push_back(funcs[a - 1]);
    return out;
  };
  auto chosen_vecs = [&] {
    std::vector<SparseVector> out;
    for (Index b : s.beta) out.push_back(basis[b - 1]);
    return out;
  };
  auto unused = [](const std::vector<Index>& used, std::size_t total) {
    const std::set<Index> u(used.begin(), used.end());
    std::vector<Index> out;
    for (Index i = 1; i <= total; ++i)
      if (!u.count(i)) out.push_back(i);
    return out;
  };

  auto vector_step = [&] {
    const std::vector<Index> free = unused(s.beta, basis.size());
    std::vector<SparseVector> cands;
    for (Index i : free) cands.push_back(basis[i - 1]);
    const auto pick = greedy_extend_vector(chosen_funcs(), chosen_vecs(), cands);
    s.beta.push_back(free[pick.position]);
    s.minors.push_back(pick.det);
  };
  auto functional_step = [&] {
    const std::vector<Index> free = unused(s.alpha, funcs.size());
    std::vector<CoordFunctional> cands;
    for (Index i : free) cands.push_back(funcs[i - 1]);
    const auto pick = greedy_extend_functional(chosen_vecs(), chosen_funcs(), cands);
    s.alpha.push_back(free[pick.position]);
    s.minors.push_back(pick.det);
  };

  for (std::size_t m = 0; m < stages; ++m) {
    s.alpha.push_back(min_unused(s.alpha));
    vector_step();
    const Index b = min_unused(s.beta);
    if (b > basis.size()) throw Error(ErrorCode::Exhausted, "basis prefix used up");
    s.beta.push_back(b);
    functional_step();
  }

  const ScalarKind kind = kind_of(basis);
  for (std::size_t m = 1; m <= len; ++m) {
    std::vector<Scalar> rhs(m, Scalar::zero(kind));
    rhs[m - 1] = Scalar::one(kind);
    const auto c = solve(s.leading_matrix(m), rhs);
    if (!c) throw Error(ErrorCode::Singular, "leading matrix A_" + std::to_string(m) + " is singular");
    SparseVector vm;
    for (std::size_t j = 0; j < m; ++j) vm.axpy((*c)[j], basis[s.beta[j] - 1]);
    s.coeffs.push_back(*c);
    s.v.push_back(std::move(vm));
  }
  return s;
}

CheckList verify_triangularize(const TriangularizeState& s) {
  CheckList out;
  const std::size_t len = s.size();
  const ScalarKind kind = kind_of(s.basis);

  auto injective = [](const std::vector<Index>& xs) { return std::set<Index>(xs.begin(), xs.end()).size() == xs.size(); };
  out.add("alpha injective", injective(s.alpha), join(s.alpha));
  out.add("beta injective", injective(s.beta), join(s.beta));
  out.add("prefix length", s.alpha.size() == 2 * s.stages && s.beta.size() == 2 * s.stages);

  bool cover = true;
  std::string cover_detail;
  for (std::size_t n = 1; n <= s.stages && 2 * n <= len; ++n) {
    const std::set<Index> a(s.alpha.begin(), s.alpha.begin() + 2 * n), b(s.beta.begin(), s.beta.begin() + 2 * n);
    for (Index i = 1; i <= n; ++i) {
      if (!a.count(i) || !b.count(i)) {
        cover = false;
        cover_detail = "n=" + std::to_string(n) + " misses " + std::to_string(i);
      }
    }
  }
  out.add("coverage {1..n}", cover, cover_detail);

  bool minors_ok = true;
  std::string minors_detail;
  for (std::size_t n = 1; n <= len; ++n) {
    const Scalar d = determinant(s.leading_matrix(n));
    if (d.is_zero() || (n <= s.minors.size() && !(d == s.minors[n - 1]))) {
      minors_ok = false;
      minors_detail = "n=" + std::to_string(n) + " det=" + d.str();
    }
  }
  out.add("leading minors nonzero", minors_ok, minors_detail);

  bool diag_ok = s.coeffs.size() == len, tri_ok = s.v.size() == len;
  std::string tri_detail;
  for (std::size_t m = 0; m < len && diag_ok; ++m) diag_ok = s.coeffs[m].size() == m + 1 && !s.coeffs[m][m].is_zero();
  for (std::size_t k = 0; k < len && tri_ok; ++k) {
    SparseVector vk;
    for (std::size_t j = 0; j <= k && j < s.coeffs[k].size(); ++j) vk.axpy(s.coeffs[k][j], s.basis[s.beta[j] - 1]);
    if (!(vk == s.v[k])) {
      tri_ok = false;
      tri_detail = "v_" + std::to_string(k + 1) + " does not match its coefficients";
    }
    for (std::size_t j = 0; j <= k && tri_ok; ++j) {
      const Scalar val = pair(s.funcs[s.alpha[j] - 1], s.v[k], kind);
      const bool ok = j == k ? val == Scalar::one(kind) : val.is_zero();
      if (!ok) {
        tri_ok = false;
        tri_detail = "f_alpha(" + std::to_string(j + 1) + ")(v_" + std::to_string(k + 1) + ") = " + val.str();
      }
    }
  }
  out.add("c_{m,m} nonzero", diag_ok);
  out.add("biorthogonal triangular", tri_ok, tri_detail);

  bool span_ok = true;
  std::string span_detail;
  for (std::size_t n = 1; n <= len && span_ok; ++n) {
    const SparseVector& u = s.basis[s.beta[n - 1] - 1];
    const std::vector<SparseVector> upto(s.v.begin(), s.v.begin() + n), before(s.v.begin(), s.v.begin() + n - 1);
    if (!in_span(upto, u) || in_span(before, u)) {
      span_ok = false;
      span_detail = "n=" + std::to_string(n);
    }
  }
  out.add("span property", span_ok, span_detail);
  return out;
}

FiniteRankOperator build_omega_operator(const std::vector<Index>& alpha, const std::vector<SparseVector>& v) {
  if (alpha.size() != v.size()) throw Error(ErrorCode::InvalidArgument, "alpha and v differ in length");
  FiniteRankOperator t = FiniteRankOperator::zero();
  for (std::size_t n = 0; n < alpha.size(); ++n) {
    t.add_term(CoordFunctional::unit(alpha[n], v[n].kind_or(ScalarKind::Rational)), v[n]);
  }
  return t;
}

FiniteRankOperator build_omega_operator(const TriangularizeState& s) {
  for (const auto& f : s.funcs) {
    if (f.nnz() != 1 || !(f.entries().begin()->second == Scalar::one(f.kind_or(ScalarKind::Rational)))) {
      throw Error(ErrorCode::InvalidArgument, "build_omega_operator needs coordinate functionals");
    }
  }
  std::vector<Index> coords;
  for (Index a : s.alpha) coords.push_back(s.funcs[a - 1].entries().begin()->first);
  return build_omega_operator(coords, s.v);
}

Matrix shuffled_matrix(const FiniteRankOperator& t, const std::vector<Index>& alpha) {
  const std::size_t n = alpha.size();
  ScalarKind kind = ScalarKind::Rational;
  for (const auto& term : t.terms())
    if (!term.v.empty()) kind = term.v.kind_or(kind);
  Matrix m(n, n, kind);
  for (std::size_t c = 0; c < n; ++c) {
    const SparseVector col = t(SparseVector::unit(alpha[c], kind));
    for (std::size_t r = 0; r < n; ++r) m(r, c) = col.get(alpha[r], kind);
  }
  return m;
}

bool is_unit_lower_triangular(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!(m(r, r) == Scalar::one(m.kind()))) return false;
    for (std::size_t c = r + 1; c < m.cols(); ++c)
      if (!m(r, c).is_zero()) return false;
  }
  return true;
}

SparseVector omega_preimage(const std::vector<Index>& alpha, const std::vector<SparseVector>& v,
                            const SparseVector& y) {
  const ScalarKind kind = y.kind_or(ScalarKind::Rational);
  SparseVector x;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    Scalar xj = y.get(alpha[j], kind);
    for (std::size_t n = 0; n < j; ++n) xj -= x.get(alpha[n], kind) * v[n].get(alpha[j], kind);
    x.set(alpha[j], xj);
  }
  return x;
}

}  // namespace opbench
