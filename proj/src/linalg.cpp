#include "opbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opbench {

Matrix::Matrix(std::size_t rows, std::size_t cols, ScalarKind kind)
    : rows_(rows), cols_(cols), kind_(kind), data_(rows * cols, Scalar::zero(kind)) {}

Matrix Matrix::identity(std::size_t n, ScalarKind kind) {
  Matrix m(n, n, kind);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar::one(kind);
  return m;
}

Matrix Matrix::from_columns(const std::vector<SparseVector>& vectors, const std::vector<Index>& coords,
                            ScalarKind kind) {
  Matrix m(coords.size(), vectors.size(), kind);
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    for (std::size_t r = 0; r < coords.size(); ++r) {
      auto it = vectors[j].entries().find(coords[r]);
      if (it != vectors[j].entries().end()) m(r, j) = it->second;
    }
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_, kind_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
  Matrix out(rows_, o.cols_, kind_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Scalar& a = (*this)(r, k);
      if (a.sign() == 0) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  }
  return out;
}

std::vector<Scalar> Matrix::operator*(const std::vector<Scalar>& x) const {
  if (cols_ != x.size()) throw std::invalid_argument("matrix/vector shape mismatch");
  std::vector<Scalar> y(rows_, Scalar::zero(kind_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
  return y;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Matrix Matrix::leading(std::size_t n) const {
  Matrix m(n, n, kind_);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = (*this)(r, c);
  return m;
}

namespace {

double max_abs(const Matrix& a) {
  double m = 0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m = std::max(m, std::fabs(a(r, c).to_double()));
  return m;
}

// Zero test for elimination: exact for rationals, relative to the matrix scale for floats.
struct ZeroTest {
  bool exact;
  double threshold;
  explicit ZeroTest(const Matrix& a, double tau)
      : exact(a.kind() == ScalarKind::Rational), threshold(tau * std::max(1.0, max_abs(a))) {}
  bool operator()(const Scalar& s) const { return exact ? s.sign() == 0 : std::fabs(s.to_double()) <= threshold; }
};

// Row index of the pivot for column c among rows [from, rows).
std::optional<std::size_t> pick_pivot(const Matrix& m, std::size_t from, std::size_t c, const ZeroTest& zero) {
  std::optional<std::size_t> best;
  double best_mag = 0;
  for (std::size_t r = from; r < m.rows(); ++r) {
    if (zero(m(r, c))) continue;
    if (zero.exact) return r;
    const double mag = std::fabs(m(r, c).to_double());
    if (!best || mag > best_mag) {
      best = r;
      best_mag = mag;
    }
  }
  return best;
}

void swap_rows(Matrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
}

}  // namespace

Scalar determinant(const Matrix& a, double tau) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return Scalar::one(a.kind());
  const ZeroTest zero(a, tau);
  Matrix m = a;
  Scalar prev = Scalar::one(a.kind());
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto p = pick_pivot(m, k, k, zero);
    if (!p) return Scalar::zero(a.kind());
    if (*p != k) {
      swap_rows(m, *p, k);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = Scalar::zero(a.kind());
    }
    prev = m(k, k);
  }
  Scalar det = m(n - 1, n - 1);
  return negate ? -det : det;
}

RowEchelon row_reduce(const Matrix& a, double tau) {
  const ZeroTest zero(a, tau);
  RowEchelon out{a, {}};
  Matrix& m = out.reduced;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    auto p = pick_pivot(m, row, c, zero);
    if (!p) {
      for (std::size_t r = row; r < m.rows(); ++r) m(r, c) = Scalar::zero(a.kind());
      continue;
    }
    swap_rows(m, *p, row);
    const Scalar piv = m(row, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(row, j) /= piv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, c).sign() == 0) continue;
      const Scalar factor = m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(r, j) -= factor * m(row, j);
      m(r, c) = Scalar::zero(a.kind());
    }
    out.pivots.push_back(c);
    ++row;
  }
  return out;
}

std::size_t rank(const Matrix& a, double tau) { return row_reduce(a, tau).pivots.size(); }

std::vector<std::vector<Scalar>> nullspace(const Matrix& a, double tau) {
  const RowEchelon e = row_reduce(a, tau);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<std::vector<Scalar>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Scalar> v(a.cols(), Scalar::zero(a.kind()));
    v[free] = Scalar::one(a.kind());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<Scalar>> solve(const Matrix& a, const std::vector<Scalar>& b, double tau) {
  if (a.rows() != a.cols() || b.size() != a.rows()) throw std::invalid_argument("solve needs a square system");
  const std::size_t n = a.rows();
  Matrix aug(n, n + 1, a.kind());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = a(r, c);
    aug(r, n) = b[r];
  }
  // Pivot search is restricted to the coefficient block so b never acts as a pivot column.
  const ZeroTest zero(a, tau);
  for (std::size_t c = 0; c < n; ++c) {
    auto p = pick_pivot(aug, c, c, zero);
    if (!p) return std::nullopt;
    swap_rows(aug, *p, c);
    const Scalar piv = aug(c, c);
    for (std::size_t j = c; j <= n; ++j) aug(c, j) /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || aug(r, c).sign() == 0) continue;
      const Scalar factor = aug(r, c);
      for (std::size_t j = c; j <= n; ++j) aug(r, j) -= factor * aug(c, j);
    }
  }
  std::vector<Scalar> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = aug(r, n);
  return x;
}

std::optional<Matrix> inverse(const Matrix& a, double tau) {
  const std::size_t n = a.rows();
  Matrix inv(n, n, a.kind());
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Scalar> e(n, Scalar::zero(a.kind()));
    e[c] = Scalar::one(a.kind());
    auto col = solve(a, e, tau);
    if (!col) return std::nullopt;
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = (*col)[r];
  }
  return inv;
}

std::vector<Index> joint_support(const std::vector<SparseVector>& vectors) {
  IndexSet s;
  for (const auto& v : vectors)
    for (const auto& kv : v.entries()) s.insert(kv.first);
  return {s.begin(), s.end()};
}

std::size_t rank_of(const std::vector<SparseVector>& vectors, const IndexSet& coords, double tau) {
  if (vectors.empty()) return 0;
  std::vector<Index> rows;
  if (coords.empty()) {
    rows = joint_support(vectors);
  } else {
    rows.assign(coords.begin(), coords.end());
  }
  return rank(Matrix::from_columns(vectors, rows, kind_of(vectors)), tau);
}

bool in_span(const std::vector<SparseVector>& vectors, const SparseVector& v, double tau) {
  std::vector<SparseVector> with = vectors;
  with.push_back(v);
  return rank_of(with, {}, tau) == rank_of(vectors, {}, tau);
}

}  // namespace opbench
