#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opbench/scalar.hpp"
#include "opbench/sparse.hpp"

namespace opbench {

/// Small dense row-major matrix of scalars. Exact elimination in rational
/// mode; partial pivoting with a relative pivot threshold in float mode.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, ScalarKind kind = ScalarKind::Rational);

  static Matrix identity(std::size_t n, ScalarKind kind = ScalarKind::Rational);
  /// Column j holds vectors[j] read on the coordinates of `coords` (in order).
  static Matrix from_columns(const std::vector<SparseVector>& vectors, const std::vector<Index>& coords,
                             ScalarKind kind);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  ScalarKind kind() const { return kind_; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& o) const;
  std::vector<Scalar> operator*(const std::vector<Scalar>& x) const;
  friend bool operator==(const Matrix& a, const Matrix& b);

  /// Leading n x n block.
  Matrix leading(std::size_t n) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ScalarKind kind_ = ScalarKind::Rational;
  std::vector<Scalar> data_;
};

/// Fraction-free (Bareiss) determinant; exact in rational mode.
Scalar determinant(const Matrix& a, double tau = kDefaultTolerance);

struct RowEchelon {
  Matrix reduced;                    // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

RowEchelon row_reduce(const Matrix& a, double tau = kDefaultTolerance);
std::size_t rank(const Matrix& a, double tau = kDefaultTolerance);

/// Basis of {x : a x = 0}; one vector per free column, free entry 1.
std::vector<std::vector<Scalar>> nullspace(const Matrix& a, double tau = kDefaultTolerance);

/// Unique solution of the square system a x = b, or nullopt when singular.
std::optional<std::vector<Scalar>> solve(const Matrix& a, const std::vector<Scalar>& b,
                                         double tau = kDefaultTolerance);

std::optional<Matrix> inverse(const Matrix& a, double tau = kDefaultTolerance);

/// Ordered union of the supports of `vectors`.
std::vector<Index> joint_support(const std::vector<SparseVector>& vectors);

/// Rank of the vectors' projections onto `coords` (all coordinates when empty).
std::size_t rank_of(const std::vector<SparseVector>& vectors, const IndexSet& coords = {},
                    double tau = kDefaultTolerance);

/// Whether v lies in span(vectors).
bool in_span(const std::vector<SparseVector>& vectors, const SparseVector& v, double tau = kDefaultTolerance);

}  // namespace opbench
