#include "opbench/lp.hpp"

#include <optional>
#include <stdexcept>

namespace opbench {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t vars, ScalarKind kind, double tau)
      : kind_(kind), tau_(tau), t_(rows + 1, vars + 1, kind), basis_(rows, 0) {}

  Scalar& at(std::size_t r, std::size_t c) { return t_(r, c); }
  Scalar& cost(std::size_t c) { return t_(rows(), c); }
  Scalar& rhs(std::size_t r) { return t_(r, vars()); }
  std::size_t rows() const { return basis_.size(); }
  std::size_t vars() const { return t_.cols() - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  bool negative(const Scalar& s) const { return kind_ == ScalarKind::Rational ? s.sign() < 0 : s.to_double() < -tau_; }
  bool positive(const Scalar& s) const { return kind_ == ScalarKind::Rational ? s.sign() > 0 : s.to_double() > tau_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const Scalar piv = t_(pr, pc);
    for (std::size_t c = 0; c < t_.cols(); ++c) t_(pr, c) /= piv;
    for (std::size_t r = 0; r < t_.rows(); ++r) {
      if (r == pr || t_(r, pc).sign() == 0) continue;
      const Scalar f = t_(r, pc);
      for (std::size_t c = 0; c < t_.cols(); ++c) t_(r, c) -= f * t_(pr, c);
    }
    basis_[pr] = pc;
  }

  /// Runs Bland-rule pivots over columns < `allowed`. Returns false when unbounded.
  bool optimize(std::size_t allowed) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (negative(cost(c))) {
          enter = c;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Scalar best;
      for (std::size_t r = 0; r < rows(); ++r) {
        if (!positive(t_(r, *enter))) continue;
        Scalar ratio = rhs(r) / t_(r, *enter);
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  void drop_row(std::size_t r) {
    Matrix next(t_.rows() - 1, t_.cols(), kind_);
    for (std::size_t i = 0, k = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      for (std::size_t c = 0; c < t_.cols(); ++c) next(k, c) = t_(i, c);
      ++k;
    }
    t_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  ScalarKind kind_;
  double tau_;
  Matrix t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult minimize_standard_form(const Matrix& a, const std::vector<Scalar>& b, const std::vector<Scalar>& c,
                                double tau) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("LP shape mismatch");
  const ScalarKind kind = a.kind();

  // Phase 1: artificial columns n..n+m-1, minimize their sum.
  Tableau tab(m, n + m, kind, tau);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = b[r].sign() < 0;
    for (std::size_t j = 0; j < n; ++j) tab.at(r, j) = flip ? -a(r, j) : a(r, j);
    tab.at(r, n + r) = Scalar::one(kind);
    tab.rhs(r) = flip ? -b[r] : b[r];
    tab.basis()[r] = n + r;
  }
  for (std::size_t j = 0; j <= n + m; ++j) {
    if (j >= n && j < n + m) continue;
    Scalar s = Scalar::zero(kind);
    for (std::size_t r = 0; r < m; ++r) s -= tab.at(r, j);
    tab.at(m, j) = s;
  }
  tab.optimize(n + m);

  LpResult out;
  if (tab.positive(-tab.at(tab.rows(), n + m))) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  // Drive artificials out of the basis; rows that cannot be pivoted are redundant.
  for (std::size_t r = 0; r < tab.rows();) {
    if (tab.basis()[r] < n) {
      ++r;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n; ++j) {
      if (tab.positive(tab.at(r, j)) || tab.negative(tab.at(r, j))) {
        col = j;
        break;
      }
    }
    if (col) {
      tab.pivot(r, *col);
      ++r;
    } else {
      tab.drop_row(r);
    }
  }

  // Phase 2 objective row in terms of the current basis.
  const std::size_t rows = tab.rows();
  for (std::size_t j = 0; j <= n + m; ++j) {
    Scalar s = (j < n) ? c[j] : Scalar::zero(kind);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t bv = tab.basis()[r];
      if (bv < n) s -= c[bv] * tab.at(r, j);
    }
    tab.at(rows, j) = s;
  }
  if (!tab.optimize(n)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.x.assign(n, Scalar::zero(kind));
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab.basis()[r] < n) out.x[tab.basis()[r]] = tab.rhs(r);
  }
  out.value = Scalar::zero(kind);
  for (std::size_t j = 0; j < n; ++j) out.value += c[j] * out.x[j];
  return out;
}

}  // namespace opbench
