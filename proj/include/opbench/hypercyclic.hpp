#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opbench/check.hpp"
#include "opbench/operator.hpp"

namespace opbench {

/// S = sum_n w_n f_{n+1} (x) u_n with w_n = 2^-n / (p_D(u_n) p*(f_{n+1})),
/// so S u_1 = 0 and S u_k = w_{k-1} u_{k-1}. T = I + S.
struct ShiftOperatorSpec {
  std::vector<SparseVector> us;
  std::vector<CoordFunctional> fs;   // biorthogonal to us
  std::vector<Scalar> weights;       // w_1..w_{N-1}
  FiniteRankOperator s = FiniteRankOperator::zero();

  FiniteRankOperator t() const { return s.with_base(OperatorBase::Identity); }
};

/// Throws KernelCollision when span(us) meets ker p.
ShiftOperatorSpec build_shift_operator(const std::vector<SparseVector>& us, const SeminormSpec& p,
                                       const DiskSpec& disk);

/// Chain identities, S^n u_n = 0, prefix rank, ker p fixed by T, and
/// p_D(S x) <= p(x) on the given samples plus the dual-norm maximizers of the f_n.
CheckList verify_shift(const ShiftOperatorSpec& spec, const SeminormSpec& p, const DiskSpec& disk,
                       const std::vector<SparseVector>& samples = {});

struct BmlLevel {
  std::size_t n;
  std::size_t range_dim, kernel_dim, meet_dim;   // S^n(X), ker S^n, their intersection
};

struct BmlReport {
  Index window = 0;
  std::size_t depth = 0;
  std::vector<BmlLevel> levels;
  std::size_t span_dim = 0;   // dim span of the union of the intersections
  bool full() const { return span_dim == static_cast<std::size_t>(window); }
};

/// S = T - I for base Identity; an operator with base Zero is taken as S
/// itself. Kernels are read on 1..N, ranges on the domain 1..N+d.
BmlReport bml_premise_check(const FiniteRankOperator& t, Index window, std::size_t depth);

/// Best candidate at step n: the solved correction, or z = x when the
/// system is singular.
struct WitnessRow {
  std::size_t n;
  Scalar residual_x, residual_y;
  bool solved = false;
};

struct Witness {
  std::size_t n;
  SparseVector z;
  Scalar residual_x, residual_y;
  std::vector<WitnessRow> trail;
};

class WitnessNotFound : public Error {
 public:
  WitnessNotFound(std::size_t best_n, Scalar best, std::vector<WitnessRow> trail)
      : Error(ErrorCode::NotFound, "no witness up to the horizon (best n = " + std::to_string(best_n) +
                                       ", residual " + best.str() + ")"),
        best_n_(best_n),
        best_(std::move(best)),
        trail_(std::move(trail)) {}
  std::size_t best_n() const { return best_n_; }
  const Scalar& best_residual() const { return best_; }
  const std::vector<WitnessRow>& trail() const { return trail_; }

 private:
  std::size_t best_n_;
  Scalar best_;
  std::vector<WitnessRow> trail_;
};

/// Search n = 0..max_n for z = x + c, c supported on the top |active(p)|
/// coordinates of 1..window, with p(z - x) < eps and p(T^n z - y) < eps.
/// c solves (T^n)_{O,H} c = (y - T^n x)_O on O = active(p). Throws WitnessNotFound.
Witness transitivity_witness(const FiniteRankOperator& t, const SeminormSpec& p, const SparseVector& x,
                             const SparseVector& y, const Scalar& eps, std::size_t max_n, Index window);

/// (S x)_n = x_{n+1} on 1..window, as a finite-rank operator.
FiniteRankOperator omega_shift_operator(Index window);

/// x0, S x0, ..., horizon entries; coordinates beyond the window read as 0.
std::vector<SparseVector> omega_shift_demo(Index window, const SparseVector& x0, std::size_t horizon);

struct NonOrbitSet {
  std::vector<SeminormSpec> family;
  std::vector<SparseVector> b, c;
  std::vector<SparseVector> a;   // b followed by c
};

/// x_n = e_i for the least i in active(p_{n+1}) \ active(p_n). Throws
/// NotNested unless the active sets increase strictly, InvalidArgument
/// unless B is p_1-independent and A linearly independent.
NonOrbitSet build_nonorbit_set(const std::vector<SeminormSpec>& family, const std::vector<SparseVector>& b);

struct SeriesCertificate {
  std::size_t k;        // 1-based index into the family
  Scalar sum;           // sum over M of p_k(T^n x) / p_1(T^{n+1} x)
  std::size_t nonzero;  // terms with p_k(T^n x) != 0
};

struct RefuteReport {
  std::vector<SparseVector> orbit;
  std::vector<std::string> membership;   // "B<i>", "C<i>" (1-based) or "-"
  bool inside_a = true;
  std::optional<std::size_t> exit_step;
  std::vector<std::size_t> m;            // n with T^n x in C and T^{n+1} x in B
  Scalar p1_series;                      // sum over M of p_1(T^{n+1}x)/p_1(T^{n+1}x) = |M|
  std::vector<SeriesCertificate> certificates;
  bool covers_a = false;
  std::size_t orbit_p1_rank = 0;
  std::vector<std::string> flags;
};

RefuteReport refute_orbit(const FiniteRankOperator& t, const SparseVector& x, const NonOrbitSet& set,
                          std::size_t horizon);

}  // namespace opbench
