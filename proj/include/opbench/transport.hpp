#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opbench/check.hpp"
#include "opbench/operator.hpp"

namespace opbench {

/// Back-and-forth state after `stage` completed stages: T_k = sum_j f_j (x) v_j
/// with (I + T_k) a(n_j) = b(m_j) for j <= 2k. Indices are 1-based.
struct TransportState {
  std::size_t stage = 0;
  std::vector<std::size_t> n_idx, m_idx;
  FiniteRankOperator t = FiniteRankOperator::zero();
  std::vector<Scalar> eps;
  std::vector<SparseVector> a, b;
  SeminormSpec p;
  DiskSpec disk = DiskSpec::from_weights({});

  FiniteRankOperator j() const { return t.with_base(OperatorBase::Identity); }
};

struct StepResult {
  CoordFunctional f;
  SparseVector v;
  std::size_t index;    // 1-based index of the chosen element of M
  SparseVector element; // r (forward) or a (backward)
  Scalar pd_v;          // p_D(v)
};

/// Raised with code NoApproximant; carries the smallest p_D(v) seen.
class NoApproximantError : public Error {
 public:
  NoApproximantError(const std::string& what, std::optional<Scalar> best)
      : Error(ErrorCode::NoApproximant, what), best_(std::move(best)) {}
  const std::optional<Scalar>& best() const { return best_; }

 private:
  std::optional<Scalar> best_;
};

/// A failed run: the cause's code, the stage being built and the state as it
/// was after the last completed stage.
class TransportAborted : public Error {
 public:
  TransportAborted(const Error& cause, std::size_t stage, TransportState partial)
      : Error(cause.code(), "stage " + std::to_string(stage) + ": " + cause.what()),
        stage_(stage),
        partial_(std::move(partial)) {}
  std::size_t stage() const { return stage_; }
  const TransportState& partial() const { return partial_; }

 private:
  std::size_t stage_;
  TransportState partial_;
};

/// The enumeration an approximant is drawn from: items plus the 1-based
/// indices still allowed, scanned in increasing order.
struct Pool {
  const std::vector<SparseVector>* items = nullptr;
  std::vector<std::size_t> allowed;

  static Pool all(const std::vector<SparseVector>& items);
};

/// Forward step: f separates u from L, r in M is the first element with
/// p_D(r - u - Tu) < eps |f(u)| and a total budget below 1; v = (r - u - Tu)/f(u).
StepResult step_forward(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                        const SparseVector& u, const std::vector<SparseVector>& L, const Pool& m, const Scalar& eps);

/// Backward step: w = (I+T)^-1 u, f separates w from L, a in M the first
/// element with f(a) != 0 and v = (I+T)(w - a)/f(a) within eps.
StepResult step_backward(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                         const SparseVector& u, const std::vector<SparseVector>& L, const Pool& m, const Scalar& eps);

/// eps_j = r^(j+1) for "geometric:r"; explicit lists as "list:e1,e2,...".
std::vector<Scalar> parse_eps_schedule(const std::string& spec, std::size_t count, ScalarKind kind);

struct TransportResult {
  FiniteRankOperator j;
  TransportState state;
};

/// Stages q = 1..k of the back-and-forth. Throws TransportAborted.
TransportResult run_transport(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b,
                              const SeminormSpec& p, const DiskSpec& disk, const std::vector<Scalar>& eps,
                              std::size_t stages);

struct MatchRow {
  std::size_t j, n, m;
  Scalar residual;  // sup-norm of (I+T)a(n_j) - b(m_j)
};

struct TransportReport {
  CheckList checks;
  std::vector<MatchRow> rows;
  Scalar budget;
};

/// Replays every invariant from the raw state.
TransportReport verify_transport(const TransportState& s);

}  // namespace opbench
