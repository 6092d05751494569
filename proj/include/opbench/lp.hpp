#pragma once

#include <vector>

#include "opbench/linalg.hpp"

namespace opbench {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Scalar value;
  std::vector<Scalar> x;
};

/// minimize c.x subject to A x = b, x >= 0.
///
/// Two-phase tableau simplex with Bland's smallest-index rule, so it
/// terminates without cycling. Rational inputs are pivoted exactly.
LpResult minimize_standard_form(const Matrix& a, const std::vector<Scalar>& b, const std::vector<Scalar>& c,
                                double tau = kDefaultTolerance);

}  // namespace opbench
