// Shared helpers for the unit and acceptance suites: terse constructors and
// seeded random generators for rational test data.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "opbench/linalg.hpp"
#include "opbench/scalar.hpp"
#include "opbench/sparse.hpp"

namespace opbench::testing {

inline Scalar q(long long num, long long den = 1) { return Scalar::ratio(num, den); }

/// Dense rational vector from "p/q" or integer strings.
inline SparseVector vec(std::initializer_list<const char*> values) {
  std::vector<Scalar> xs;
  for (const char* v : values) xs.push_back(Scalar::parse(v, ScalarKind::Rational));
  return SparseVector::dense(xs);
}

inline CoordFunctional fun(std::initializer_list<const char*> values) { return as_functional(vec(values)); }

inline SparseVector e(Index i) { return SparseVector::unit(i); }
inline CoordFunctional delta(Index i) { return CoordFunctional::unit(i); }

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  long long integer(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }

  /// Rational p/q with |p/q| <= bound and 1 <= q <= max_den.
  Scalar rational(long long bound, long long max_den) {
    const long long den = integer(1, max_den);
    return q(integer(-bound * den, bound * den), den);
  }

  /// Random vector on coordinates 1..n with the given density of nonzeros.
  SparseVector vector(Index n, long long bound = 3, long long max_den = 4, double density = 0.7) {
    SparseVector x;
    for (Index i = 1; i <= n; ++i) {
      if (coin(density)) x.set(i, rational(bound, max_den));
    }
    return x;
  }

  CoordFunctional functional(Index n, long long bound = 3, long long max_den = 4, double density = 0.7) {
    return as_functional(vector(n, bound, max_den, density));
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Enumerations A, B for back-and-forth runs on 1..window: A random, B a copy
/// of A with adjacent pairs swapped (b_1 ~ a_2, b_2 ~ a_1, ...) and tiny
/// noise; both project independently onto 1..active.
struct TransportInstance {
  std::vector<SparseVector> a, b;
};

inline SparseVector tiny_noise(Rng& rng, Index window) {
  return rng.vector(window, 1000, 1, 0.5) * Scalar::pow2(-50, ScalarKind::Rational);
}

inline SparseVector fresh_item(Rng& rng, Index window, Index active, std::size_t slot) {
  SparseVector x = rng.vector(window, 2, 4, 0.6);
  x.set(static_cast<Index>(1 + slot % active), rng.coin() ? q(1) : q(-1));
  return x;
}

inline TransportInstance swapped_nets(Rng& rng, Index window, Index active, std::size_t count) {
  IndexSet act;
  for (Index i = 1; i <= active; ++i) act.insert(i);
  for (;;) {
    TransportInstance t;
    for (std::size_t i = 0; i < count; ++i) t.a.push_back(fresh_item(rng, window, active, i));
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t partner = (i % 2 == 0) ? std::min(i + 1, count - 1) : i - 1;
      t.b.push_back(t.a[partner] + tiny_noise(rng, window));
    }
    if (rank_of(t.a, act) == count && rank_of(t.b, act) == count) return t;
  }
}

}  // namespace opbench::testing
