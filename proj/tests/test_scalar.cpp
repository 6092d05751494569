#include "doctest.h"

#include "opbench/error.hpp"
#include "opbench/linalg.hpp"
#include "support.hpp"

using namespace opbench;
using namespace opbench::testing;

TEST_CASE("rationals are canonical and print as p/q") {
  CHECK(q(6, -4).str() == "-3/2");
  CHECK(q(0, 5).str() == "0/1");
  CHECK(Scalar(7).str() == "7/1");
  CHECK(Scalar::parse("10/4", ScalarKind::Rational) == q(5, 2));
  CHECK(Scalar::parse("-0.125", ScalarKind::Rational) == q(-1, 8));
  CHECK(Scalar::parse("3e-2", ScalarKind::Rational) == q(3, 100));
  CHECK(Scalar::parse("12", ScalarKind::Rational) == q(12));
  CHECK_THROWS_AS(Scalar::parse("1/0", ScalarKind::Rational), Error);
  CHECK_THROWS_AS(Scalar::parse("abc", ScalarKind::Rational), Error);
}

TEST_CASE("floats round-trip through their shortest decimal") {
  const Scalar x(0.1);
  CHECK(x.str() == "0.1");
  CHECK(Scalar::parse(x.str(), ScalarKind::Float) == x);
  CHECK(Scalar::parse("1/4", ScalarKind::Float) == Scalar(0.25));
  CHECK(Scalar(1e-13).is_zero());
  CHECK_FALSE(Scalar(1e-6).is_zero());
}

TEST_CASE("mixing scalar modes throws") {
  CHECK_THROWS_AS(q(1) + Scalar(1.0), Error);
  CHECK_THROWS_AS((void)(q(1) < Scalar(1.0)), Error);
}

TEST_CASE("powers of two are exact") {
  CHECK(Scalar::pow2(-3, ScalarKind::Rational) == q(1, 8));
  CHECK(Scalar::pow2(4, ScalarKind::Rational) == q(16));
  CHECK(Scalar::pow2(-2, ScalarKind::Float) == Scalar(0.25));
}

TEST_CASE("sparse vectors never store zeros") {
  SparseVector x = vec({"1", "0", "-2"});
  CHECK(x.nnz() == 2);
  x.set(1, q(0));
  CHECK(x.nnz() == 1);
  const SparseVector y = vec({"0", "0", "2"});
  CHECK((x + y).empty());
  CHECK(pair(fun({"1", "1", "1"}), vec({"1/2", "1/3", "1/6"})) == q(1));
  CHECK(vec({"1", "0", "-1/2"}).str() == "[1:1/1, 3:-1/2]");
}

TEST_CASE("determinant, rank, nullspace and solve") {
  Matrix a(3, 3);
  const long long vals[3][3] = {{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = q(vals[r][c]);
  // 2(12-1) - 1(4-0) = 18
  CHECK(determinant(a) == q(18));
  CHECK(rank(a) == 3);
  auto x = solve(a, {q(1), q(0), q(0)});
  REQUIRE(x);
  CHECK(a * *x == std::vector<Scalar>{q(1), q(0), q(0)});

  Matrix s(2, 3);
  s(0, 0) = q(1); s(0, 1) = q(2); s(0, 2) = q(3);
  s(1, 0) = q(2); s(1, 1) = q(4); s(1, 2) = q(6);
  CHECK(rank(s) == 1);
  const auto ns = nullspace(s);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK(s * v == std::vector<Scalar>{q(0), q(0)});

  Matrix sing(2, 2);
  sing(0, 0) = q(1); sing(0, 1) = q(2); sing(1, 0) = q(2); sing(1, 1) = q(4);
  CHECK(determinant(sing) == q(0));
  CHECK_FALSE(solve(sing, {q(1), q(1)}).has_value());
}

TEST_CASE("Bareiss determinant agrees with cofactor expansion on random matrices") {
  Rng rng(11);
  auto cofactor = [](const Matrix& m, auto&& self) -> Scalar {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    Scalar acc = q(0);
    for (std::size_t c = 0; c < n; ++c) {
      Matrix minor(n - 1, n - 1);
      for (std::size_t r = 1; r < n; ++r)
        for (std::size_t k = 0, j = 0; k < n; ++k)
          if (k != c) minor(r - 1, j++) = m(r, k);
      const Scalar term = m(0, c) * self(minor, self);
      acc += (c % 2 == 0) ? term : -term;
    }
    return acc;
  };
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 5));
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = rng.coin(0.3) ? q(0) : rng.rational(3, 3);
    CHECK(determinant(m) == cofactor(m, cofactor));
  }
}
