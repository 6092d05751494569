#include "doctest.h"

#include "opbench/operator.hpp"
#include "support.hpp"

using namespace opbench;
using namespace opbench::testing;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an opbench::Error");
  return ErrorCode::InvalidArgument;
}

// I + sum f_j (x) v_j with p*(f_j) p_D(v_j) scaled below 1/(2 terms).
FiniteRankOperator random_certified(Rng& rng, const SeminormSpec& p, const DiskSpec& d, Index n, int terms,
                                     Index m = 10) {
  FiniteRankOperator j = FiniteRankOperator::identity();
  const Scalar share = q(1, 2 * terms);
  for (int t = 0; t < terms; ++t) {
    CoordFunctional f = rng.functional(n);
    for (Index i = n + 1; i <= m; ++i) f.set(i, q(0));
    SparseVector v = rng.vector(m);
    if (f.empty() || v.empty()) continue;
    const Scalar budget = dual_norm(p, f) * minkowski(d, v);
    v *= share * q(rng.integer(1, 9), 10) / budget;
    j.add_term(std::move(f), std::move(v));
  }
  return j;
}

FiniteRankOperator backward_shift(Index n) {
  FiniteRankOperator s = FiniteRankOperator::zero();
  for (Index k = 1; k < n; ++k) s.add_term(delta(k + 1), e(k));
  return s;
}

}  // namespace

TEST_CASE("apply examples") {
  const SparseVector x = vec({"1", "-2", "3"});
  CHECK(FiniteRankOperator::zero()(x).empty());
  CHECK(FiniteRankOperator::identity()(x) == x);
  const auto j = FiniteRankOperator::identity().with_term(delta(1), vec({"1/2", "0"}));
  CHECK(apply(j, vec({"1", "0"})) == vec({"3/2", "0"}));
}

TEST_CASE("neumann_certificate examples") {
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 4);
  const auto d = DiskSpec::l1_window(4);
  CHECK(neumann_certificate(FiniteRankOperator::zero(), p, d).c == q(0));

  const auto t = FiniteRankOperator::zero().with_term(delta(1), vec({"1/2", "0"}));
  const auto b = neumann_certificate(t, p, d);
  CHECK(b.c == q(1, 2));
  CHECK(b.p_bounded_on_disk);
  CHECK(b.certifies_invertibility());

  const auto t2 = FiniteRankOperator::zero().with_term(delta(1), vec({"3/4"})).with_term(delta(2), vec({"0", "3/4"}));
  CHECK(code_of([&] { neumann_certificate(t2, p, d); }) == ErrorCode::BudgetExceeded);
  CHECK(budget_sum(t2, p, d) == q(3, 2));

  const auto off = FiniteRankOperator::zero().with_term(delta(5), e(1));
  CHECK(code_of([&] { neumann_certificate(off, p, d); }) == ErrorCode::NotPBounded);
}

TEST_CASE("invert examples") {
  CHECK(invert(FiniteRankOperator::identity()).size() == 0);

  const auto j = FiniteRankOperator::identity().with_term(delta(1), vec({"1/2", "0"}));
  const auto inv = invert(j);
  REQUIRE(inv.size() == 1);
  CHECK(inv.terms()[0].f == delta(1));
  CHECK(inv.terms()[0].v == vec({"-1/3"}));
  CHECK(inv(vec({"3/2", "0"})) == vec({"1", "0"}));

  const auto sing = FiniteRankOperator::identity().with_term(delta(1), -e(1));
  CHECK(code_of([&] { invert(sing); }) == ErrorCode::Singular);
}

TEST_CASE("compose agrees with sequential application") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    FiniteRankOperator a(rng.coin() ? OperatorBase::Identity : OperatorBase::Zero, {});
    FiniteRankOperator b(rng.coin() ? OperatorBase::Identity : OperatorBase::Zero, {});
    for (int k = rng.integer(0, 3); k > 0; --k) a.add_term(rng.functional(5), rng.vector(5));
    for (int k = rng.integer(0, 3); k > 0; --k) b.add_term(rng.functional(5), rng.vector(5));
    const auto ab = compose(a, b);
    for (Index i = 1; i <= 6; ++i) CHECK(ab(e(i)) == a(b(e(i))));
    const SparseVector x = rng.vector(6);
    CHECK(ab(x) == a(b(x)));
  }
}

TEST_CASE("invert round-trips exactly on 200 certified operators") {
  Rng rng(2);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto d = DiskSpec::l1_window(10);
  for (int t = 0; t < 200; ++t) {
    const auto j = random_certified(rng, p, d, 6, static_cast<int>(rng.integer(1, 4)));
    CHECK(neumann_certificate(j.perturbation(), p, d).certifies_invertibility());
    const auto inv = invert(j);
    CHECK(equal_on_window(compose(inv, j), FiniteRankOperator::identity(), 10));
    CHECK(equal_on_window(compose(j, inv), FiniteRankOperator::identity(), 10));
    const SparseVector x = rng.vector(10);
    CHECK(inv(j(x)) == x);
  }
}

TEST_CASE("continuity bound holds on random vectors") {
  Rng rng(3);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto d = DiskSpec::l1_window(10);
  const auto j = random_certified(rng, p, d, 6, 3);
  const auto b = neumann_certificate(j.perturbation(), p, d);
  for (int t = 0; t < 500; ++t) {
    const SparseVector x = rng.vector(10);
    CHECK(minkowski(d, j.perturbation()(x)) <= b.c * eval_seminorm(p, x));
  }
}

TEST_CASE("kernel of p is fixed") {
  Rng rng(4);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto d = DiskSpec::l1_window(10);
  for (int t = 0; t < 20; ++t) {
    const auto j = random_certified(rng, p, d, 6, 3);
    SparseVector x = rng.vector(10);
    x = x.restricted(IndexSet{7, 8, 9, 10});
    CHECK(j(x) == x);
  }
}

TEST_CASE("conjugate_orbit examples") {
  const auto t0 = backward_shift(4);
  const auto j = FiniteRankOperator::identity().with_term(delta(1), e(2));
  const auto conj = conjugate_orbit(t0, e(4), j, 4);
  const auto plain = orbit(t0, e(4), 4);
  REQUIRE(conj.size() == 4);
  for (std::size_t n = 0; n < 4; ++n) CHECK(conj[n] == j(plain[n]));
  // J e_1 = e_1 + e_2, J e_k = e_k otherwise
  CHECK(conj[3] == vec({"1", "1"}));

  CHECK(conjugate_orbit(t0, e(4), FiniteRankOperator::identity(), 4) == plain);
  CHECK(conjugate_orbit(t0, e(3), j, 1) == std::vector<SparseVector>{j(e(3))});
}

TEST_CASE("conjugation identity up to horizon 50") {
  Rng rng(5);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto d = DiskSpec::l1_window(8);
  for (int t = 0; t < 5; ++t) {
    FiniteRankOperator t0 = backward_shift(8);
    t0.add_term(rng.functional(8, 1, 2, 0.3), rng.vector(8, 1, 2, 0.3) * q(1, 4));
    const auto j = random_certified(rng, p, d, 6, 2, 8);
    const SparseVector x0 = rng.vector(8);
    const auto conj = conjugate_orbit(t0, x0, j, 50);
    const auto plain = orbit(t0, x0, 50);
    for (std::size_t n = 0; n < 50; ++n) CHECK(conj[n] == j(plain[n]));
  }
}

TEST_CASE("float mode inverts by the same solve") {
  const auto j = FiniteRankOperator::identity().with_term(CoordFunctional::unit(1, ScalarKind::Float),
                                                          SparseVector::unit(1, ScalarKind::Float) * Scalar(0.5));
  const auto inv = invert(j);
  CHECK(inv(j(SparseVector::unit(1, ScalarKind::Float))).get(1, ScalarKind::Float).to_double() ==
        doctest::Approx(1.0));
  const auto sing = FiniteRankOperator::identity().with_term(CoordFunctional::unit(1, ScalarKind::Float),
                                                             SparseVector::unit(1, ScalarKind::Float) * Scalar(-1.0));
  CHECK(code_of([&] { invert(sing); }) == ErrorCode::Singular);
}
