#include "doctest.h"

#include "opbench/hypercyclic.hpp"
#include "opbench/transport.hpp"
#include "oracles.hpp"
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

std::vector<SparseVector> standard(Index n) {
  std::vector<SparseVector> us;
  for (Index i = 1; i <= n; ++i) us.push_back(e(i));
  return us;
}

// T^n z term by term, then max |.| over coordinates 1..m
Scalar observed_gap(const FiniteRankOperator& t, SparseVector z, std::size_t n, const SparseVector& y, Index m) {
  for (std::size_t k = 0; k < n; ++k) {
    SparseVector next = t.base() == OperatorBase::Identity ? z : SparseVector{};
    for (const auto& term : t.terms()) {
      Scalar fz = q(0);
      for (const auto& [i, c] : term.f.entries()) fz += c * z.get(i);
      for (const auto& [i, c] : term.v.entries()) next.set(i, next.get(i) + fz * c);
    }
    z = next;
  }
  Scalar worst = q(0);
  for (Index i = 1; i <= m; ++i) worst = max(worst, (z.get(i) - y.get(i)).abs());
  return worst;
}

}  // namespace

TEST_CASE("build_shift_operator on the standard basis") {
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto d = DiskSpec::l1_window(6);
  const auto spec = build_shift_operator(standard(6), p, d);
  CHECK(spec.s(e(1)).empty());
  for (Index k = 2; k <= 6; ++k) CHECK(spec.s(e(k)) == e(k - 1) * Scalar::pow2(-static_cast<int>(k - 1), ScalarKind::Rational));
  CHECK(spec.s(spec.s(e(2))).empty());
  for (const auto& c : verify_shift(spec, p, d).checks) CHECK_MESSAGE(c.ok, c.name << " " << c.detail);
}

TEST_CASE("build_shift_operator on (e1, e1+e2)") {
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 2);
  const auto d = DiskSpec::l1_window(2);
  const auto spec = build_shift_operator({e(1), vec({"1", "1"})}, p, d);
  REQUIRE(spec.fs.size() == 2);
  CHECK(spec.fs[0] == fun({"1", "-1"}));
  CHECK(spec.fs[1] == delta(2));
  CHECK(vertex_dual_norm(p, spec.fs[0]) == q(2));
  // w_1 = 2^-1 / (p_D(e1) p*(d2)) = 1/2
  const Scalar w1 = q(1, 2) / (q(1) * vertex_dual_norm(p, spec.fs[1]));
  REQUIRE(spec.weights.size() == 1);
  CHECK(spec.weights[0] == w1);
  CHECK(spec.s(vec({"1", "1"})) == e(1) * w1);
  CHECK(spec.s(e(1)).empty());
}

TEST_CASE("shift chain properties on random bases") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const Index window = 10, active = 6;
    const auto p = SeminormSpec::on_window(SeminormKind::Sup, active);
    const auto d = DiskSpec::l1_window(window);
    std::vector<SparseVector> us;
    while (us.size() < 5) {
      auto u = rng.vector(window);
      us.push_back(u);
      if (p_rank(p, us) != us.size()) us.pop_back();
    }
    std::vector<SparseVector> samples;
    for (int s = 0; s < 500 / 8; ++s) samples.push_back(rng.vector(window, 5, 7, 0.8));
    const auto spec = build_shift_operator(us, p, d);
    for (const auto& c : verify_shift(spec, p, d, samples).checks) CHECK_MESSAGE(c.ok, c.name << " " << c.detail);
    for (Index i = active + 1; i <= window; ++i) CHECK(spec.t()(e(i)) == e(i));
  }
}

TEST_CASE("build_shift_operator rejects a kernel collision") {
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 2);
  CHECK(code_of([&] { build_shift_operator({e(1), e(3)}, p, DiskSpec::l1_window(3)); }) == ErrorCode::KernelCollision);
}

TEST_CASE("verify_shift flags a broken weight") {
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 4);
  const auto d = DiskSpec::l1_window(4);
  auto spec = build_shift_operator(standard(4), p, d);
  spec.weights[1] = q(7);
  const auto checks = verify_shift(spec, p, d);
  REQUIRE(checks.find("chain"));
  CHECK_FALSE(checks.find("chain")->ok);
  CHECK(checks.find("chain")->detail == "k=3");
}

TEST_CASE("bml premise dimensions") {
  // chain long enough to cover the lookahead domain: meet_n = e_1..e_n
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 12);
  const auto shift = build_shift_operator(standard(12), p, DiskSpec::l1_window(12)).t();
  const auto rep = bml_premise_check(shift, 6, 6);
  CHECK(rep.span_dim == 6);
  CHECK(rep.full());
  for (const auto& l : rep.levels) {
    CHECK(l.range_dim == 12 - l.n);
    CHECK(l.kernel_dim == l.n);
    CHECK(l.meet_dim == l.n);
  }

  CHECK(bml_premise_check(FiniteRankOperator::identity(), 6, 6).span_dim == 0);

  // Jordan block S e2 = e1, S e3 = e2
  FiniteRankOperator jordan = FiniteRankOperator::zero();
  jordan.add_term(delta(2), e(1));
  jordan.add_term(delta(3), e(2));
  const auto jr = bml_premise_check(jordan, 3, 1);
  REQUIRE(jr.levels.size() == 1);
  CHECK(jr.levels[0].meet_dim == 1);
  CHECK(jr.span_dim == 1);
}

TEST_CASE("transitivity_witness examples") {
  const auto obs = SeminormSpec::on_window(SeminormKind::Sup, 4);
  const auto t = build_shift_operator(standard(8), SeminormSpec::on_window(SeminormKind::Sup, 8), DiskSpec::l1_window(8)).t();
  const Scalar eps = q(1, 1000);

  const auto same = transitivity_witness(t, obs, e(1), e(1), eps, 10, 8);
  CHECK(same.n == 0);
  CHECK(same.z == e(1));

  const auto w = transitivity_witness(t, obs, e(1), e(1) * q(2), eps, 64, 8);
  MESSAGE("found n = " << w.n);
  CHECK(w.n >= 1);
  CHECK(observed_gap(FiniteRankOperator::identity(), w.z, 0, e(1), 4) < eps);
  CHECK(observed_gap(t, w.z, w.n, e(1) * q(2), 4) < eps);
  // the correction lives on 5..8
  for (Index i = 1; i <= 4; ++i) CHECK(w.z.get(i) == e(1).get(i));

  try {
    transitivity_witness(t, obs, e(1), e(1) * q(2), eps, 0, 8);
    FAIL("expected NOT_FOUND");
  } catch (const WitnessNotFound& nf) {
    CHECK(nf.code() == ErrorCode::NotFound);
    CHECK(nf.best_n() == 0);
    CHECK(nf.best_residual() == q(1));
  }
}

TEST_CASE("transitivity witnesses for random pairs are genuine") {
  Rng rng(12);
  const auto obs = SeminormSpec::on_window(SeminormKind::Sup, 5);
  const auto t = build_shift_operator(standard(10), SeminormSpec::on_window(SeminormKind::Sup, 10), DiskSpec::l1_window(10)).t();
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = rng.vector(10), y = rng.vector(10);
    const auto w = transitivity_witness(t, obs, x, y, q(1, 1000), 64, 10);
    CHECK(observed_gap(FiniteRankOperator::identity(), w.z, 0, x, 5) == w.residual_x);
    CHECK(observed_gap(t, w.z, w.n, y, 5) == w.residual_y);
    CHECK(w.residual_y < q(1, 1000));
  }
}

TEST_CASE("omega_shift_demo examples") {
  const auto a = omega_shift_demo(6, e(2), 4);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == e(2));
  CHECK(a[1] == e(1));
  CHECK(a[2].empty());
  CHECK(a[3].empty());

  const auto b = omega_shift_demo(3, vec({"1", "2", "3"}), 3);
  REQUIRE(b.size() == 3);
  CHECK(b[1] == vec({"2", "3"}));
  CHECK(b[2] == vec({"3"}));

  const auto c = omega_shift_demo(4, vec({"1", "2", "3", "4", "5"}), 1);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == vec({"1", "2", "3", "4"}));
}

TEST_CASE("build_nonorbit_set examples") {
  std::vector<SeminormSpec> family;
  for (Index n = 1; n <= 5; ++n) family.push_back(SeminormSpec::on_window(SeminormKind::Sup, n));
  const auto s = build_nonorbit_set(family, {vec({"1", "0", "0", "0", "0", "1"})});
  CHECK(s.c == std::vector<SparseVector>{e(2), e(3), e(4), e(5)});
  CHECK(s.a.size() == 5);
  for (std::size_t n = 0; n < s.c.size(); ++n) {
    CHECK(family[n].in_kernel(s.c[n]));
    CHECK_FALSE(family[n + 1].in_kernel(s.c[n]));
  }

  const auto empty_b = build_nonorbit_set(family, {});
  CHECK(empty_b.a == empty_b.c);

  const std::vector<SeminormSpec> flat(3, family[0]);
  CHECK(code_of([&] { build_nonorbit_set(flat, {}); }) == ErrorCode::NotNested);
  CHECK(code_of([&] { build_nonorbit_set(family, {e(1), e(1) * q(2)}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("refute_orbit: identity stays put") {
  std::vector<SeminormSpec> family;
  for (Index n = 1; n <= 4; ++n) family.push_back(SeminormSpec::on_window(SeminormKind::Sup, n));
  const auto s = build_nonorbit_set(family, {vec({"1", "0", "0", "0", "1"})});
  const auto r = refute_orbit(FiniteRankOperator::identity(), s.a[0], s, 5);
  CHECK(r.inside_a);
  CHECK_FALSE(r.covers_a);
  CHECK(r.m.empty());
  CHECK(std::find(r.flags.begin(), r.flags.end(), "orbit not dense surrogate") != r.flags.end());
  CHECK(r.orbit_p1_rank == 1);
}

TEST_CASE("refute_orbit: omega shift leaves A") {
  std::vector<SeminormSpec> family;
  for (Index n = 1; n <= 6; ++n) family.push_back(SeminormSpec::on_window(SeminormKind::Sup, n));
  const auto s = build_nonorbit_set(family, {vec({"1", "0", "0", "0", "0", "0", "1"})});
  const auto r = refute_orbit(omega_shift_operator(8), e(5), s, 6);
  // e5 = C4, e4 = C3, e3 = C2, e2 = C1, e1 is not in A
  CHECK(r.membership == std::vector<std::string>{"C4", "C3", "C2", "C1", "-", "-"});
  REQUIRE(r.exit_step);
  CHECK(*r.exit_step == 4);
  CHECK(r.m.empty());
}

TEST_CASE("refute_orbit: toy operator alternating C and B") {
  // p_k on 1..k+1; C = (e3, e4, e5); B = (e1+e6, e2+e7)
  std::vector<SeminormSpec> family;
  for (Index n = 2; n <= 5; ++n) family.push_back(SeminormSpec::on_window(SeminormKind::Sup, n));
  const auto b1 = vec({"1", "0", "0", "0", "0", "1"}), b2 = vec({"0", "1", "0", "0", "0", "0", "1"});
  const auto s = build_nonorbit_set(family, {b1, b2});
  REQUIRE(s.c == std::vector<SparseVector>{e(3), e(4), e(5)});
  FiniteRankOperator t = FiniteRankOperator::zero();
  t.add_term(delta(3), b1);
  t.add_term(delta(1), e(4));
  t.add_term(delta(4), b2);
  t.add_term(delta(2), e(5) * q(3));
  const auto r = refute_orbit(t, e(3), s, 6);
  // e3 -> b1 -> e4 -> b2 -> 3 e5 -> 0
  CHECK(r.membership == std::vector<std::string>{"C1", "B1", "C2", "B2", "-", "-"});
  CHECK(r.m == std::vector<std::size_t>{0, 2});
  CHECK(r.p1_series == q(2));
  REQUIRE(r.certificates.size() == 4);
  // p_k(T^n x) / p_1(T^{n+1} x) over n in {0, 2}: e3 seen from k = 2, e4 from k = 3
  CHECK(r.certificates[0].sum == q(0));
  CHECK(r.certificates[1].sum == q(1));
  CHECK(r.certificates[2].sum == q(2));
  CHECK(r.certificates[3].sum == q(2));
  CHECK(r.certificates[2].nonzero == 2);
  REQUIRE(r.exit_step);
  CHECK(*r.exit_step == 4);
}

TEST_CASE("conjugated shift through a transport J") {
  Rng rng(13);
  const Index window = 12, active = 6;
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, active);
  const auto d = DiskSpec::l1_window(window);
  const auto inst = swapped_nets(rng, window, active, 6);
  const auto res = run_transport(inst.a, inst.b, p, d, parse_eps_schedule("geometric:1/2", 6, ScalarKind::Rational), 3);
  const auto t = build_shift_operator(standard(active), p, d).t();
  const auto j = res.j;
  const auto s = compose(j, compose(t, invert(j)));
  const auto& st = res.state;
  for (std::size_t k = 0; k < st.n_idx.size(); ++k) {
    const auto& a = st.a[st.n_idx[k] - 1];
    const auto& b = st.b[st.m_idx[k] - 1];
    CHECK(j(a) == b);
    CHECK(s(b) == j(t(a)));
  }
  for (Index i = active + 1; i <= window; ++i) CHECK(s(e(i)) == e(i));
}
