#include "doctest.h"

#include <optional>
#include <set>
#include <algorithm>

#include "opbench/transport.hpp"
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

const SeminormSpec kSup2 = SeminormSpec::on_window(SeminormKind::Sup, 2);
const DiskSpec kL1 = DiskSpec::l1_window(12);

// Independent replay of (t5): apply I + sum f_j(x) v_j term by term.
SparseVector replay(const TransportState& s, const SparseVector& x) {
  SparseVector y = x;
  for (const auto& term : s.t.terms()) {
    Scalar fx = q(0);
    for (const auto& [i, c] : term.f.entries()) fx += c * x.get(i);
    for (const auto& [i, c] : term.v.entries()) y.set(i, y.get(i) + fx * c);
  }
  return y;
}


std::size_t first_free(const std::vector<std::size_t>& used) {
  std::size_t i = 1;
  while (std::find(used.begin(), used.end(), i) != used.end()) ++i;
  return i;
}

std::vector<std::size_t> free_of(const std::vector<std::size_t>& used, std::size_t total) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= total; ++i)
    if (std::find(used.begin(), used.end(), i) == used.end()) out.push_back(i);
  return out;
}

// One enumeration serving as both A and B, grown on demand: when a step finds
// no approximant, its exact target plus a small perturbation is appended.
std::vector<SparseVector> shared_enumeration(Rng& rng, Index window, Index active, const SeminormSpec& p,
                                             const DiskSpec& disk, const std::vector<Scalar>& eps, std::size_t k) {
  std::vector<SparseVector> xs;
  auto grow = [&](std::size_t n) {
    while (xs.size() < n) xs.push_back(fresh_item(rng, window, active, xs.size()));
  };
  auto nudge = [&](const SparseVector& x, int shift) {
    return x + rng.vector(active, 4, 1, 1.0) * Scalar::pow2(-shift, ScalarKind::Rational);
  };
  // append target + smaller and smaller perturbations until the step succeeds
  auto settle = [&](auto&& step, const SparseVector& target) {
    bool appended = false;
    for (int shift = 24;; shift *= 2) {
      try {
        return step();
      } catch (const NoApproximantError&) {
        if (shift > 1 << 12) throw;
        if (appended) xs.pop_back();
        xs.push_back(nudge(target, shift));
        appended = true;
      }
    }
  };
  FiniteRankOperator t = FiniteRankOperator::zero();
  std::vector<std::size_t> ns, ms;
  for (std::size_t q = 1; q <= k; ++q) {
    const std::size_t n_odd = first_free(ns), m_even = first_free(ms);
    grow(std::max(n_odd, m_even));
    std::vector<SparseVector> L;
    for (std::size_t n : ns) L.push_back(xs[n - 1]);
    const SparseVector u = xs[n_odd - 1];
    auto reserved = ms;
    reserved.push_back(m_even);
    auto forward = [&] { return step_forward(t, p, disk, u, L, Pool{&xs, free_of(reserved, xs.size())}, eps[2 * q - 2]); };
    const std::optional<StepResult> fwd = settle(forward, u + t(u));
    t.add_term(fwd->f, fwd->v);
    ns.push_back(n_odd);
    ms.push_back(fwd->index);

    L.push_back(u);
    const SparseVector ub = xs[m_even - 1];
    auto backward = [&] { return step_backward(t, p, disk, ub, L, Pool{&xs, free_of(ns, xs.size())}, eps[2 * q - 1]); };
    const std::optional<StepResult> bwd = settle(backward, invert(t.with_base(OperatorBase::Identity))(ub));
    t.add_term(bwd->f, bwd->v);
    ns.push_back(bwd->index);
    ms.push_back(m_even);
  }
  return xs;
}

}  // namespace

TEST_CASE("step_forward examples") {
  const std::vector<SparseVector> m1{e(1)};
  auto r = step_forward(FiniteRankOperator::zero(), kSup2, kL1, e(1), {}, Pool::all(m1), q(1, 2));
  CHECK(r.f == delta(1));
  CHECK(r.element == e(1));
  CHECK(r.v.empty());

  const std::vector<SparseVector> m2{vec({"9/10", "1/10"})};
  r = step_forward(FiniteRankOperator::zero(), kSup2, kL1, e(1), {}, Pool::all(m2), q(1, 4));
  CHECK(r.v == vec({"-1/10", "1/10"}));
  CHECK(r.pd_v == q(1, 5));
  const auto rr = FiniteRankOperator::identity().with_term(r.f, r.v);
  CHECK(rr(e(1)) == vec({"9/10", "1/10"}));

  // eps = 1/5 is not enough: p_D(v) must be strictly below eps
  try {
    step_forward(FiniteRankOperator::zero(), kSup2, kL1, e(1), {}, Pool::all(m2), q(1, 5));
    FAIL("expected NO_APPROXIMANT");
  } catch (const NoApproximantError& e) {
    CHECK(e.code() == ErrorCode::NoApproximant);
    REQUIRE(e.best());
    CHECK(*e.best() == q(1, 5));
  }
}

TEST_CASE("step_backward examples") {
  const std::vector<SparseVector> m{vec({"2", "1/10"})};
  auto r = step_backward(FiniteRankOperator::zero(), kSup2, kL1, vec({"2", "0"}), {}, Pool::all(m), q(1, 4));
  CHECK(r.f == delta(1));
  CHECK(r.element == vec({"2", "1/10"}));
  CHECK(r.v == vec({"0", "-1/20"}));
  CHECK(FiniteRankOperator::identity().with_term(r.f, r.v)(r.element) == vec({"2", "0"}));

  const std::vector<SparseVector> same{vec({"2", "0"})};
  r = step_backward(FiniteRankOperator::zero(), kSup2, kL1, vec({"2", "0"}), {}, Pool::all(same), q(1, 4));
  CHECK(r.element == vec({"2", "0"}));
  CHECK(r.v.empty());

  // u + (I+T)L = e_1 + span{e_1} meets ker p = {0} in the window
  CHECK(code_of([&] { step_backward(FiniteRankOperator::zero(), kSup2, kL1, e(1), {e(1)}, Pool::all(same), q(1, 4)); }) ==
        ErrorCode::NoSeparation);
}

TEST_CASE("step_forward on a nonzero T keeps (I+R)u = r exactly") {
  const auto t = FiniteRankOperator::zero().with_term(delta(2), vec({"1/16"}));
  const std::vector<SparseVector> m{vec({"5", "5"}), vec({"1", "1/8"})};
  const auto r = step_forward(t, kSup2, kL1, vec({"1", "0"}), {vec({"0", "1"})}, Pool::all(m), q(1, 4));
  CHECK(r.index == 2);
  const auto rr = t.with_term(r.f, r.v).with_base(OperatorBase::Identity);
  CHECK(rr(vec({"1", "0"})) == vec({"1", "1/8"}));
  CHECK(rr(vec({"0", "1"})) == t.with_base(OperatorBase::Identity)(vec({"0", "1"})));
}

TEST_CASE("eps schedules") {
  const auto g = parse_eps_schedule("geometric:1/2", 4, ScalarKind::Rational);
  CHECK(g == std::vector<Scalar>{q(1, 4), q(1, 8), q(1, 16), q(1, 32)});
  CHECK(parse_eps_schedule("list:1/3,1/5", 2, ScalarKind::Rational) == std::vector<Scalar>{q(1, 3), q(1, 5)});
  CHECK(code_of([] { parse_eps_schedule("linear:2", 2, ScalarKind::Rational); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("k = 0 gives the identity and a vacuous report") {
  Rng rng(1);
  const auto inst = swapped_nets(rng, 12, 6, 4);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto res = run_transport(inst.a, inst.b, p, kL1, {}, 0);
  CHECK(res.j.size() == 0);
  CHECK(res.j.base() == OperatorBase::Identity);
  CHECK(verify_transport(res.state).checks.all_ok());
}

TEST_CASE("A = B with k = 3") {
  // a single enumeration on a 16-window, p on 1..8
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 8);
  const auto disk = DiskSpec::l1_window(16);
  const auto eps = parse_eps_schedule("geometric:1/2", 6, ScalarKind::Rational);
  Rng rng(2);
  std::vector<SparseVector> xs;
  do {
    xs = shared_enumeration(rng, 16, 8, p, disk, eps, 3);
  } while (!p_independent(p, xs));
  const auto res = run_transport(xs, xs, p, disk, eps, 3);
  const auto rep = verify_transport(res.state);
  for (const auto& c : rep.checks.checks) CHECK_MESSAGE(c.ok, c.name << " " << c.detail);
  for (std::size_t j = 0; j < 6; ++j) {
    const auto& s = res.state;
    CHECK(replay(s, xs[s.n_idx[j] - 1]) == xs[s.m_idx[j] - 1]);
  }
  std::set<std::size_t> ns(res.state.n_idx.begin(), res.state.n_idx.end()), ms(res.state.m_idx.begin(), res.state.m_idx.end());
  CHECK(ns.size() == 6);
  CHECK(ms.size() == 6);
  // the reserved index forces a genuine move at stage 1
  CHECK(res.state.m_idx[0] != 1);
}

TEST_CASE("12-window nets with p on the first half, k = 3") {
  Rng rng(3);
  const auto inst = swapped_nets(rng, 12, 6, 6);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto eps = parse_eps_schedule("geometric:1/2", 6, ScalarKind::Rational);
  const auto res = run_transport(inst.a, inst.b, p, kL1, eps, 3);
  for (std::size_t j = 0; j < 6; ++j) {
    const auto& s = res.state;
    CHECK(replay(s, s.a[s.n_idx[j] - 1]) == s.b[s.m_idx[j] - 1]);
  }
  const auto rep = verify_transport(res.state);
  CHECK(rep.checks.all_ok());
  for (const auto& row : rep.rows) CHECK(row.residual == q(0));
  CHECK(rep.budget < q(1, 2));
  // J fixes e_7..e_12
  for (Index i = 7; i <= 12; ++i) CHECK(res.j(e(i)) == e(i));
  // min-rule replay
  CHECK(res.state.n_idx[0] == 1);
  CHECK(res.state.m_idx[1] == 1);
}

TEST_CASE("k = 4 on a 6-dimensional projection cannot be completed") {
  Rng rng(3);
  const auto inst = swapped_nets(rng, 12, 6, 6);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 6);
  const auto eps = parse_eps_schedule("geometric:1/2", 8, ScalarKind::Rational);
  try {
    run_transport(inst.a, inst.b, p, kL1, eps, 4);
    FAIL("expected an aborted run");
  } catch (const TransportAborted& e) {
    CHECK(e.stage() == 4);
    CHECK(e.partial().stage == 3);
    CHECK(verify_transport(e.partial()).checks.all_ok());
  }
}

TEST_CASE("verify_transport flags a perturbed v_j") {
  Rng rng(4);
  const auto inst = swapped_nets(rng, 10, 5, 4);
  const auto p = SeminormSpec::on_window(SeminormKind::Sup, 5);
  auto res = run_transport(inst.a, inst.b, p, DiskSpec::l1_window(10),
                           parse_eps_schedule("geometric:1/2", 4, ScalarKind::Rational), 2);
  auto terms = res.state.t.terms();
  terms[2].v += e(8) * Scalar::pow2(-60, ScalarKind::Rational);
  res.state.t = FiniteRankOperator(OperatorBase::Zero, terms);
  const auto rep = verify_transport(res.state);
  const auto* t5 = rep.checks.find("t5 matching");
  REQUIRE(t5);
  CHECK_FALSE(t5->ok);
  CHECK(t5->detail.find("j=3") != std::string::npos);
}

TEST_CASE("randomized runs satisfy every invariant") {
  Rng rng(5);
  for (int t = 0; t < 6; ++t) {
    const Index window = static_cast<Index>(rng.integer(10, 16));
    const Index active = window / 2;
    const std::size_t k = std::min<std::size_t>(4, active / 2);
    const auto inst = swapped_nets(rng, window, active, 2 * k);
    const auto p = SeminormSpec::on_window(SeminormKind::Sup, active);
    const auto res = run_transport(inst.a, inst.b, p, DiskSpec::l1_window(window),
                                   parse_eps_schedule("geometric:1/2", 2 * k, ScalarKind::Rational), k);
    CHECK(verify_transport(res.state).checks.all_ok());
  }
}
