#include "opbench/transport.hpp"

#include <algorithm>
#include <set>

#include "opbench/linalg.hpp"

namespace opbench {

namespace {

std::vector<std::size_t> unused(const std::vector<std::size_t>& used, std::size_t total) {
  const std::set<std::size_t> u(used.begin(), used.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= total; ++i)
    if (!u.count(i)) out.push_back(i);
  return out;
}

std::size_t min_unused(const std::vector<std::size_t>& used) {
  const std::set<std::size_t> u(used.begin(), used.end());
  std::size_t i = 1;
  while (u.count(i)) ++i;
  return i;
}

Index extent(const TransportState& s) {
  Index n = s.t.extent();
  for (const auto& x : s.a) n = std::max(n, x.max_index());
  for (const auto& x : s.b) n = std::max(n, x.max_index());
  for (Index i : s.p.active()) n = std::max(n, i);
  return n;
}

std::string show(const std::optional<Scalar>& s) { return s ? s->str() : "none"; }

}  // namespace

Pool Pool::all(const std::vector<SparseVector>& items) {
  Pool p{&items, {}};
  for (std::size_t i = 1; i <= items.size(); ++i) p.allowed.push_back(i);
  return p;
}

StepResult step_forward(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                        const SparseVector& u, const std::vector<SparseVector>& L, const Pool& m, const Scalar& eps) {
  const CoordFunctional f = separating_functional(p, L, u);
  const ScalarKind kind = u.kind_or(p.scalar_kind());
  const Scalar fu = pair(f, u, kind);
  const SparseVector base = u + t(u);
  const Scalar spent = budget_sum(t, p, disk);
  const Scalar one = Scalar::one(kind);
  std::optional<Scalar> best;
  for (std::size_t idx : m.allowed) {
    const SparseVector& r = (*m.items)[idx - 1];
    const SparseVector v = (r - base) / fu;
    const auto pd = try_minkowski(disk, v);
    if (!pd) continue;
    if (!best || *pd < *best) best = *pd;
    // p*(f) = 1, so the new budget is spent + p_D(v)
    if (*pd < eps && spent + *pd < one) return {f, v, idx, r, *pd};
  }
  throw NoApproximantError("no element of M within eps of u + Tu (best p_D(v) = " + show(best) + ")", best);
}

StepResult step_backward(const FiniteRankOperator& t, const SeminormSpec& p, const DiskSpec& disk,
                         const SparseVector& u, const std::vector<SparseVector>& L, const Pool& m, const Scalar& eps) {
  const FiniteRankOperator j = t.with_base(OperatorBase::Identity);
  const SparseVector w = invert(j)(u);
  const CoordFunctional f = separating_functional(p, L, w);
  const ScalarKind kind = u.kind_or(p.scalar_kind());
  const Scalar spent = budget_sum(t, p, disk);
  const Scalar one = Scalar::one(kind);
  std::optional<Scalar> best;
  for (std::size_t idx : m.allowed) {
    const SparseVector& a = (*m.items)[idx - 1];
    const Scalar fa = pair(f, a, kind);
    if (fa.is_zero()) continue;
    const SparseVector v = j(w - a) / fa;
    const auto pd = try_minkowski(disk, v);
    if (!pd) continue;
    if (!best || *pd < *best) best = *pd;
    if (*pd < eps && spent + *pd < one) return {f, v, idx, a, *pd};
  }
  throw NoApproximantError("no element of M close enough to (I+T)^-1 u (best p_D(v) = " + show(best) + ")", best);
}

std::vector<Scalar> parse_eps_schedule(const std::string& spec, std::size_t count, ScalarKind kind) {
  std::vector<Scalar> out;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon), tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "geometric") {
    const Scalar r = Scalar::parse(tail, kind);
    if (!(r.sign() > 0)) throw Error(ErrorCode::InvalidArgument, "geometric ratio must be positive");
    Scalar cur = r * r;
    for (std::size_t j = 1; j <= count; ++j, cur *= r) out.push_back(cur);
  } else if (head == "list") {
    std::size_t pos = 0;
    while (pos <= tail.size() && out.size() < count) {
      const auto comma = tail.find(',', pos);
      out.push_back(Scalar::parse(tail.substr(pos, comma - pos), kind));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (out.size() < count) throw Error(ErrorCode::InvalidArgument, "eps list shorter than 2k");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown eps schedule '" + spec + "'");
  }
  return out;
}

TransportResult run_transport(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b,
                              const SeminormSpec& p, const DiskSpec& disk, const std::vector<Scalar>& eps,
                              std::size_t stages) {
  TransportState s;
  s.a = a;
  s.b = b;
  s.p = p;
  s.disk = disk;
  s.eps = eps;
  const ScalarKind kind = p.scalar_kind();
  if (eps.size() < 2 * stages) throw Error(ErrorCode::InvalidArgument, "eps schedule shorter than 2k");
  Scalar total = Scalar::zero(kind);
  for (const auto& e : eps) {
    if (!(e.sign() > 0)) throw Error(ErrorCode::InvalidArgument, "eps_j must be positive");
    total += e;
  }
  if (!(total < Scalar::one(kind))) throw Error(ErrorCode::InvalidArgument, "sum of eps is not below 1");
  if (!p_bounded_by_disk(p, disk)) throw Error(ErrorCode::InvalidArgument, "p is not bounded by 1 on D");
  if (!p_independent(p, a)) throw Error(ErrorCode::InvalidArgument, "A is not p-independent");
  if (!p_independent(p, b)) throw Error(ErrorCode::InvalidArgument, "B is not p-independent");

  for (std::size_t q = 1; q <= stages; ++q) {
    TransportState next = s;
    try {
      // forward: u = a(n_{2q-1}), M = B minus used and the reserved m_{2q}
      const std::size_t n_odd = min_unused(next.n_idx);
      const std::size_t m_even = min_unused(next.m_idx);
      if (n_odd > a.size() || m_even > b.size()) throw Error(ErrorCode::NoApproximant, "enumeration prefix used up");
      std::vector<SparseVector> L;
      for (std::size_t n : next.n_idx) L.push_back(a[n - 1]);
      std::vector<std::size_t> reserved = next.m_idx;
      reserved.push_back(m_even);
      const auto fwd = step_forward(next.t, p, disk, a[n_odd - 1], L, Pool{&b, unused(reserved, b.size())},
                                    eps[2 * q - 2]);
      next.t.add_term(fwd.f, fwd.v);
      next.n_idx.push_back(n_odd);
      next.m_idx.push_back(fwd.index);

      // backward: u = b(m_{2q}), L = used a's, M = unused A
      L.push_back(a[n_odd - 1]);
      const auto bwd = step_backward(next.t, p, disk, b[m_even - 1], L, Pool{&a, unused(next.n_idx, a.size())},
                                     eps[2 * q - 1]);
      next.t.add_term(bwd.f, bwd.v);
      next.n_idx.push_back(bwd.index);
      next.m_idx.push_back(m_even);
      next.stage = q;
    } catch (const Error& e) {
      throw TransportAborted(e, q, s);
    }
    s = std::move(next);
  }
  return {s.j(), s};
}

TransportReport verify_transport(const TransportState& s) {
  TransportReport r;
  const std::size_t len = 2 * s.stage;
  const ScalarKind kind = s.p.scalar_kind();
  CheckList& c = r.checks;

  const bool shape = s.n_idx.size() == len && s.m_idx.size() == len && s.t.size() == len &&
                     s.t.base() == OperatorBase::Zero && s.eps.size() >= len;
  c.add("shape", shape, "stage " + std::to_string(s.stage));
  if (!shape) {
    r.budget = Scalar::zero(kind);
    return r;
  }

  auto distinct = [](const std::vector<std::size_t>& xs) { return std::set<std::size_t>(xs.begin(), xs.end()).size() == xs.size(); };
  c.add("t1 distinct", distinct(s.n_idx) && distinct(s.m_idx));

  bool cover = true;
  std::string cover_detail;
  for (std::size_t k = 1; k <= s.stage; ++k) {
    const std::set<std::size_t> ns(s.n_idx.begin(), s.n_idx.begin() + 2 * k), ms(s.m_idx.begin(), s.m_idx.begin() + 2 * k);
    for (std::size_t i = 1; i <= k; ++i)
      if (!ns.count(i) || !ms.count(i)) {
        cover = false;
        cover_detail = "k=" + std::to_string(k) + " misses " + std::to_string(i);
      }
  }
  c.add("t2 coverage", cover, cover_detail);

  bool t3 = true;
  std::string t3_detail;
  for (std::size_t j = 0; j < len; ++j) {
    const auto& term = s.t.terms()[j];
    bool ok = false;
    try {
      const auto pd = try_minkowski(s.disk, term.v);
      ok = pd && *pd < s.eps[j] && dual_norm(s.p, term.f) <= Scalar::one(kind);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      t3 = false;
      t3_detail = "j=" + std::to_string(j + 1);
    }
  }
  c.add("t3 bounds", t3, t3_detail);

  bool mono = true;
  for (std::size_t q = 1; q <= s.stage; ++q) {
    const std::vector<std::size_t> nprev(s.n_idx.begin(), s.n_idx.begin() + 2 * q - 2);
    const std::vector<std::size_t> mprev(s.m_idx.begin(), s.m_idx.begin() + 2 * q - 2);
    if (s.n_idx[2 * q - 2] != min_unused(nprev) || s.m_idx[2 * q - 1] != min_unused(mprev)) mono = false;
  }
  c.add("min-rule", mono);

  const FiniteRankOperator j = s.j();
  bool t5 = true;
  std::string t5_detail;
  const SeminormSpec sup = SeminormSpec::on_window(SeminormKind::Sup, std::max<Index>(extent(s), 1), kind);
  for (std::size_t k = 0; k < len; ++k) {
    const bool in_range = s.n_idx[k] >= 1 && s.n_idx[k] <= s.a.size() && s.m_idx[k] >= 1 && s.m_idx[k] <= s.b.size();
    if (!in_range) {
      if (t5) t5_detail = "j=" + std::to_string(k + 1) + " index out of range";
      t5 = false;
      continue;
    }
    const SparseVector diff = j(s.a[s.n_idx[k] - 1]) - s.b[s.m_idx[k] - 1];
    r.rows.push_back({k + 1, s.n_idx[k], s.m_idx[k], eval_seminorm(sup, diff)});
    if (!diff.empty() && t5) t5_detail = "j=" + std::to_string(k + 1);
    if (!diff.empty()) t5 = false;
  }
  c.add("t5 matching", t5, t5_detail);

  r.budget = Scalar::zero(kind);
  bool budget_ok = true;
  try {
    r.budget = budget_sum(s.t, s.p, s.disk);
    budget_ok = r.budget < Scalar::one(kind) && p_bounded_by_disk(s.p, s.disk);
  } catch (const Error&) {
    budget_ok = false;
  }
  c.add("budget c < 1", budget_ok, r.budget.str());

  bool fixes = true;
  const Index n = extent(s);
  for (Index i = 1; i <= n; ++i) {
    if (s.p.is_active(i)) continue;
    const SparseVector ei = SparseVector::unit(i, kind);
    if (!(j(ei) == ei)) fixes = false;
  }
  c.add("kernel fixed", fixes);

  bool inv_ok = true;
  try {
    const FiniteRankOperator ji = invert(j);
    inv_ok = equal_on_window(compose(ji, j), FiniteRankOperator::identity(), n);
  } catch (const Error&) {
    inv_ok = false;
  }
  c.add("invertible", inv_ok);
  return r;
}

}  // namespace opbench
