#include "opbench/density.hpp"

#include <set>

#include "opbench/linalg.hpp"

namespace opbench {

namespace {

template <class Dist>
std::vector<NetRow> nearest(const std::vector<SparseVector>& set, const std::vector<SparseVector>& targets,
                            Dist&& dist) {
  std::vector<NetRow> rows;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    std::optional<NetRow> best;
    for (std::size_t i = 0; i < set.size(); ++i) {
      auto d = dist(targets[t] - set[i]);
      if (!d) continue;
      if (!best || *d < best->distance) best = NetRow{t, i, *d};
    }
    if (!best) throw Error(ErrorCode::NotANet, "target " + std::to_string(t) + " has no element at finite distance");
    rows.push_back(*best);
  }
  return rows;
}

Scalar max_distance(const std::vector<NetRow>& rows, ScalarKind kind) {
  Scalar m = Scalar::zero(kind);
  for (const auto& r : rows) m = max(m, r.distance);
  return m;
}

}  // namespace

std::vector<NetRow> net_rows(const std::vector<SparseVector>& set, const std::vector<SparseVector>& targets,
                             const SeminormSpec& norm) {
  return nearest(set, targets, [&](const SparseVector& d) { return std::optional<Scalar>(eval_seminorm(norm, d)); });
}

bool is_net(const std::vector<SparseVector>& set, const EpsilonNet& net, const SeminormSpec& norm) {
  if (net.targets.empty()) return true;
  if (set.empty()) return false;
  for (const auto& r : net_rows(set, net.targets, norm))
    if (net.eps < r.distance) return false;
  return true;
}

Extraction extract_p_independent(const std::vector<SparseVector>& a, const SeminormSpec& p,
                                 const std::vector<Ball>& balls, const SeminormSpec& window_norm) {
  if (p.active().empty()) throw Error(ErrorCode::InvalidArgument, "p is trivial");
  Extraction out;
  std::set<std::size_t> used;
  for (std::size_t n = 0; n < balls.size(); ++n) {
    bool found = false;
    for (std::size_t i = 0; i < a.size() && !found; ++i) {
      if (used.count(i)) continue;
      if (!(eval_seminorm(window_norm, a[i] - balls[n].center) < balls[n].radius)) continue;
      std::vector<SparseVector> trial = out.items;
      trial.push_back(a[i]);
      if (p_rank(p, trial) != trial.size()) continue;
      used.insert(i);
      out.picked.push_back(i);
      out.items.push_back(a[i]);
      found = true;
    }
    if (!found) {
      throw Error(ErrorCode::Exhausted, "ball " + std::to_string(n + 1) + " holds no admissible element of the prefix");
    }
  }
  return out;
}

DiskSpec null_sequence_disk(const std::vector<SparseVector>& xs) { return DiskSpec::from_generators(xs); }

CommonDisk common_disk(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b, const EpsilonNet& net,
                       const SeminormSpec& window_norm, std::size_t rounds) {
  if (!is_net(a, net, window_norm)) throw Error(ErrorCode::NotANet, "A is not an eps-net for the targets");
  if (!is_net(b, net, window_norm)) throw Error(ErrorCode::NotANet, "B is not an eps-net for the targets");
  const ScalarKind kind = net.eps.kind();
  CommonDisk out{DiskSpec::from_weights({}), {}, {}, {}, Scalar::zero(kind), Scalar::zero(kind), rounds};

  const auto near_a = net_rows(a, net.targets, window_norm);
  const auto near_b = net_rows(b, net.targets, window_norm);
  const std::size_t tn = net.targets.size();
  // f(m) cycles through the targets; alpha(m), beta(m) are their nearest points.
  for (std::size_t m = 1; m <= rounds * tn; ++m) {
    const std::size_t t = (m - 1) % tn;
    const Scalar s = Scalar::pow2(static_cast<int>(m), kind);
    out.schedule.push_back({"f-alpha", m, t, s, (net.targets[t] - a[near_a[t].nearest]) * s});
    out.schedule.push_back({"f-beta", m, t, s, (net.targets[t] - b[near_b[t].nearest]) * s});
  }
  auto gamma_terms = [&](const std::vector<SparseVector>& items, const char* role) {
    for (std::size_t m = 1; m <= items.size(); ++m) {
      const Scalar g = Scalar::pow2(-static_cast<int>(m), kind) /
                       (Scalar::one(kind) + eval_seminorm(window_norm, items[m - 1]));
      out.schedule.push_back({role, m, m - 1, g, items[m - 1] * g});
    }
  };
  gamma_terms(a, "gamma-x");
  gamma_terms(b, "gamma-y");

  std::map<Index, Scalar> peak;
  for (const auto& e : out.schedule) {
    for (const auto& [i, v] : e.item.entries()) {
      if (i > net.window) throw Error(ErrorCode::InvalidArgument, "item leaves the window");
      auto it = peak.find(i);
      if (it == peak.end()) peak.emplace(i, v.abs());
      else it->second = max(it->second, v.abs());
    }
  }
  const Scalar n = Scalar::from_int(net.window, kind);
  std::map<Index, Scalar> weights;
  for (const auto& [i, v] : peak) weights.emplace(i, n * v);
  out.disk = DiskSpec::from_weights(weights);

  for (const auto& [i, d] : weights) {
    auto w = window_norm.weights().find(i);
    if (w != window_norm.weights().end()) out.bound = max(out.bound, w->second * d);
  }
  auto pd = [&](const SparseVector& x) { return try_minkowski(out.disk, x); };
  out.net_a = nearest(a, net.targets, pd);
  out.net_b = nearest(b, net.targets, pd);
  out.eps_prime = max(max_distance(out.net_a, kind), max_distance(out.net_b, kind));
  return out;
}

BiorthogonalSystem biorthogonal_system(const std::vector<SparseVector>& ys, const SeminormSpec& p) {
  if (p_rank(p, ys) != ys.size()) {
    throw Error(ErrorCode::KernelCollision, "span of the family meets ker p outside 0");
  }
  const ScalarKind kind = kind_of(ys, p.scalar_kind());
  BiorthogonalSystem s;
  for (const auto& y : ys) {
    SparseVector u = y;
    for (std::size_t j = 0; j < s.u.size(); ++j) {
      const Scalar c = pair(s.f[j], y, kind);
      if (!c.is_zero()) u.axpy(-c, s.u[j]);
    }
    CoordFunctional f = separating_functional(p, s.u, u);
    f /= pair(f, u, kind);
    s.u.push_back(std::move(u));
    s.f.push_back(std::move(f));
  }
  return s;
}

std::vector<CoordFunctional> biorthogonalize(const std::vector<SparseVector>& us, const SeminormSpec& p) {
  const BiorthogonalSystem s = biorthogonal_system(us, p);
  const std::size_t n = us.size();
  const ScalarKind kind = kind_of(us, p.scalar_kind());
  // G_km = f'_k(u_m) is unit upper triangular; f_n = sum_k (G^-1)_nk f'_k.
  Matrix g(n, n, kind);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m) g(k, m) = pair(s.f[k], us[m], kind);
  const auto ginv = inverse(g);
  if (!ginv) throw Error(ErrorCode::KernelCollision, "family is dependent");
  std::vector<CoordFunctional> out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k)
      if (!(*ginv)(r, k).is_zero()) out[r].axpy((*ginv)(r, k), s.f[k]);
  return out;
}

}  // namespace opbench
