#include "opbench/spaces.hpp"

#include "opbench/linalg.hpp"
#include "opbench/lp.hpp"

namespace opbench {

SeminormSpec::SeminormSpec(SeminormKind kind, std::map<Index, Scalar> weights)
    : kind_(kind), weights_(std::move(weights)) {
  for (const auto& [i, w] : weights_) {
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "seminorm coordinate 0");
    if (w.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "seminorm weight at " + std::to_string(i) + " is not positive");
  }
}

SeminormSpec SeminormSpec::uniform(SeminormKind kind, const IndexSet& active, ScalarKind scalars) {
  std::map<Index, Scalar> w;
  for (Index i : active) w.emplace(i, Scalar::one(scalars));
  return SeminormSpec(kind, std::move(w));
}

SeminormSpec SeminormSpec::on_window(SeminormKind kind, Index n, ScalarKind scalars) {
  return uniform(kind, window(n), scalars);
}

IndexSet SeminormSpec::active() const {
  IndexSet s;
  for (const auto& kv : weights_) s.insert(kv.first);
  return s;
}

ScalarKind SeminormSpec::scalar_kind() const {
  return weights_.empty() ? ScalarKind::Rational : weights_.begin()->second.kind();
}

bool SeminormSpec::in_kernel(const SparseVector& x) const {
  for (const auto& kv : x.entries()) {
    if (is_active(kv.first)) return false;
  }
  return true;
}

Scalar eval_seminorm(const SeminormSpec& p, const SparseVector& x) {
  Scalar acc = Scalar::zero(x.kind_or(p.scalar_kind()));
  for (const auto& [i, v] : x.entries()) {
    auto w = p.weights().find(i);
    if (w == p.weights().end()) continue;
    Scalar term = w->second * v.abs();
    if (p.kind() == SeminormKind::Sup) {
      if (acc < term) acc = std::move(term);
    } else {
      acc += term;
    }
  }
  return acc;
}

namespace {

void require_bounded(const SeminormSpec& p, const CoordFunctional& f) {
  for (const auto& kv : f.entries()) {
    if (!p.is_active(kv.first)) {
      throw Error(ErrorCode::NotPBounded, "functional charges inactive coordinate " + std::to_string(kv.first));
    }
  }
}

}  // namespace

Scalar dual_norm(const SeminormSpec& p, const CoordFunctional& f) {
  require_bounded(p, f);
  Scalar acc = Scalar::zero(f.kind_or(p.scalar_kind()));
  for (const auto& [i, v] : f.entries()) {
    Scalar term = v.abs() / p.weights().at(i);
    if (p.kind() == SeminormKind::Sup) {
      acc += term;
    } else if (acc < term) {
      acc = std::move(term);
    }
  }
  return acc;
}

SparseVector dual_norm_maximizer(const SeminormSpec& p, const CoordFunctional& f) {
  require_bounded(p, f);
  SparseVector x;
  if (f.empty()) return x;
  if (p.kind() == SeminormKind::Sup) {
    for (const auto& [i, v] : f.entries()) {
      x.set(i, Scalar::from_int(v.sign(), v.kind()) / p.weights().at(i));
    }
    return x;
  }
  const std::pair<const Index, Scalar>* best = nullptr;
  Scalar best_ratio;
  for (const auto& kv : f.entries()) {
    Scalar r = kv.second.abs() / p.weights().at(kv.first);
    if (!best || best_ratio < r) {
      best = &kv;
      best_ratio = std::move(r);
    }
  }
  x.set(best->first, Scalar::from_int(best->second.sign(), best->second.kind()) / p.weights().at(best->first));
  return x;
}

DiskSpec DiskSpec::from_weights(std::map<Index, Scalar> weights) {
  for (const auto& [i, d] : weights) {
    if (d.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "disk weight at " + std::to_string(i) + " is not positive");
  }
  DiskSpec d;
  d.weights_ = std::move(weights);
  return d;
}

DiskSpec DiskSpec::l1_window(Index n, ScalarKind scalars) {
  std::map<Index, Scalar> w;
  for (Index i = 1; i <= n; ++i) w.emplace(i, Scalar::one(scalars));
  return from_weights(std::move(w));
}

DiskSpec DiskSpec::from_generators(std::vector<SparseVector> generators) {
  DiskSpec d;
  d.generators_ = std::move(generators);
  return d;
}

const std::vector<SparseVector>& DiskSpec::generators() const {
  if (!generators_) throw Error(ErrorCode::InvalidArgument, "disk is in weight form");
  return *generators_;
}

std::optional<Scalar> try_minkowski(const DiskSpec& disk, const SparseVector& u) {
  if (disk.is_weight_form()) {
    Scalar acc = Scalar::zero(u.kind_or(disk.weights().empty() ? ScalarKind::Rational
                                                                 : disk.weights().begin()->second.kind()));
    for (const auto& [i, v] : u.entries()) {
      auto d = disk.weights().find(i);
      if (d == disk.weights().end()) return std::nullopt;
      acc += v.abs() / d->second;
    }
    return acc;
  }

  const auto& gens = disk.generators();
  const ScalarKind kind = u.kind_or(kind_of(gens));
  if (u.empty()) return Scalar::zero(kind);
  std::vector<SparseVector> all = gens;
  all.push_back(u);
  const std::vector<Index> rows = joint_support(all);

  // Variables: a+_n then a-_n, both >= 0; sum_n (a+_n - a-_n) x_n = u.
  const std::size_t g = gens.size();
  Matrix a(rows.size(), 2 * g, kind);
  const Matrix cols = Matrix::from_columns(gens, rows, kind);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t n = 0; n < g; ++n) {
      a(r, n) = cols(r, n);
      a(r, g + n) = -cols(r, n);
    }
  }
  std::vector<Scalar> b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) b[r] = u.get(rows[r], kind);
  const std::vector<Scalar> cost(2 * g, Scalar::one(kind));

  const LpResult res = minimize_standard_form(a, b, cost);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  return res.value;
}

Scalar minkowski(const DiskSpec& disk, const SparseVector& u) {
  auto v = try_minkowski(disk, u);
  if (!v) throw Error(ErrorCode::NotInSpan, "vector " + u.str() + " is outside the span of the disk");
  return *v;
}

namespace {

// The separating functional with the largest |f(u)| at p*(f) = 1: minimize
// p*(g) subject to g(l) = 0 on L and g(u) = 1, then f = g / p*(g).
// Sup: p*(g) = sum |g_i| / w_i over g = g+ - g-.
// L1:  p*(g) = max |g_i| / w_i, as min t with g+_i + g-_i + s_i = w_i t.
std::optional<CoordFunctional> norming_functional(const SeminormSpec& p, const std::vector<Index>& coords,
                                                  const Matrix& constraints, const SparseVector& u, ScalarKind kind) {
  const std::size_t n = coords.size(), m = constraints.rows();
  const bool sup = p.kind() == SeminormKind::Sup;
  const std::size_t vars = sup ? 2 * n : 3 * n + 1;
  const std::size_t rows = sup ? m + 1 : m + 1 + n;
  Matrix a(rows, vars, kind);
  std::vector<Scalar> b(rows, Scalar::zero(kind)), cost(vars, Scalar::zero(kind));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < m; ++r) {
      a(r, c) = constraints(r, c);
      a(r, n + c) = -constraints(r, c);
    }
    const Scalar uc = u.get(coords[c], kind);
    a(m, c) = uc;
    a(m, n + c) = -uc;
  }
  b[m] = Scalar::one(kind);
  if (sup) {
    for (std::size_t c = 0; c < n; ++c) cost[c] = cost[n + c] = Scalar::one(kind) / p.weights().at(coords[c]);
  } else {
    for (std::size_t c = 0; c < n; ++c) {
      a(m + 1 + c, c) = Scalar::one(kind);
      a(m + 1 + c, n + c) = Scalar::one(kind);
      a(m + 1 + c, 2 * n + c) = Scalar::one(kind);
      a(m + 1 + c, 3 * n) = -p.weights().at(coords[c]);
    }
    cost[3 * n] = Scalar::one(kind);
  }
  const LpResult res = minimize_standard_form(a, b, cost);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  CoordFunctional g;
  for (std::size_t c = 0; c < n; ++c) g.set(coords[c], res.x[c] - res.x[n + c]);
  if (g.empty() || pair(g, u, kind).is_zero()) return std::nullopt;
  return g / dual_norm(p, g);
}

}  // namespace

CoordFunctional separating_functional(const SeminormSpec& p, const std::vector<SparseVector>& L,
                                      const SparseVector& u) {
  const IndexSet act = p.active();
  const std::vector<Index> coords(act.begin(), act.end());
  const ScalarKind kind = u.kind_or(p.scalar_kind());

  // Functionals on the active window are coefficient vectors over `coords`;
  // the constraints f(l) = 0 are the rows of the projected L.
  Matrix constraints(L.size(), coords.size(), kind);
  for (std::size_t r = 0; r < L.size(); ++r)
    for (std::size_t c = 0; c < coords.size(); ++c) constraints(r, c) = L[r].get(coords[c], kind);

  if (auto f = norming_functional(p, coords, constraints, u, kind)) return *f;
  for (const auto& candidate : nullspace(constraints)) {
    CoordFunctional f;
    for (std::size_t c = 0; c < coords.size(); ++c) f.set(coords[c], candidate[c]);
    if (pair(f, u, kind).is_zero()) continue;
    return f / dual_norm(p, f);
  }
  throw Error(ErrorCode::NoSeparation, "u + span(L) meets ker p");
}

std::size_t p_rank(const SeminormSpec& p, const std::vector<SparseVector>& xs) {
  std::vector<SparseVector> proj;
  proj.reserve(xs.size());
  const IndexSet act = p.active();
  for (const auto& x : xs) proj.push_back(x.restricted(act));
  return rank_of(proj);
}

bool p_independent(const SeminormSpec& p, const std::vector<SparseVector>& xs) { return p_rank(p, xs) == xs.size(); }

}  // namespace opbench
