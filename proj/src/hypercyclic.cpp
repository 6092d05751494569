#include "opbench/hypercyclic.hpp"

#include <algorithm>

#include "opbench/density.hpp"
#include "opbench/linalg.hpp"

namespace opbench {

namespace {

ScalarKind kind_of_op(const FiniteRankOperator& t) {
  for (const auto& term : t.terms()) {
    if (!term.v.empty()) return term.v.kind_or(ScalarKind::Rational);
    if (!term.f.empty()) return term.f.kind_or(ScalarKind::Rational);
  }
  return ScalarKind::Rational;
}

SparseVector from_coeffs(const std::vector<SparseVector>& basis, const std::vector<Scalar>& c) {
  SparseVector out;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (!c[i].is_zero()) out.axpy(c[i], basis[i]);
  return out;
}

// Independent subset spanning the same space (pivot columns).
std::vector<SparseVector> column_basis(const std::vector<SparseVector>& vs, ScalarKind kind) {
  const auto coords = joint_support(vs);
  if (coords.empty()) return {};
  const auto ech = row_reduce(Matrix::from_columns(vs, coords, kind));
  std::vector<SparseVector> out;
  for (std::size_t c : ech.pivots) out.push_back(vs[c]);
  return out;
}

// Basis of {sum a_j x_j : sum a_j vs_j = 0} for a list of domain vectors xs.
std::vector<SparseVector> kernel_basis(const std::vector<SparseVector>& xs, const std::vector<SparseVector>& images,
                                       ScalarKind kind) {
  const auto coords = joint_support(images);
  if (coords.empty()) return xs;
  std::vector<SparseVector> out;
  for (const auto& c : nullspace(Matrix::from_columns(images, coords, kind))) out.push_back(from_coeffs(xs, c));
  return out;
}

std::vector<SparseVector> meet(const std::vector<SparseVector>& k, const std::vector<SparseVector>& r,
                               ScalarKind kind) {
  if (k.empty() || r.empty()) return {};
  std::vector<SparseVector> cols = k;
  for (const auto& x : r) cols.push_back(-x);
  const auto coords = joint_support(cols);
  std::vector<SparseVector> out;
  for (const auto& c : nullspace(Matrix::from_columns(cols, coords, kind))) {
    const std::vector<Scalar> head(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k.size()));
    SparseVector x = from_coeffs(k, head);
    if (!x.empty()) out.push_back(std::move(x));
  }
  return column_basis(out, kind);
}

std::optional<std::size_t> find_in(const std::vector<SparseVector>& xs, const SparseVector& x) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] == x) return i;
  return std::nullopt;
}

}  // namespace

ShiftOperatorSpec build_shift_operator(const std::vector<SparseVector>& us, const SeminormSpec& p,
                                       const DiskSpec& disk) {
  ShiftOperatorSpec spec;
  spec.us = us;
  spec.fs = biorthogonalize(us, p);
  const ScalarKind kind = kind_of(us, p.scalar_kind());
  for (std::size_t n = 1; n < us.size(); ++n) {
    const Scalar w = Scalar::pow2(-static_cast<int>(n), kind) / (minkowski(disk, us[n - 1]) * dual_norm(p, spec.fs[n]));
    spec.weights.push_back(w);
    spec.s.add_term(spec.fs[n] * w, us[n - 1]);
  }
  return spec;
}

CheckList verify_shift(const ShiftOperatorSpec& spec, const SeminormSpec& p, const DiskSpec& disk,
                       const std::vector<SparseVector>& samples) {
  CheckList c;
  const auto& us = spec.us;
  const std::size_t n = us.size();
  const ScalarKind kind = kind_of(us, p.scalar_kind());

  bool chain = n == 0 || spec.s(us[0]).empty();
  std::string chain_detail;
  for (std::size_t k = 2; k <= n; ++k)
    if (!(spec.s(us[k - 1]) == us[k - 2] * spec.weights[k - 2])) {
      if (chain) chain_detail = "k=" + std::to_string(k);
      chain = false;
    }
  c.add("chain", chain, chain_detail);

  bool nil = true;
  for (std::size_t k = 1; k <= n; ++k) {
    SparseVector x = us[k - 1];
    for (std::size_t j = 0; j < k; ++j) x = spec.s(x);
    if (!x.empty()) nil = false;
  }
  c.add("S^n u_n = 0", nil);

  std::vector<SparseVector> images;
  bool closed = true;
  for (const auto& u : us) {
    images.push_back(spec.s(u));
    if (!in_span(us, images.back())) closed = false;
  }
  const std::size_t r = rank_of(images);
  c.add("prefix rank", closed && r + 1 == n, std::to_string(r));

  bool kernel = true;
  Index top = spec.s.extent();
  for (const auto& u : us) top = std::max(top, u.max_index());
  for (Index i = 1; i <= top; ++i)
    if (!p.is_active(i) && !spec.s(SparseVector::unit(i, kind)).empty()) kernel = false;
  c.add("kernel fixed", kernel);

  std::vector<SparseVector> probes = samples;
  for (const auto& f : spec.fs) probes.push_back(dual_norm_maximizer(p, f));
  bool cont = true;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto pd = try_minkowski(disk, spec.s(probes[i]));
    if (!pd || *pd > eval_seminorm(p, probes[i])) {
      if (cont) worst = i;
      cont = false;
    }
  }
  c.add("p_D(Sx) <= p(x)", cont, cont ? std::to_string(probes.size()) + " probes" : "probe " + std::to_string(worst));
  return c;
}

BmlReport bml_premise_check(const FiniteRankOperator& t, Index window, std::size_t depth) {
  const FiniteRankOperator s = t.perturbation();
  const ScalarKind kind = kind_of_op(t);
  BmlReport rep;
  rep.window = window;
  rep.depth = depth;
  const Index domain = window + static_cast<Index>(depth);
  std::vector<SparseVector> xs, powers;
  for (Index j = 1; j <= domain; ++j) {
    xs.push_back(SparseVector::unit(j, kind));
    powers.push_back(xs.back());
  }
  const std::vector<SparseVector> window_xs(xs.begin(), xs.begin() + window);
  std::vector<SparseVector> gathered;
  for (std::size_t n = 1; n <= depth; ++n) {
    for (auto& v : powers) v = s(v);
    const auto range = column_basis(powers, kind);
    const std::vector<SparseVector> window_images(powers.begin(), powers.begin() + window);
    const auto kernel = kernel_basis(window_xs, window_images, kind);
    const auto both = meet(kernel, range, kind);
    rep.levels.push_back({n, range.size(), kernel.size(), both.size()});
    gathered.insert(gathered.end(), both.begin(), both.end());
  }
  rep.span_dim = gathered.empty() ? 0 : rank_of(gathered);
  return rep;
}

Witness transitivity_witness(const FiniteRankOperator& t, const SeminormSpec& p, const SparseVector& x,
                             const SparseVector& y, const Scalar& eps, std::size_t max_n, Index window) {
  const IndexSet active = p.active();
  const std::vector<Index> obs(active.begin(), active.end());
  if (obs.empty() || obs.size() > window) throw Error(ErrorCode::InvalidArgument, "observation set does not fit the window");
  const ScalarKind kind = x.kind_or(p.scalar_kind());
  std::vector<Index> hidden;
  for (Index h = window - static_cast<Index>(obs.size()) + 1; h <= window; ++h) hidden.push_back(h);

  SparseVector tx = x;
  std::vector<SparseVector> cols;
  for (Index h : hidden) cols.push_back(SparseVector::unit(h, kind));

  std::vector<WitnessRow> trail;
  std::size_t best_n = 0;
  std::optional<Scalar> best;
  auto consider = [&](std::size_t n, const Scalar& rx, const Scalar& ry) {
    const Scalar worst = max(rx, ry);
    if (!best || worst < *best) {
      best = worst;
      best_n = n;
    }
    return rx < eps && ry < eps;
  };

  for (std::size_t n = 0; n <= max_n; ++n) {
    const Scalar plain = eval_seminorm(p, tx - y);
    if (consider(n, Scalar::zero(kind), plain)) {
      trail.push_back({n, Scalar::zero(kind), plain, false});
      return {n, x, Scalar::zero(kind), plain, std::move(trail)};
    }
    const SparseVector gap = y - tx;
    std::vector<Scalar> rhs;
    for (Index i : obs) rhs.push_back(gap.get(i, kind));
    const auto c = solve(Matrix::from_columns(cols, obs, kind), rhs);
    if (!c) {
      trail.push_back({n, Scalar::zero(kind), plain, false});
    } else {
      SparseVector z = x, tz = tx;
      for (std::size_t j = 0; j < hidden.size(); ++j) {
        if ((*c)[j].is_zero()) continue;
        z.axpy((*c)[j], SparseVector::unit(hidden[j], kind));
        tz.axpy((*c)[j], cols[j]);
      }
      const Scalar rx = eval_seminorm(p, z - x), ry = eval_seminorm(p, tz - y);
      trail.push_back({n, rx, ry, true});
      if (consider(n, rx, ry)) return {n, z, rx, ry, std::move(trail)};
    }
    if (n == max_n) break;
    tx = t(tx);
    for (auto& v : cols) v = t(v);
  }
  throw WitnessNotFound(best_n, *best, std::move(trail));
}

FiniteRankOperator omega_shift_operator(Index window) {
  FiniteRankOperator s = FiniteRankOperator::zero();
  for (Index i = 1; i < window; ++i) s.add_term(CoordFunctional::unit(i + 1), SparseVector::unit(i));
  return s;
}

std::vector<SparseVector> omega_shift_demo(Index window, const SparseVector& x0, std::size_t horizon) {
  IndexSet keep;
  for (Index i = 1; i <= window; ++i) keep.insert(i);
  return orbit(omega_shift_operator(window), x0.restricted(keep), horizon);
}

NonOrbitSet build_nonorbit_set(const std::vector<SeminormSpec>& family, const std::vector<SparseVector>& b) {
  if (family.empty()) throw Error(ErrorCode::InvalidArgument, "empty seminorm family");
  NonOrbitSet out;
  out.family = family;
  out.b = b;
  const ScalarKind kind = family.front().scalar_kind();
  for (std::size_t n = 0; n + 1 < family.size(); ++n) {
    const IndexSet lo = family[n].active(), hi = family[n + 1].active();
    if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end()))
      throw Error(ErrorCode::NotNested, "active(p_" + std::to_string(n + 2) + ") does not contain active(p_" +
                                            std::to_string(n + 1) + ")");
    std::optional<Index> gap;
    for (Index i : hi)
      if (!lo.count(i)) {
        gap = i;
        break;
      }
    if (!gap) throw Error(ErrorCode::NotNested, "p_" + std::to_string(n + 1) + " and p_" + std::to_string(n + 2) + " have the same kernel");
    out.c.push_back(SparseVector::unit(*gap, kind));
  }
  if (!p_independent(family.front(), b)) throw Error(ErrorCode::InvalidArgument, "B is not p_1-independent");
  out.a = out.b;
  out.a.insert(out.a.end(), out.c.begin(), out.c.end());
  if (!out.a.empty() && rank_of(out.a) != out.a.size())
    throw Error(ErrorCode::InvalidArgument, "A = B u C is linearly dependent");
  return out;
}

RefuteReport refute_orbit(const FiniteRankOperator& t, const SparseVector& x, const NonOrbitSet& set,
                          std::size_t horizon) {
  RefuteReport r;
  const SeminormSpec& p1 = set.family.front();
  const ScalarKind kind = p1.scalar_kind();
  r.orbit = orbit(t, x, horizon);
  std::vector<char> side(r.orbit.size(), '-');
  std::vector<bool> seen(set.a.size(), false);
  for (std::size_t n = 0; n < r.orbit.size(); ++n) {
    std::string label = "-";
    if (auto i = find_in(set.b, r.orbit[n])) {
      label = "B" + std::to_string(*i + 1);
      side[n] = 'B';
      seen[*i] = true;
    } else if (auto j = find_in(set.c, r.orbit[n])) {
      label = "C" + std::to_string(*j + 1);
      side[n] = 'C';
      seen[set.b.size() + *j] = true;
    } else if (r.inside_a) {
      r.inside_a = false;
      r.exit_step = n;
    }
    r.membership.push_back(label);
  }
  for (std::size_t n = 0; n + 1 < r.orbit.size(); ++n)
    if (side[n] == 'C' && side[n + 1] == 'B') r.m.push_back(n);

  r.p1_series = Scalar::zero(kind);
  for (std::size_t k = 0; k < set.family.size(); ++k) r.certificates.push_back({k + 1, Scalar::zero(kind), 0});
  for (std::size_t n : r.m) {
    const Scalar denom = eval_seminorm(p1, r.orbit[n + 1]);
    r.p1_series += denom / denom;
    for (std::size_t k = 0; k < set.family.size(); ++k) {
      const Scalar num = eval_seminorm(set.family[k], r.orbit[n]);
      r.certificates[k].sum += num / denom;
      if (!num.is_zero()) ++r.certificates[k].nonzero;
    }
  }
  r.covers_a = std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  r.orbit_p1_rank = p_rank(p1, r.orbit);
  if (!r.covers_a) r.flags.push_back("orbit not dense surrogate");
  if (!r.inside_a) r.flags.push_back("orbit leaves A at step " + std::to_string(*r.exit_step));
  if (!r.m.empty()) r.flags.push_back("M has " + std::to_string(r.m.size()) + " element(s) in the prefix");
  return r;
}

}  // namespace opbench
