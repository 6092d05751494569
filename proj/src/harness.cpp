#include "opbench/harness.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "opbench/density.hpp"
#include "opbench/hypercyclic.hpp"
#include "opbench/linalg.hpp"
#include "opbench/transport.hpp"
#include "opbench/triangular.hpp"

namespace opbench {

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Schema, path + ": " + what);
}

const Json& req(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) schema(path + "." + key, "missing field");
  return j.at(key);
}

std::string text_of(const Json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  schema(path, "expected a scalar");
}

Scalar scalar_from(const Json& v, ScalarKind kind, const std::string& path) {
  const std::string text = text_of(v, path);
  try {
    return Scalar::parse(text, kind);
  } catch (const std::exception&) {
    schema(path, "not a scalar: '" + text + "'");
  }
}

long long int_of(const Json& v, const std::string& path, long long lo = 0) {
  if (!v.is_number_integer() || v.get<long long>() < lo) schema(path, "expected an integer >= " + std::to_string(lo));
  return v.get<long long>();
}

template <class Family>
Family family_from(const Json& j, ScalarKind kind, const std::string& path) {
  Family out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.set(static_cast<Index>(i + 1), scalar_from(j[i], kind, path + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      Index idx = 0;
      try {
        std::size_t used = 0;
        const unsigned long raw = std::stoul(k, &used);
        if (used != k.size() || raw == 0) throw std::invalid_argument(k);
        idx = static_cast<Index>(raw);
      } catch (const std::exception&) {
        schema(path + "." + k, "coordinate keys are positive integers");
      }
      out.set(idx, scalar_from(v, kind, path + "." + k));
    }
  } else {
    schema(path, "expected a dense array or an {index: value} object");
  }
  return out;
}

template <class Family>
Json family_json(const Family& x) {
  Json out = Json::object();
  for (const auto& [i, c] : x.entries()) out[std::to_string(i)] = c.str();
  return out;
}

std::vector<SparseVector> vectors_from(const Json& j, ScalarKind kind, const std::string& path) {
  if (!j.is_array()) schema(path, "expected a list of vectors");
  std::vector<SparseVector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_from_json(j[i], kind, path + "[" + std::to_string(i) + "]"));
  return out;
}

Json vectors_json(const std::vector<SparseVector>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

template <class T>
Json list_json(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) {
    if constexpr (std::is_same_v<T, Scalar>) out.push_back(x.str());
    else out.push_back(x);
  }
  return out;
}

SeminormSpec seminorm_from(const Json& j, ScalarKind kind, const std::string& path) {
  const std::string k = req(j, "kind", path).is_string() ? j.at("kind").get<std::string>() : "";
  SeminormKind sk;
  if (k == "sup") sk = SeminormKind::Sup;
  else if (k == "l1") sk = SeminormKind::L1;
  else schema(path + ".kind", "expected \"sup\" or \"l1\"");
  std::map<Index, Scalar> weights;
  if (j.contains("weights")) {
    for (const auto& [i, c] : family_from<SparseVector>(j.at("weights"), kind, path + ".weights").entries()) weights[i] = c;
  } else {
    const Json& act = req(j, "active", path);
    if (act.is_number_integer()) {
      for (Index i = 1; i <= static_cast<Index>(int_of(act, path + ".active", 1)); ++i) weights[i] = Scalar::one(kind);
    } else if (act.is_array()) {
      for (std::size_t i = 0; i < act.size(); ++i)
        weights[static_cast<Index>(int_of(act[i], path + ".active[" + std::to_string(i) + "]", 1))] = Scalar::one(kind);
    } else {
      schema(path + ".active", "expected a count or a list of coordinates");
    }
  }
  try {
    return SeminormSpec(sk, weights);
  } catch (const Error& e) {
    schema(path, e.what());
  }
}

Json seminorm_json(const SeminormSpec& p) {
  Json w = Json::object();
  for (const auto& [i, c] : p.weights()) w[std::to_string(i)] = c.str();
  return Json{{"kind", p.kind() == SeminormKind::Sup ? "sup" : "l1"}, {"weights", w}};
}

DiskSpec disk_from(const Json& j, ScalarKind kind, const std::string& path) {
  if (j.contains("l1_window")) return DiskSpec::l1_window(static_cast<Index>(int_of(j.at("l1_window"), path + ".l1_window", 1)), kind);
  if (j.contains("weights")) {
    std::map<Index, Scalar> w;
    for (const auto& [i, c] : family_from<SparseVector>(j.at("weights"), kind, path + ".weights").entries()) w[i] = c;
    return DiskSpec::from_weights(w);
  }
  if (j.contains("generators")) return DiskSpec::from_generators(vectors_from(j.at("generators"), kind, path + ".generators"));
  schema(path, "expected one of l1_window, weights, generators");
}

Scalar ratio_in(long long num, long long den, ScalarKind kind) {
  return kind == ScalarKind::Rational ? Scalar::ratio(num, den) : Scalar(static_cast<double>(num) / static_cast<double>(den));
}

// Portable draws: raw mt19937_64 output reduced by modulo.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}
  long long below(long long n) { return static_cast<long long>(gen_() % static_cast<std::uint64_t>(n)); }
  Scalar rational(long long bound, long long max_den, ScalarKind kind) {
    const long long den = 1 + below(max_den);
    const long long num = below(2 * bound * den + 1) - bound * den;
    return ratio_in(num, den, kind);
  }
  SparseVector vector(Index n, long long bound, long long max_den, int density_pct, ScalarKind kind) {
    SparseVector x;
    for (Index i = 1; i <= n; ++i)
      if (below(100) < density_pct) x.set(i, rational(bound, max_den, kind));
    return x;
  }

 private:
  std::mt19937_64 gen_;
};

// A random; B = A with adjacent pairs swapped plus tiny noise.
std::pair<std::vector<SparseVector>, std::vector<SparseVector>> generate_nets(Draw& d, Index window, Index active,
                                                                            std::size_t count, ScalarKind kind) {
  IndexSet act;
  for (Index i = 1; i <= active; ++i) act.insert(i);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<SparseVector> a, b;
    for (std::size_t i = 0; i < count; ++i) {
      SparseVector x = d.vector(window, 2, 4, 60, kind);
      x.set(static_cast<Index>(1 + i % active), d.below(2) ? Scalar::one(kind) : -Scalar::one(kind));
      a.push_back(x);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t partner = (i % 2 == 0) ? std::min(i + 1, count - 1) : i - 1;
      b.push_back(a[partner] + d.vector(window, 1000, 1, 50, kind) * Scalar::pow2(-50, kind));
    }
    if (rank_of(a, act) == count && rank_of(b, act) == count) return {a, b};
  }
  throw Error(ErrorCode::Exhausted, "could not draw independent nets");
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  Json result = Json::object();
  std::vector<Table> tables;
  CheckList checks;
};

void absorb(CheckList& into, const CheckList& from) {
  for (const auto& c : from.checks) into.checks.push_back(c);
}

Outcome run_transport_task(const Scenario& s) {
  const Json& pl = s.payload;
  const ScalarKind kind = s.mode;
  const std::string path = "$.payload";
  const auto k = static_cast<std::size_t>(int_of(req(pl, "k", path), path + ".k"));
  const SeminormSpec p = pl.contains("p") ? seminorm_from(pl.at("p"), kind, path + ".p")
                                          : SeminormSpec::on_window(SeminormKind::Sup, std::max<Index>(1, s.window / 2), kind);
  const DiskSpec disk = pl.contains("disk") ? disk_from(pl.at("disk"), kind, path + ".disk") : DiskSpec::l1_window(s.window, kind);
  const std::string eps_spec = pl.contains("eps") ? text_of(pl.at("eps"), path + ".eps") : "geometric:1/2";
  std::vector<SparseVector> a, b;
  if (pl.contains("a") || pl.contains("b")) {
    a = vectors_from(req(pl, "a", path), kind, path + ".a");
    b = vectors_from(req(pl, "b", path), kind, path + ".b");
  } else if (pl.contains("generate")) {
    const Json& g = pl.at("generate");
    const auto count = g.contains("count") ? static_cast<std::size_t>(int_of(g.at("count"), path + ".generate.count")) : 2 * k;
    Draw d(s.seed);
    std::tie(a, b) = generate_nets(d, s.window, static_cast<Index>(p.active().size()), count, kind);
  } else {
    schema(path + ".a", "missing field (or give generate)");
  }

  Outcome out;
  std::vector<Scalar> eps;
  try {
    eps = parse_eps_schedule(eps_spec, 2 * k, kind);
  } catch (const Error& e) {
    schema(path + ".eps", e.what());
  }
  out.result["p"] = seminorm_json(p);
  out.result["eps"] = list_json(eps);
  TransportState state;
  try {
    state = run_transport(a, b, p, disk, eps, k).state;
    out.checks.add("run", true, std::to_string(k) + " stage(s)");
  } catch (const TransportAborted& e) {
    state = e.partial();
    out.checks.add("run", false, e.what());
  } catch (const Error& e) {
    out.checks.add("run", false, e.what());
    return out;
  }
  const auto rep = verify_transport(state);
  out.result["stages"] = state.stage;
  out.result["n"] = list_json(state.n_idx);
  out.result["m"] = list_json(state.m_idx);
  out.result["budget"] = rep.budget.str();
  out.result["j"] = to_json(state.j());
  Table t{"matching", {"j", "n_j", "m_j", "residual"}, {}};
  for (const auto& r : rep.rows) t.rows.push_back({std::to_string(r.j), std::to_string(r.n), std::to_string(r.m), r.residual.str()});
  out.tables.push_back(t);
  absorb(out.checks, rep.checks);
  return out;
}

Outcome run_triangularize_task(const Scenario& s) {
  const Json& pl = s.payload;
  const ScalarKind kind = s.mode;
  const std::string path = "$.payload";
  const auto k = static_cast<std::size_t>(int_of(req(pl, "k", path), path + ".k"));
  if (s.window < 2 * k + 2) schema("$.window", "triangularize needs window >= 2k + 2");
  std::vector<SparseVector> basis;
  if (pl.contains("basis")) {
    basis = vectors_from(pl.at("basis"), kind, path + ".basis");
  } else if (pl.contains("generate")) {
    Draw d(s.seed);
    while (basis.size() < s.window) {
      basis.push_back(d.vector(s.window, 3, 4, 50, kind));
      if (rank_of(basis) != basis.size()) basis.pop_back();
    }
  } else {
    schema(path + ".basis", "missing field (or give generate)");
  }
  std::vector<CoordFunctional> funcs;
  if (!pl.contains("funcs") || (pl.at("funcs").is_string() && pl.at("funcs") == "standard")) {
    for (Index i = 1; i <= s.window; ++i) funcs.push_back(CoordFunctional::unit(i, kind));
  } else {
    const Json& fj = pl.at("funcs");
    if (!fj.is_array()) schema(path + ".funcs", "expected \"standard\" or a list");
    for (std::size_t i = 0; i < fj.size(); ++i)
      funcs.push_back(functional_from_json(fj[i], kind, path + ".funcs[" + std::to_string(i) + "]"));
  }

  Outcome out;
  TriangularizeState st;
  try {
    st = interleave_triangularize(basis, funcs, k);
    out.checks.add("run", true, std::to_string(k) + " stage(s)");
  } catch (const Error& e) {
    out.checks.add("run", false, e.what());
    return out;
  }
  absorb(out.checks, verify_triangularize(st));
  out.result["alpha"] = list_json(st.alpha);
  out.result["beta"] = list_json(st.beta);
  out.result["minors"] = list_json(st.minors);
  out.result["v"] = vectors_json(st.v);
  Table t{"stages", {"n", "alpha", "beta", "minor"}, {}};
  for (std::size_t i = 0; i < st.size(); ++i)
    t.rows.push_back({std::to_string(i + 1), std::to_string(st.alpha[i]), std::to_string(st.beta[i]), st.minors[i].str()});
  out.tables.push_back(t);
  bool standard = true;
  for (std::size_t i = 0; i < funcs.size(); ++i)
    if (!(funcs[i] == CoordFunctional::unit(static_cast<Index>(i + 1), kind))) standard = false;
  if (standard) {
    const auto omega = build_omega_operator(st);
    out.checks.add("unit lower triangular", is_unit_lower_triangular(shuffled_matrix(omega, st.alpha)));
  }
  return out;
}

Outcome run_disk_task(const Scenario& s) {
  const Json& pl = s.payload;
  const ScalarKind kind = s.mode;
  const std::string path = "$.payload";
  const std::string k = text_of(req(pl, "kind", path), path + ".kind");
  Outcome out;
  if (k == "null_sequence") {
    const auto items = vectors_from(req(pl, "items", path), kind, path + ".items");
    const auto disk = null_sequence_disk(items);
    bool inside = true;
    for (const auto& x : items) {
      const auto v = try_minkowski(disk, x);
      if (!v || *v > Scalar::one(kind)) inside = false;
    }
    out.checks.add("items in K", inside, std::to_string(items.size()) + " item(s)");
    Table t{"probes", {"i", "p_K"}, {}};
    if (pl.contains("probes")) {
      const auto probes = vectors_from(pl.at("probes"), kind, path + ".probes");
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto v = try_minkowski(disk, probes[i]);
        t.rows.push_back({std::to_string(i + 1), v ? v->str() : "not in span"});
      }
    }
    out.tables.push_back(t);
  } else if (k == "common") {
    const auto a = vectors_from(req(pl, "a", path), kind, path + ".a");
    const auto b = vectors_from(req(pl, "b", path), kind, path + ".b");
    EpsilonNet net{s.window, vectors_from(req(pl, "targets", path), kind, path + ".targets"),
                   scalar_from(req(pl, "eps", path), kind, path + ".eps")};
    const SeminormSpec norm = pl.contains("norm") ? seminorm_from(pl.at("norm"), kind, path + ".norm")
                                                  : SeminormSpec::on_window(SeminormKind::Sup, s.window, kind);
    const auto rounds = pl.contains("rounds") ? static_cast<std::size_t>(int_of(pl.at("rounds"), path + ".rounds", 1)) : 1;
    CommonDisk cd;
    try {
      cd = common_disk(a, b, net, norm, rounds);
      out.checks.add("nets", true);
    } catch (const Error& e) {
      out.checks.add("nets", false, e.what());
      return out;
    }
    bool bounded = true;
    for (const auto& e : cd.schedule) {
      const auto v = try_minkowski(cd.disk, e.item);
      if (!v || *v > Scalar::one(kind)) bounded = false;
    }
    out.checks.add("schedule in D", bounded, std::to_string(cd.schedule.size()) + " item(s)");
    out.result["eps_prime"] = cd.eps_prime.str();
    out.result["bound"] = cd.bound.str();
    Json w = Json::object();
    for (const auto& [i, c] : cd.disk.weights()) w[std::to_string(i)] = c.str();
    out.result["disk_weights"] = w;
    Table sched{"schedule", {"m", "role", "source", "scale"}, {}};
    for (const auto& e : cd.schedule)
      sched.rows.push_back({std::to_string(e.m), e.role, std::to_string(e.source + 1), e.scale.str()});
    out.tables.push_back(sched);
    Table rows{"net", {"set", "target", "nearest", "p_D"}, {}};
    for (const auto& r : cd.net_a) rows.rows.push_back({"A", std::to_string(r.target + 1), std::to_string(r.nearest + 1), r.distance.str()});
    for (const auto& r : cd.net_b) rows.rows.push_back({"B", std::to_string(r.target + 1), std::to_string(r.nearest + 1), r.distance.str()});
    out.tables.push_back(rows);
  } else if (k == "biorthogonal") {
    const auto us = vectors_from(req(pl, "us", path), kind, path + ".us");
    const SeminormSpec p = seminorm_from(req(pl, "p", path), kind, path + ".p");
    std::vector<CoordFunctional> fs;
    try {
      fs = biorthogonalize(us, p);
      out.checks.add("run", true);
    } catch (const Error& e) {
      out.checks.add("run", false, e.what());
      return out;
    }
    bool exact = true, supported = true;
    for (std::size_t n = 0; n < fs.size(); ++n) {
      for (std::size_t m = 0; m < us.size(); ++m)
        if (!(pair(fs[n], us[m], kind) == (n == m ? Scalar::one(kind) : Scalar::zero(kind)))) exact = false;
      for (const auto& [i, c] : fs[n].entries())
        if (!p.is_active(i)) supported = false;
    }
    out.checks.add("f_n(u_m) = delta_nm", exact);
    out.checks.add("supported in active(p)", supported);
    Json fj = Json::array();
    for (const auto& f : fs) fj.push_back(to_json(f));
    out.result["f"] = fj;
  } else {
    schema(path + ".kind", "expected null_sequence, common or biorthogonal");
  }
  return out;
}

std::vector<SparseVector> standard_basis(Index n, ScalarKind kind) {
  std::vector<SparseVector> out;
  for (Index i = 1; i <= n; ++i) out.push_back(SparseVector::unit(i, kind));
  return out;
}

FiniteRankOperator shift_or_operator(const Json& pl, const Scenario& s, const std::string& path) {
  if (pl.contains("operator")) return operator_from_json(pl.at("operator"), s.mode, path + ".operator");
  const auto n = static_cast<Index>(pl.contains("shift") ? int_of(pl.at("shift"), path + ".shift", 1) : s.window);
  return build_shift_operator(standard_basis(n, s.mode), SeminormSpec::on_window(SeminormKind::Sup, n, s.mode),
                              DiskSpec::l1_window(n, s.mode))
      .t();
}

Outcome run_hypercyclic_task(const Scenario& s) {
  const Json& pl = s.payload;
  const ScalarKind kind = s.mode;
  const std::string path = "$.payload";
  const std::string op = text_of(req(pl, "op", path), path + ".op");
  Outcome out;
  if (op == "build-shift") {
    std::vector<SparseVector> us;
    if (pl.contains("us")) us = vectors_from(pl.at("us"), kind, path + ".us");
    else us = standard_basis(s.window, kind);
    const SeminormSpec p = pl.contains("p") ? seminorm_from(pl.at("p"), kind, path + ".p")
                                            : SeminormSpec::on_window(SeminormKind::Sup, s.window, kind);
    const DiskSpec disk = pl.contains("disk") ? disk_from(pl.at("disk"), kind, path + ".disk") : DiskSpec::l1_window(s.window, kind);
    const auto count = pl.contains("samples") ? int_of(pl.at("samples"), path + ".samples") : 0;
    Draw d(s.seed);
    std::vector<SparseVector> samples;
    for (long long i = 0; i < count; ++i) samples.push_back(d.vector(s.window, 5, 7, 80, kind));
    ShiftOperatorSpec spec;
    try {
      spec = build_shift_operator(us, p, disk);
      out.checks.add("run", true);
    } catch (const Error& e) {
      out.checks.add("run", false, e.what());
      return out;
    }
    absorb(out.checks, verify_shift(spec, p, disk, samples));
    out.result["weights"] = list_json(spec.weights);
    Json fj = Json::array();
    for (const auto& f : spec.fs) fj.push_back(to_json(f));
    out.result["f"] = fj;
    out.result["s"] = to_json(spec.s);
    Table t{"weights", {"n", "w_n"}, {}};
    for (std::size_t n = 0; n < spec.weights.size(); ++n) t.rows.push_back({std::to_string(n + 1), spec.weights[n].str()});
    out.tables.push_back(t);
  } else if (op == "witness") {
    const auto t = shift_or_operator(pl, s, path);
    const SeminormSpec p = pl.contains("p") ? seminorm_from(pl.at("p"), kind, path + ".p")
                                            : SeminormSpec::on_window(
                                                  SeminormKind::Sup,
                                                  static_cast<Index>(int_of(req(pl, "observe", path), path + ".observe", 1)), kind);
    const auto x = vector_from_json(req(pl, "x", path), kind, path + ".x");
    const auto y = vector_from_json(req(pl, "y", path), kind, path + ".y");
    const Scalar eps = pl.contains("eps") ? scalar_from(pl.at("eps"), kind, path + ".eps") : ratio_in(1, 1000, kind);
    const auto max_n = static_cast<std::size_t>(pl.contains("max_n") ? int_of(pl.at("max_n"), path + ".max_n") : 64);
    Table table{"witness", {"n", "residual_x", "residual_y"}, {}};
    auto fill = [&](const std::vector<WitnessRow>& rows) {
      for (const auto& r : rows)
        table.rows.push_back({std::to_string(r.n), r.residual_x.str(), r.residual_y.str()});
    };
    try {
      const auto w = transitivity_witness(t, p, x, y, eps, max_n, s.window);
      fill(w.trail);
      out.result["n"] = w.n;
      out.result["z"] = to_json(w.z);
      out.result["residual_x"] = w.residual_x.str();
      out.result["residual_y"] = w.residual_y.str();
      // independent re-evaluation
      SparseVector tz = w.z;
      for (std::size_t i = 0; i < w.n; ++i) tz = t(tz);
      const bool ok = eval_seminorm(p, w.z - x) < eps && eval_seminorm(p, tz - y) < eps;
      out.checks.add("witness found", true, "n=" + std::to_string(w.n));
      out.checks.add("residuals below eps", ok);
    } catch (const WitnessNotFound& e) {
      fill(e.trail());
      out.result["best_n"] = e.best_n();
      out.result["best_residual"] = e.best_residual().str();
      out.checks.add("witness found", false, e.what());
    }
    out.tables.push_back(table);
  } else if (op == "bml") {
    const auto t = shift_or_operator(pl, s, path);
    const auto depth = static_cast<std::size_t>(int_of(req(pl, "depth", path), path + ".depth"));
    const auto rep = bml_premise_check(t, s.window, depth);
    out.result["span_dim"] = rep.span_dim;
    Table table{"levels", {"n", "range_dim", "kernel_dim", "meet_dim"}, {}};
    for (const auto& l : rep.levels)
      table.rows.push_back({std::to_string(l.n), std::to_string(l.range_dim), std::to_string(l.kernel_dim), std::to_string(l.meet_dim)});
    out.tables.push_back(table);
    out.checks.add("premise spans the window", rep.full(), std::to_string(rep.span_dim) + "/" + std::to_string(s.window));
  } else {
    schema(path + ".op", "expected build-shift, witness or bml");
  }
  return out;
}

Outcome run_refute_task(const Scenario& s) {
  const Json& pl = s.payload;
  const ScalarKind kind = s.mode;
  const std::string path = "$.payload";
  std::vector<SeminormSpec> family;
  const Json& fam = req(pl, "family", path);
  if (fam.is_object() && fam.contains("prefix_sup")) {
    const auto n = int_of(fam.at("prefix_sup"), path + ".family.prefix_sup", 1);
    for (long long i = 1; i <= n; ++i) family.push_back(SeminormSpec::on_window(SeminormKind::Sup, static_cast<Index>(i), kind));
  } else if (fam.is_array()) {
    for (std::size_t i = 0; i < fam.size(); ++i) family.push_back(seminorm_from(fam[i], kind, path + ".family[" + std::to_string(i) + "]"));
  } else {
    schema(path + ".family", "expected a list of seminorms or {prefix_sup: n}");
  }
  const auto b = pl.contains("b") ? vectors_from(pl.at("b"), kind, path + ".b") : std::vector<SparseVector>{};
  const Json& opj = req(pl, "operator", path);
  const FiniteRankOperator t = opj.is_string() && opj == "omega" ? omega_shift_operator(s.window)
                                                                 : operator_from_json(opj, kind, path + ".operator");
  const auto x = vector_from_json(req(pl, "x", path), kind, path + ".x");
  const auto horizon = static_cast<std::size_t>(int_of(req(pl, "horizon", path), path + ".horizon", 1));

  Outcome out;
  NonOrbitSet set;
  try {
    set = build_nonorbit_set(family, b);
    out.checks.add("A independent", true, std::to_string(set.a.size()) + " element(s)");
  } catch (const Error& e) {
    out.checks.add("A independent", false, e.what());
    return out;
  }
  const auto r = refute_orbit(t, x, set, horizon);
  out.result["c"] = vectors_json(set.c);
  out.result["inside_a"] = r.inside_a;
  out.result["exit_step"] = r.exit_step ? Json(*r.exit_step) : Json(nullptr);
  out.result["m"] = list_json(r.m);
  out.result["p1_series"] = r.p1_series.str();
  out.result["covers_a"] = r.covers_a;
  out.result["orbit_p1_rank"] = r.orbit_p1_rank;
  out.result["flags"] = list_json(r.flags);
  Table mem{"orbit", {"n", "member", "p_1"}, {}};
  for (std::size_t n = 0; n < r.orbit.size(); ++n)
    mem.rows.push_back({std::to_string(n), r.membership[n], eval_seminorm(family.front(), r.orbit[n]).str()});
  out.tables.push_back(mem);
  Table cert{"certificates", {"k", "sum", "nonzero"}, {}};
  for (const auto& c : r.certificates) cert.rows.push_back({std::to_string(c.k), c.sum.str(), std::to_string(c.nonzero)});
  out.tables.push_back(cert);
  // every p_k series over M has finitely many nonzero terms, and the p_1 series counts M
  bool finite = r.p1_series == Scalar::from_int(static_cast<long long>(r.m.size()), kind);
  out.checks.add("p_1 series counts M", finite, std::to_string(r.m.size()));
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv_line(const Json& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i].is_string() ? cells[i].get<std::string>() : cells[i].dump());
  }
  return out + "\n";
}

}  // namespace

Json to_json(const SparseVector& x) { return family_json(x); }
Json to_json(const CoordFunctional& f) { return family_json(f); }

Json to_json(const FiniteRankOperator& t) {
  Json terms = Json::array();
  for (const auto& term : t.terms()) terms.push_back(Json{{"f", to_json(term.f)}, {"v", to_json(term.v)}});
  return Json{{"base", t.base() == OperatorBase::Identity ? "identity" : "zero"}, {"terms", terms}};
}

SparseVector vector_from_json(const Json& j, ScalarKind kind, const std::string& path) {
  return family_from<SparseVector>(j, kind, path);
}

CoordFunctional functional_from_json(const Json& j, ScalarKind kind, const std::string& path) {
  return family_from<CoordFunctional>(j, kind, path);
}

FiniteRankOperator operator_from_json(const Json& j, ScalarKind kind, const std::string& path) {
  const std::string base = text_of(req(j, "base", path), path + ".base");
  if (base != "identity" && base != "zero") schema(path + ".base", "expected identity or zero");
  FiniteRankOperator t(base == "identity" ? OperatorBase::Identity : OperatorBase::Zero, {});
  const Json& terms = req(j, "terms", path);
  if (!terms.is_array()) schema(path + ".terms", "expected a list");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + ".terms[" + std::to_string(i) + "]";
    t.add_term(functional_from_json(req(terms[i], "f", tp), kind, tp + ".f"), vector_from_json(req(terms[i], "v", tp), kind, tp + ".v"));
  }
  return t;
}

Scenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) schema("$", "scenario must be an object");
  Scenario s;
  s.name = text_of(req(doc, "name", "$"), "$.name");
  const std::string mode = doc.contains("mode") ? text_of(doc.at("mode"), "$.mode") : "rational";
  if (mode == "rational") s.mode = ScalarKind::Rational;
  else if (mode == "float") s.mode = ScalarKind::Float;
  else schema("$.mode", "expected rational or float");
  s.window = static_cast<Index>(int_of(req(doc, "window", "$"), "$.window", 1));
  s.seed = doc.contains("seed") ? static_cast<std::uint64_t>(int_of(doc.at("seed"), "$.seed")) : 0;
  s.task = text_of(req(doc, "task", "$"), "$.task");
  if (s.task != "transport" && s.task != "triangularize" && s.task != "disk" && s.task != "hypercyclic" && s.task != "refute")
    schema("$.task", "unknown task '" + s.task + "'");
  s.payload = req(doc, "payload", "$");
  if (!s.payload.is_object()) schema("$.payload", "expected an object");
  if (doc.contains("expected")) s.expected = doc.at("expected");
  s.source = doc;
  s.source.erase("expected");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    schema("$", e.what());
  }
  return parse_scenario(doc);
}

bool Report::ok() const {
  if (!doc.contains("checks")) return true;
  for (const auto& c : doc.at("checks"))
    if (!c.at("ok").get<bool>()) return false;
  return true;
}

Report run_scenario(const Scenario& s) {
  Outcome out;
  if (s.task == "transport") out = run_transport_task(s);
  else if (s.task == "triangularize") out = run_triangularize_task(s);
  else if (s.task == "disk") out = run_disk_task(s);
  else if (s.task == "hypercyclic") out = run_hypercyclic_task(s);
  else if (s.task == "refute") out = run_refute_task(s);
  else schema("$.task", "unknown task '" + s.task + "'");

  Report r;
  Json& d = r.doc;
  d["scenario"] = s.name;
  d["task"] = s.task;
  d["mode"] = s.mode == ScalarKind::Rational ? "rational" : "float";
  d["window"] = s.window;
  d["seed"] = s.seed;
  d["scenario_hash"] = fnv1a_hex(s.source.dump());
  Json versions = Json::object();
  for (const auto& [module, version] : kModuleVersions) versions[module] = version;
  d["versions"] = versions;
  d["result"] = out.result;
  Json tables = Json::object();
  for (const auto& t : out.tables) {
    Json rows = Json::array();
    for (const auto& row : t.rows) rows.push_back(row);
    tables[t.name] = Json{{"columns", t.columns}, {"rows", rows}};
  }
  d["tables"] = tables;
  Json checks = Json::array();
  for (const auto& c : out.checks.checks) checks.push_back(Json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  d["checks"] = checks;
  if (s.expected) {
    const bool same = *s.expected == d;
    d["checks"].push_back(Json{{"name", "regression"}, {"ok", same}, {"detail", same ? "identical" : "differs from stored report"}});
  }
  return r;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "text") return ReportFormat::Text;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + name + "'");
}

const char* extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Text: return "txt";
  }
  return "out";
}

std::string emit_report(const Report& r, ReportFormat format) {
  const Json& d = r.doc;
  if (format == ReportFormat::Json) return d.dump(2) + "\n";
  if (d.empty()) return "";
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    for (const char* key : {"scenario", "task", "mode", "window", "seed", "scenario_hash"})
      if (d.contains(key)) out << "# " << csv_line(Json::array({key, d.at(key)}));
    if (d.contains("checks")) {
      out << "# checks\n" << csv_line(Json::array({"name", "ok", "detail"}));
      for (const auto& c : d.at("checks")) out << csv_line(Json::array({c.at("name"), c.at("ok").get<bool>() ? "true" : "false", c.at("detail")}));
    }
    if (d.contains("tables"))
      for (const auto& [name, t] : d.at("tables").items()) {
        out << "# table," << csv_cell(name) << "\n" << csv_line(t.at("columns"));
        for (const auto& row : t.at("rows")) out << csv_line(row);
      }
    return out.str();
  }
  out << "scenario " << d.value("scenario", "") << " (" << d.value("task", "") << ", " << d.value("mode", "")
      << ", window " << d.value("window", 0) << ", seed " << d.value("seed", 0) << ")\n";
  if (d.contains("scenario_hash")) out << "hash " << d.at("scenario_hash").get<std::string>() << "\n";
  if (d.contains("checks"))
    for (const auto& c : d.at("checks")) {
      out << (c.at("ok").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>();
      if (!c.at("detail").get<std::string>().empty()) out << "  " << c.at("detail").get<std::string>();
      out << "\n";
    }
  if (d.contains("result") && !d.at("result").empty()) out << "result " << d.at("result").dump() << "\n";
  if (d.contains("tables"))
    for (const auto& [name, t] : d.at("tables").items()) {
      out << "[" << name << "]\n";
      std::vector<std::size_t> width;
      for (const auto& c : t.at("columns")) width.push_back(c.get<std::string>().size());
      for (const auto& row : t.at("rows"))
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].get<std::string>().size());
      auto line = [&](const Json& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const std::string c = cells[i].get<std::string>();
          out << c;
          if (i + 1 < cells.size()) out << std::string(width[i] - c.size() + 2, ' ');
        }
        out << "\n";
      };
      line(t.at("columns"));
      for (const auto& row : t.at("rows")) line(row);
    }
  return out.str();
}

Json tables_from_csv(const std::string& csv) {
  Json tables = Json::object();
  std::istringstream in(csv);
  std::string line;
  std::string current;
  bool want_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# table,", 0) == 0) {
      current = csv_split(line.substr(2))[1];
      tables[current] = Json{{"columns", Json::array()}, {"rows", Json::array()}};
      want_header = true;
      continue;
    }
    if (line.rfind("#", 0) == 0) {
      current.clear();
      continue;
    }
    if (current.empty()) continue;
    const auto cells = csv_split(line);
    if (want_header) {
      tables[current]["columns"] = cells;
      want_header = false;
    } else {
      tables[current]["rows"].push_back(cells);
    }
  }
  return tables;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace opbench
