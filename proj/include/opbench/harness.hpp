#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "opbench/operator.hpp"

namespace opbench {

using Json = nlohmann::ordered_json;

inline constexpr const char* kModuleVersions[][2] = {
    {"core-spaces", "1.0.0"},    {"finite-rank-ops", "1.0.0"}, {"triangular-omega", "1.0.0"},
    {"density-tools", "1.0.0"},  {"transport", "1.0.0"},       {"hypercyclic-lab", "1.0.0"},
    {"cli-harness", "1.0.0"},
};

struct Scenario {
  std::string name;
  ScalarKind mode = ScalarKind::Rational;
  Index window = 0;
  std::uint64_t seed = 0;
  std::string task;   // transport | triangularize | disk | hypercyclic | refute
  Json payload;
  std::optional<Json> expected;
  Json source;        // the parsed document minus "expected", hashed into the report
};

/// Throws Error(Schema) naming the offending path, e.g. "$.payload.k".
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::string& path);

struct Report {
  Json doc = Json::object();
  bool ok() const;
};

/// Deterministic: in rational mode the same scenario gives the same bytes.
Report run_scenario(const Scenario& s);

enum class ReportFormat { Json, Csv, Text };
ReportFormat parse_format(const std::string& name);
const char* extension(ReportFormat f);

/// Stable ordering; every scalar in "p/q" text.
std::string emit_report(const Report& r, ReportFormat format);

/// Tables back from the CSV emission ({name: {columns, rows}}).
Json tables_from_csv(const std::string& csv);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// JSON forms shared by the CLI: vectors as {"i": "p/q"} objects (dense
// arrays are accepted on input), operators as {base, terms: [{f, v}]}.
Json to_json(const SparseVector& x);
Json to_json(const CoordFunctional& f);
Json to_json(const FiniteRankOperator& t);
SparseVector vector_from_json(const Json& j, ScalarKind kind, const std::string& path);
CoordFunctional functional_from_json(const Json& j, ScalarKind kind, const std::string& path);
FiniteRankOperator operator_from_json(const Json& j, ScalarKind kind, const std::string& path);

}  // namespace opbench
