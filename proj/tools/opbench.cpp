// opbench: scenario runner and per-task front ends.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opbench/harness.hpp"

using namespace opbench;

namespace {

struct Output {
  std::string format = "json";
  std::string out_dir;
  std::string check;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// returns the process exit code contribution: 0 ok, 1 failed checks or mismatch
int deliver(const Scenario& s, const Report& r, const Output& o) {
  const ReportFormat fmt = parse_format(o.format);
  const std::string bytes = emit_report(r, fmt);
  int rc = r.ok() ? 0 : 1;
  if (!o.check.empty() && slurp(o.check) != bytes) {
    std::cerr << s.name << ": output differs from " << o.check << "\n";
    rc = 1;
  }
  std::string dir = o.out_dir;
  if (dir.empty())
    if (const char* env = std::getenv("OPBENCH_OUT_DIR")) dir = env;
  if (dir.empty()) {
    std::cout << bytes;
  } else {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / (s.name + "." + extension(fmt));
    std::ofstream(path, std::ios::binary) << bytes;
    std::cerr << "wrote " << path.string() << "\n";
  }
  return rc;
}

Scenario from_payload(const std::string& name, const std::string& task, const std::string& payload_file,
                      const std::string& mode, Index window, std::uint64_t seed, const std::string& op = {}) {
  Json payload;
  try {
    payload = Json::parse(slurp(payload_file));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("$.payload: ") + e.what());
  }
  if (!op.empty() && payload.is_object()) payload["op"] = op;
  Json doc{{"name", name}, {"mode", mode}, {"window", window}, {"seed", seed}, {"task", task}, {"payload", payload}};
  return parse_scenario(doc);
}

void add_output(CLI::App* cmd, Output& o) {
  cmd->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--out", o.out_dir, "output directory (default: $OPBENCH_OUT_DIR, else stdout)");
  cmd->add_option("--check", o.check, "compare the emitted report with this file");
}

struct Direct {
  std::string payload, mode = "rational", name;
  Index window = 0;
  std::uint64_t seed = 0;
};

void add_direct(CLI::App* cmd, Direct& d) {
  cmd->add_option("--payload", d.payload, "task payload (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--window", d.window, "window size N")->required();
  cmd->add_option("--seed", d.seed, "seed for random draws");
  cmd->add_option("--mode", d.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
  cmd->add_option("--name", d.name, "report name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opbench: finite-stage operator constructions with exact certificates"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios;
  unsigned jobs = 1;
  Output run_out;
  auto* run = app.add_subcommand("run", "run scenario files");
  run->add_option("--scenario", scenarios, "scenario file (repeatable)")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
  add_output(run, run_out);

  Direct d;
  Output direct_out;
  auto* transport = app.add_subcommand("transport", "back-and-forth run");
  auto* triangularize = app.add_subcommand("triangularize", "interleaved triangularization");
  auto* disks = app.add_subcommand("disks", "disk and biorthogonal constructions");
  for (auto* cmd : {transport, triangularize, disks}) {
    add_direct(cmd, d);
    add_output(cmd, direct_out);
  }
  auto* hyper = app.add_subcommand("hypercyclic", "shift operators, witnesses and refutations");
  hyper->require_subcommand(1);
  std::vector<CLI::App*> hyper_cmds;
  for (const char* op : {"build-shift", "witness", "bml", "refute"}) {
    auto* cmd = hyper->add_subcommand(op);
    add_direct(cmd, d);
    add_output(cmd, direct_out);
    hyper_cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!run_out.check.empty() && scenarios.size() != 1) throw Error(ErrorCode::InvalidArgument, "--check needs exactly one scenario");
      std::vector<Scenario> parsed;
      for (const auto& f : scenarios) parsed.push_back(load_scenario(f));
      std::vector<std::future<Report>> pending;
      std::vector<Report> reports(parsed.size());
      for (std::size_t start = 0; start < parsed.size(); start += jobs) {
        const std::size_t end = std::min(parsed.size(), start + jobs);
        pending.clear();
        for (std::size_t i = start; i < end; ++i) pending.push_back(std::async(std::launch::async, run_scenario, std::cref(parsed[i])));
        for (std::size_t i = start; i < end; ++i) reports[i] = pending[i - start].get();
      }
      int rc = 0;
      for (std::size_t i = 0; i < parsed.size(); ++i) rc |= deliver(parsed[i], reports[i], run_out);
      return rc;
    }
    std::string task, op;
    std::string label;
    if (transport->parsed()) task = label = "transport";
    if (triangularize->parsed()) task = label = "triangularize";
    if (disks->parsed()) task = "disk", label = "disks";
    for (auto* cmd : hyper_cmds)
      if (cmd->parsed()) {
        label = cmd->get_name();
        if (label == "refute") task = "refute";
        else task = "hypercyclic", op = label;
      }
    const Scenario s = from_payload(d.name.empty() ? label : d.name, task, d.payload, d.mode, d.window, d.seed, op);
    return deliver(s, run_scenario(s), direct_out);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
