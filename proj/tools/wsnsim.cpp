// wsnsim: command-line front end for the WSN clustering simulator.
//
//   wsnsim run     --config <path> [--seed N] [--out DIR]
//   wsnsim compare --config <path> --out DIR
//   wsnsim verify  --config <path> [--out DIR]
//   wsnsim replay  --trace <path> [--out DIR]
//
// Exit codes: 0 ok, 1 usage, 2 config error, 3 runtime error,
// 4 trend check failed, 5 replayed trace violates an invariant.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "wsn/config_io.hpp"
#include "wsn/engine.hpp"
#include "wsn/harness.hpp"
#include "wsn/replay.hpp"
#include "wsn/trace.hpp"

namespace fs = std::filesystem;
using namespace wsn;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kRuntime = 3,
  kTrend = 4,
  kViolation = 5,
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
  out << text;
}

void print_summary(const RunReport& r) {
  fmt::print("{} seed={} nodes={}\n", r.protocol, r.seed, r.node_count);
  for (const auto& [name, v] : scalar_metrics(r)) fmt::print("  {:<28} {}\n", name, v);
  fmt::print("  {:<28} {:016x}\n", "trace_hash", r.trace_hash);
}

int cmd_run(const fs::path& config, std::optional<std::uint64_t> seed, std::optional<fs::path> out) {
  const Scenario s = parse_config(config);
  SimConfig c = s.base;
  if (seed) c.rng_seed = *seed;
  c.record_trace = out.has_value();
  const RunResult result = simulate(c);
  print_summary(result.report);
  if (out) {
    fs::create_directories(*out);
    write_text(*out / "report.json", to_json(result.report).dump(2) + "\n");
    write_text(*out / "run.csv", csv_header() + "\n" + csv_row(result.report) + "\n");
    std::ofstream trace_out(*out / "trace.jsonl", std::ios::binary);
    trace::write(trace_out, config_to_json(c), result.trace);
  }
  return kOk;
}

void print_trends(const std::vector<TrendVerdict>& trends) {
  for (const TrendVerdict& t : trends)
    fmt::print("{} {:<40} {} vs {}\n", t.pass ? "PASS" : "FAIL", t.claim, t.lhs, t.rhs);
}

int cmd_compare(const fs::path& config, const std::optional<fs::path>& out, bool check) {
  const Scenario s = parse_config(config);
  const ComparisonReport report = run_scenario(s);
  for (const auto& [proto, m] : report.aggregates) {
    fmt::print("{:<4} pdr={:.2f}% delay={:.4f}s fnd={} hnd={} heads={:.2f}\n", proto,
               m.at("pdr_percent").mean, m.at("mean_delay_s").mean, m.at("lifetime_fnd_s").mean,
               m.at("lifetime_hnd_s").mean, m.at("avg_cluster_heads").mean);
  }
  if (out) export_results(report, *out);
  if (!check) return kOk;
  const std::vector<TrendVerdict> trends = verify_trends(report);
  print_trends(trends);
  for (const TrendVerdict& t : trends)
    if (!t.pass) return kTrend;
  return kOk;
}

int cmd_replay(const fs::path& path, const std::optional<fs::path>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--trace", "cannot open " + path.string());
  const trace::TraceFile file = trace::read(in);
  const ReplayResult r = replay(file);
  print_summary(r.report);
  fmt::print("  {:<28} {}\n", "records", r.records);
  for (const Violation& v : r.violations)
    fmt::print("VIOLATION {} t={}us {}\n", v.invariant, v.t_us, v.detail);
  if (out) {
    fs::create_directories(*out);
    write_text(*out / "replayed_report.json", to_json(r.report).dump(2) + "\n");
  }
  return r.ok() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic WSN clustering simulator (LEACH, FZ, OFZ)"};
  app.require_subcommand(1);
  app.footer(fmt::format("Set {} to cap the number of concurrent runs.", kJobsEnv));

  std::string config, trace_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Single run; writes report, row and trace under --out");
  run->add_option("--config", config, "Scenario config (JSON)")->required();
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--out", out_dir, "Output directory");

  auto* compare = app.add_subcommand("compare", "Every protocol x seed; exports tables and series");
  compare->add_option("--config", config, "Scenario config (JSON)")->required();
  compare->add_option("--out", out_dir, "Output directory")->required();

  auto* verify = app.add_subcommand("verify", "compare plus the comparative trend checks");
  verify->add_option("--config", config, "Scenario config (JSON)")->required();
  verify->add_option("--out", out_dir, "Optional output directory");

  auto* replay_cmd = app.add_subcommand("replay", "Re-derive tables and metrics from a trace");
  replay_cmd->add_option("--trace", trace_path, "Trace file (JSON lines)")->required();
  replay_cmd->add_option("--out", out_dir, "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const std::optional<fs::path> out =
      out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);
  try {
    if (*run) return cmd_run(config, seed, out);
    if (*compare) return cmd_compare(config, out, false);
    if (*verify) return cmd_compare(config, out, true);
    if (*replay_cmd) return cmd_replay(trace_path, out);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
