#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "wsn/config.hpp"
#include "wsn/metrics.hpp"

namespace wsn {

/// Environment variable capping the number of concurrent runs.
inline constexpr const char* kJobsEnv = "WSNSIM_JOBS";

struct Scenario {
  std::string name = "default";
  SimConfig base;
  std::vector<Protocol> protocols{Protocol::Leach, Protocol::FarZone, Protocol::OptimizedFarZone};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  /// Extra runs at these node counts, for the energy-vs-nodes series.
  std::vector<std::uint32_t> node_count_sweep;
  std::optional<std::string> output_dir;

  void validate() const;
};

/// Scenario from JSON text. Scenario keys (name, protocol/protocols,
/// seed/seeds, node_count_sweep, output_dir) sit beside the simulation keys.
Scenario parse_config_text(const std::string& text);
Scenario parse_config(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& s);

struct Aggregate {
  double mean = 0, min = 0, max = 0;
  std::size_t n = 0;
};

/// Named scalar metrics of a report, in a fixed order.
std::vector<std::pair<std::string, double>> scalar_metrics(const RunReport& r);

/// Per-metric mean/min/max across reports.
std::map<std::string, Aggregate> aggregate(std::span<const RunReport> runs);

struct TrendVerdict {
  std::string claim;  // e.g. "pdr_percent OFZ-LEACH >= FZ-LEACH"
  double lhs = 0, rhs = 0;
  bool pass = false;
};

struct ComparisonReport {
  Scenario scenario;
  /// Ordered by protocol (scenario order) then seed.
  std::vector<RunReport> runs;
  /// Node-count sweep runs, ordered by node count, protocol, seed.
  std::vector<RunReport> sweep_runs;
  std::map<std::string, std::map<std::string, Aggregate>> aggregates;  // protocol -> metric
  std::vector<TrendVerdict> trends;  // empty unless all three protocols ran

  std::vector<RunReport> runs_of(Protocol p) const;
};

/// Concurrency cap: $WSNSIM_JOBS when set and positive, else the hardware
/// thread count.
unsigned job_limit();

/// Run `task(i)` for i in [0, n) on up to job_limit() threads. The first
/// exception (lowest index) is rethrown after all tasks finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

/// Run every (protocol, seed) pair, plus the node-count sweep.
ComparisonReport run_scenario(const Scenario& scenario);

/// Evaluate the comparative claims over seed means. Throws ContractViolation
/// unless all three protocols are present.
std::vector<TrendVerdict> verify_trends(const ComparisonReport& report);

/// runs.csv, summary.csv, summary.json and six plot series. Returns the
/// written paths in write order.
std::vector<std::filesystem::path> export_results(const ComparisonReport& report,
                                                  const std::filesystem::path& dir);

}  // namespace wsn
