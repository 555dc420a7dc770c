#include "wsn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "wsn/config_io.hpp"
#include "wsn/engine.hpp"

namespace wsn {

namespace fs = std::filesystem;
using nlohmann::json;

void Scenario::validate() const {
  if (protocols.empty()) throw ConfigError("protocols", "must name at least one protocol");
  if (seeds.empty()) throw ConfigError("seeds", "must list at least one seed");
  for (std::size_t i = 0; i < protocols.size(); ++i)
    for (std::size_t j = i + 1; j < protocols.size(); ++j)
      if (protocols[i] == protocols[j]) throw ConfigError("protocols", "duplicate protocol");
  for (std::uint32_t n : node_count_sweep)
    if (n < 2) throw ConfigError("node_count_sweep", "every node count must be >= 2");
  base.validate();
}

namespace {

const std::set<std::string> kScenarioKeys{"name",  "protocol",         "protocols", "seed",
                                          "seeds", "node_count_sweep", "output_dir"};

template <typename T>
std::vector<T> list_of(const json& v, const char* key) {
  const auto one = [key](const json& x) {
    if constexpr (std::is_same_v<T, Protocol>) {
      if (!x.is_string()) throw ConfigError(key, "expected a protocol name");
      try {
        return protocol_from_string(x.get<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(key, e.what());
      }
    } else {
      if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
        throw ConfigError(key, "expected a non-negative integer");
      return x.get<T>();
    }
  };
  std::vector<T> out;
  if (v.is_array()) {
    for (const json& x : v) out.push_back(one(x));
  } else {
    out.push_back(one(v));
  }
  return out;
}

}  // namespace

Scenario parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<syntax>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "expected an object");

  Scenario s;
  s.base = config_from_json(j, SimConfig{}, kScenarioKeys);
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("protocol") && j.contains("protocols"))
    throw ConfigError("protocols", "give either protocol or protocols, not both");
  if (j.contains("protocol")) s.protocols = list_of<Protocol>(j["protocol"], "protocol");
  if (j.contains("protocols")) s.protocols = list_of<Protocol>(j["protocols"], "protocols");
  if (j.contains("seed") && j.contains("seeds"))
    throw ConfigError("seeds", "give either seed or seeds, not both");
  if (j.contains("seed")) s.seeds = list_of<std::uint64_t>(j["seed"], "seed");
  if (j.contains("seeds")) s.seeds = list_of<std::uint64_t>(j["seeds"], "seeds");
  if (j.contains("node_count_sweep"))
    s.node_count_sweep = list_of<std::uint32_t>(j["node_count_sweep"], "node_count_sweep");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
    s.output_dir = j["output_dir"].get<std::string>();
  }
  s.base.protocol = s.protocols.front();
  s.base.rng_seed = s.seeds.front();
  s.base = s.base.resolved();
  s.validate();
  return s;
}

Scenario parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const Scenario& s) {
  json protocols = json::array();
  for (Protocol p : s.protocols) protocols.push_back(to_string(p));
  json base = config_to_json(s.base);
  base.erase("protocol");
  base.erase("rng_seed");
  return json{{"name", s.name},
              {"protocols", protocols},
              {"seeds", s.seeds},
              {"node_count_sweep", s.node_count_sweep},
              {"output_dir", s.output_dir ? json(*s.output_dir) : json(nullptr)},
              {"base", base}};
}

std::vector<std::pair<std::string, double>> scalar_metrics(const RunReport& r) {
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  return {{"pdr_percent", r.pdr_percent},
          {"mean_delay_s", r.mean_delay_s},
          {"throughput_pkts_per_s", r.throughput_pkts_per_s},
          {"throughput_literal_percent", r.throughput_literal_percent},
          {"total_energy_j", r.total_energy_j},
          {"avg_residual_energy_j", r.avg_residual_energy_j},
          {"avg_cluster_members", r.avg_cluster_members},
          {"avg_cluster_heads", r.avg_cluster_heads},
          {"lifetime_fnd_s", r.lifetime_fnd_s},
          {"lifetime_hnd_s", r.lifetime_hnd_s},
          {"packets_sent", d(r.packets_sent)},
          {"packets_received", d(r.packets_received)},
          {"sink_frames", d(r.sink_frames)},
          {"joins", d(r.joins)},
          {"leaves", d(r.leaves)},
          {"syncs", d(r.syncs)},
          {"reelections", d(r.reelections)},
          {"zone_heads", d(r.zone_heads)}};
}

std::map<std::string, Aggregate> aggregate(std::span<const RunReport> runs) {
  std::map<std::string, Aggregate> out;
  for (const RunReport& r : runs) {
    for (const auto& [name, v] : scalar_metrics(r)) {
      Aggregate& a = out[name];
      a.min = a.n == 0 ? v : std::min(a.min, v);
      a.max = a.n == 0 ? v : std::max(a.max, v);
      a.mean += v;
      ++a.n;
    }
  }
  for (auto& [name, a] : out) a.mean /= static_cast<double>(a.n);
  return out;
}

std::vector<RunReport> ComparisonReport::runs_of(Protocol p) const {
  std::vector<RunReport> out;
  for (const RunReport& r : runs)
    if (r.protocol == to_string(p)) out.push_back(r);
  return out;
}

unsigned job_limit() {
  if (const char* env = std::getenv(kJobsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(job_limit(), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::vector<RunReport> run_all(const std::vector<SimConfig>& configs) {
  std::vector<RunReport> out(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) {
    try {
      out[i] = run_simulation(configs[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("run failed (protocol {}, seed {}, nodes {}): {}",
                                           to_string(configs[i].protocol), configs[i].rng_seed,
                                           configs[i].node_count, e.what()));
    }
  });
  return out;
}

}  // namespace

ComparisonReport run_scenario(const Scenario& scenario) {
  scenario.validate();
  ComparisonReport report;
  report.scenario = scenario;

  const auto configs_for = [&](std::uint32_t nodes) {
    std::vector<SimConfig> out;
    for (Protocol p : scenario.protocols) {
      for (std::uint64_t seed : scenario.seeds) {
        SimConfig c = scenario.base;
        c.protocol = p;
        c.rng_seed = seed;
        c.node_count = nodes;
        c.record_trace = false;
        out.push_back(c);
      }
    }
    return out;
  };

  report.runs = run_all(configs_for(scenario.base.node_count));
  std::vector<SimConfig> sweep;
  for (std::uint32_t n : scenario.node_count_sweep) {
    for (SimConfig& c : configs_for(n)) {
      // Explicit placement only fits the base node count.
      c.initial_positions.clear();
      sweep.push_back(std::move(c));
    }
  }
  report.sweep_runs = run_all(sweep);

  for (Protocol p : scenario.protocols) {
    const std::vector<RunReport> runs = report.runs_of(p);
    report.aggregates[to_string(p)] = aggregate(runs);
  }
  const auto has = [&](Protocol p) {
    return std::find(scenario.protocols.begin(), scenario.protocols.end(), p) !=
           scenario.protocols.end();
  };
  if (has(Protocol::Leach) && has(Protocol::FarZone) && has(Protocol::OptimizedFarZone))
    report.trends = verify_trends(report);
  return report;
}

std::vector<TrendVerdict> verify_trends(const ComparisonReport& report) {
  const auto mean = [&](Protocol p, const std::string& metric) {
    auto it = report.aggregates.find(to_string(p));
    if (it == report.aggregates.end())
      throw ContractViolation("verify_trends: no runs for protocol " + to_string(p));
    return it->second.at(metric).mean;
  };
  const Protocol L = Protocol::Leach, F = Protocol::FarZone, O = Protocol::OptimizedFarZone;
  std::vector<TrendVerdict> out;
  const auto at_least = [&](const std::string& m, Protocol a, Protocol b) {
    const double x = mean(a, m), y = mean(b, m);
    out.push_back({fmt::format("{} {} >= {}", m, to_string(a), to_string(b)), x, y, x >= y});
  };
  const auto at_most = [&](const std::string& m, Protocol a, Protocol b) {
    const double x = mean(a, m), y = mean(b, m);
    out.push_back({fmt::format("{} {} <= {}", m, to_string(a), to_string(b)), x, y, x <= y});
  };
  at_least("pdr_percent", O, F);
  at_least("pdr_percent", F, L);
  at_most("mean_delay_s", O, F);
  at_least("lifetime_fnd_s", O, F);
  at_least("lifetime_fnd_s", F, L);
  at_least("lifetime_hnd_s", O, F);
  at_least("lifetime_hnd_s", F, L);
  at_most("avg_cluster_heads", O, L);
  return out;
}

namespace {

class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
  }
  void line(const std::string& s) { out_ << s << '\n'; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string header(const std::string& first, const std::vector<Protocol>& ps) {
  std::string h = first;
  for (Protocol p : ps) h += "," + to_string(p);
  return h;
}

// Mean over seeds of a per-index value; rows stop at the shortest series.
template <typename Len, typename Row>
void series_file(CsvFile& f, const ComparisonReport& r, Len len, Row row) {
  std::vector<std::vector<RunReport>> by;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (Protocol p : r.scenario.protocols) {
    by.push_back(r.runs_of(p));
    for (const RunReport& run : by.back()) n = std::min(n, len(run));
  }
  if (r.runs.empty()) n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    bool first = true;
    for (const auto& runs : by) {
      double sum = 0, key = 0;
      for (const RunReport& run : runs) {
        const auto [k, v] = row(run, i);
        sum += v;
        key = k;
      }
      if (first) line = fmt::format("{}", key);
      first = false;
      line += fmt::format(",{}", sum / static_cast<double>(runs.size()));
    }
    f.line(line);
  }
}

double members_per_cluster(const ClusterSnapshot& s) {
  if (s.member_counts.empty()) return 0.0;
  double total = 0;
  for (auto c : s.member_counts) total += c;
  return total / static_cast<double>(s.member_counts.size());
}

}  // namespace

std::vector<fs::path> export_results(const ComparisonReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& ps = report.scenario.protocols;
  std::vector<fs::path> written;

  {
    CsvFile f(dir / "runs.csv");
    f.line(csv_header());
    for (const RunReport& r : report.runs) f.line(csv_row(r));
    for (const RunReport& r : report.sweep_runs) f.line(csv_row(r));
    written.push_back(f.path());
  }
  {
    CsvFile f(dir / "summary.csv");
    f.line("protocol,metric,mean,min,max,n");
    for (Protocol p : ps) {
      auto it = report.aggregates.find(to_string(p));
      if (it == report.aggregates.end()) continue;
      for (const auto& [name, v] : scalar_metrics(RunReport{})) {
        (void)v;
        const Aggregate& a = it->second.at(name);
        f.line(fmt::format("{},{},{},{},{},{}", to_string(p), name, a.mean, a.min, a.max, a.n));
      }
    }
    written.push_back(f.path());
  }
  {
    json aggregates = json::object();
    for (const auto& [proto, metrics] : report.aggregates)
      for (const auto& [name, a] : metrics)
        aggregates[proto][name] = {{"mean", a.mean}, {"min", a.min}, {"max", a.max}, {"n", a.n}};
    json trends = json::array();
    for (const TrendVerdict& t : report.trends)
      trends.push_back({{"claim", t.claim}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"pass", t.pass}});
    const json summary{
        {"scenario", to_json(report.scenario)}, {"aggregates", aggregates}, {"trends", trends}};
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
    written.push_back(dir / "summary.json");
  }

  {
    CsvFile f(dir / "members_vs_time.csv");
    f.line(header("time_s", ps));
    series_file(
        f, report, [](const RunReport& r) { return r.snapshots.size(); },
        [](const RunReport& r, std::size_t i) {
          return std::pair{r.snapshots[i].time_s, members_per_cluster(r.snapshots[i])};
        });
    written.push_back(f.path());
  }
  {
    CsvFile f(dir / "heads_vs_time.csv");
    f.line(header("time_s", ps));
    series_file(
        f, report, [](const RunReport& r) { return r.snapshots.size(); },
        [](const RunReport& r, std::size_t i) {
          return std::pair{r.snapshots[i].time_s, static_cast<double>(r.snapshots[i].head_count)};
        });
    written.push_back(f.path());
  }
  const auto series_len = [](const RunReport& r) { return r.series.size(); };
  {
    CsvFile f(dir / "delivered_kbytes_vs_time.csv");
    f.line(header("time_s", ps));
    series_file(f, report, series_len, [](const RunReport& r, std::size_t i) {
      return std::pair{r.series[i].time_s, r.series[i].delivered_bytes / 1000.0};
    });
    written.push_back(f.path());
  }
  {
    CsvFile f(dir / "delay_vs_time.csv");
    f.line(header("time_s", ps));
    series_file(f, report, series_len, [](const RunReport& r, std::size_t i) {
      const TimePoint& p = r.series[i];
      return std::pair{p.time_s, p.received ? p.delay_sum_s / static_cast<double>(p.received) : 0.0};
    });
    written.push_back(f.path());
  }
  {
    CsvFile f(dir / "throughput_vs_time.csv");
    f.line(header("time_s", ps));
    series_file(f, report, series_len, [](const RunReport& r, std::size_t i) {
      const TimePoint& p = r.series[i];
      return std::pair{p.time_s, p.time_s > 0 ? static_cast<double>(p.received) / p.time_s : 0.0};
    });
    written.push_back(f.path());
  }
  {
    CsvFile f(dir / "energy_vs_nodes.csv");
    f.line(header("node_count", ps));
    const auto& src = report.sweep_runs.empty() ? report.runs : report.sweep_runs;
    std::vector<std::uint32_t> counts;
    for (const RunReport& r : src) counts.push_back(r.node_count);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    for (std::uint32_t n : counts) {
      std::string line = fmt::format("{}", n);
      for (Protocol p : ps) {
        double sum = 0;
        std::size_t k = 0;
        for (const RunReport& r : src) {
          if (r.node_count != n || r.protocol != to_string(p)) continue;
          sum += r.total_energy_j;
          ++k;
        }
        line += fmt::format(",{}", k ? sum / static_cast<double>(k) : 0.0);
      }
      f.line(line);
    }
    written.push_back(f.path());
  }
  return written;
}

}  // namespace wsn
