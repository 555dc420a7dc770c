// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria (capped at 1 for ctest).
//
//   acceptance [--only N] [--config path]

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <unistd.h>

#include <fmt/format.h>

#include "wsn/config_io.hpp"
#include "wsn/contact.hpp"
#include "wsn/engine.hpp"
#include "wsn/harness.hpp"
#include "wsn/replay.hpp"

#include "oracles.hpp"

using namespace wsn;
namespace fs = std::filesystem;
namespace tr = wsn::trace;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string what) {
    if (!ok) {
      pass = false;
      if (notes.size() < 12) notes.push_back(std::move(what));
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> body;
};

// ---------------------------------------------------------------------------

Outcome ema_properties() {
  Outcome o;
  std::mt19937_64 g(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double xi = u(g), xk = u(g), a = i % 1000 == 0 ? 0.0 : u(g);
    const ContactProbability pi{xi}, pk{xk};
    const double tx = ema_update(pi, pk, a, EmaTrigger::Transmission).value();
    o.check(tx >= 0.0 && tx <= 1.0, fmt::format("transmission out of range: {} {} {}", xi, xk, a));
    o.check(tx >= std::min(xi, xk) - 1e-15 && tx <= std::max(xi, xk) + 1e-15,
            fmt::format("transmission not between inputs: {} {} {}", xi, xk, a));
    const double trust = ema_update(pi, ContactProbability{1.0}, a, EmaTrigger::Transmission).value();
    o.check(trust >= xi, fmt::format("contact lowered trust: {} {}", xi, a));

    const int k = 1 + i % 20;
    ContactProbability p = pi;
    for (int s = 0; s < k; ++s) p = ema_update(p, std::nullopt, a, EmaTrigger::Timeout);
    const double closed = std::pow(1.0 - a, k) * xi;
    o.check(p.value() >= 0.0 && p.value() <= 1.0, "timeout out of range");
    o.check(std::abs(p.value() - closed) <= 1e-12,
            fmt::format("{}-fold timeout {} vs {}", k, p.value(), closed));

    const double zero_tx = ema_update(pi, pk, 0.0, EmaTrigger::Transmission).value();
    const double zero_to = ema_update(pi, std::nullopt, 0.0, EmaTrigger::Timeout).value();
    o.check(zero_tx == xi && zero_to == xi, fmt::format("alpha=0 changed {}", xi));
  }
  return o;
}

// Library side of the table oracle: the same stream applied through the
// library operations.
std::vector<std::string> library_tables(std::uint32_t n, const EmaConfig& ema,
                                        const std::vector<tr::Record>& records) {
  std::vector<KnowledgeState> k(n);
  for (NodeId i = 0; i < n; ++i) k[i].owner = i;
  k[kSinkId].own_cluster_id = kSinkCluster;
  for (const tr::Record& r : records) {
    if (const auto* m = std::get_if<tr::Meeting>(&r.body)) {
      observe_meeting(k[m->a], k[m->b], r.t, ema);
    } else if (const auto* o = std::get_if<tr::ContactTimeout>(&r.body)) {
      apply_timeout(k[o->node], o->peer, r.t, ema);
    } else if (const auto* s = std::get_if<tr::Sync>(&r.body)) {
      sync_tables(k[s->a], k[s->b]);
    } else if (const auto* l = std::get_if<tr::Leave>(&r.body)) {
      k[l->node].gateway_table.clear();
      k[l->node].own_cluster_id.reset();
    } else if (const auto* j = std::get_if<tr::Join>(&r.body)) {
      k[j->node].gateway_table = k[j->peer].gateway_table;
      k[j->node].own_cluster_id = j->to;
    } else if (std::holds_alternative<tr::RoundBoundary>(r.body)) {
      for (NodeId i = 1; i < n; ++i) k[i].own_cluster_id.reset();
    } else if (const auto* c = std::get_if<tr::ClusterFormed>(&r.body)) {
      k[c->head].own_cluster_id = c->cluster;
      for (NodeId m : c->members) k[m].own_cluster_id = c->cluster;
    }
  }
  std::vector<std::string> out;
  for (const auto& s : k) out.push_back(canonical(s));
  return out;
}

Outcome table_oracle() {
  Outcome o;
  const EmaConfig ema;
  std::size_t entries = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto records = oracle::random_table_trace(seed, 10, 500);
    const auto lib = library_tables(10, ema, records);
    const auto ref = oracle::reconstruct_tables(10, ema.alpha, records);
    for (std::size_t i = 0; i < lib.size(); ++i) {
      o.check(lib[i] == ref[i], fmt::format("random trace {} node {} differs", seed, i));
      entries += lib[i].size();
    }
  }
  // Engine traces: final knowledge of a real run against the reconstructor.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig c;
    c.node_count = 10;
    c.area_width_m = 600;
    c.sim_duration_s = 120;
    c.rng_seed = seed;
    const RunResult run = simulate(c);
    const auto ref = oracle::reconstruct_tables(c.node_count, c.ema.alpha, run.trace);
    for (NodeId i = 0; i < c.node_count; ++i)
      o.check(canonical(run.knowledge[i]) == ref[i],
              fmt::format("engine seed {} node {} differs", seed, i));
  }
  o.check(entries > 0, "empty tables");
  return o;
}

Outcome protocol_invariants() {
  Outcome o;
  std::size_t records = 0, joins = 0, leaves = 0, reelects = 0;
  for (Protocol p : {Protocol::Leach, Protocol::FarZone, Protocol::OptimizedFarZone}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SimConfig c;
      c.node_count = 20;
      c.sim_duration_s = 300;
      c.protocol = p;
      c.rng_seed = seed;
      const RunResult run = simulate(c);
      const oracle::InvariantReport scan = oracle::scan_invariants(c.node_count, run.trace);
      for (const auto& f : scan.failures)
        o.check(false, fmt::format("{} seed {}: {}", to_string(p), seed, f));
      const ReplayResult rep = replay({config_to_json(c), run.trace});
      for (const Violation& v : rep.violations)
        o.check(false, fmt::format("{} seed {}: {} {}", to_string(p), seed, v.invariant, v.detail));
      o.check(rep.report.trace_hash == run.report.trace_hash, "replay hash differs");
      records += scan.checked;
      joins += run.report.joins;
      leaves += run.report.leaves;
      reelects += run.report.reelections;
    }
  }
  o.notes.push_back(fmt::format("{} records, {} joins, {} leaves, {} re-elections", records, joins,
                                leaves, reelects));
  return o;
}

Outcome degenerate_reduction() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig leach;
    leach.protocol = Protocol::Leach;
    leach.rng_seed = seed;
    leach.record_trace = false;
    SimConfig ofz = leach;
    ofz.protocol = Protocol::OptimizedFarZone;
    ofz.protocol_params.fz_energy_threshold_j = 0.0;
    ofz.protocol_params.ch_critical_energy_j = 0.0;
    ofz.protocol_params.departure_threshold = 0.0;
    const std::uint64_t a = run_simulation(leach).trace_hash;
    const std::uint64_t b = run_simulation(ofz).trace_hash;
    o.check(a == b, fmt::format("seed {}: {:016x} vs {:016x}", seed, a, b));
  }
  return o;
}

Scenario default_scenario(const std::optional<fs::path>& config) {
  return config ? parse_config(*config) : Scenario{};
}

Outcome trends(const ComparisonReport& report) {
  Outcome o;
  for (const TrendVerdict& t : verify_trends(report))
    o.check(t.pass, fmt::format("{}: {} vs {}", t.claim, t.lhs, t.rhs));
  for (const auto& [proto, m] : report.aggregates)
    o.notes.push_back(fmt::format("{} pdr={:.2f} delay={:.4f} fnd={:.1f} hnd={:.1f} heads={:.2f}",
                                  proto, m.at("pdr_percent").mean, m.at("mean_delay_s").mean,
                                  m.at("lifetime_fnd_s").mean, m.at("lifetime_hnd_s").mean,
                                  m.at("avg_cluster_heads").mean));
  return o;
}

Outcome formula_parity(const ComparisonReport& report) {
  Outcome o;
  for (const RunReport& r : report.runs) {
    const double pdr_ref = r.packets_sent ? static_cast<double>(r.packets_received) /
                                                static_cast<double>(r.packets_sent) * 100.0
                                          : 0.0;
    const double duration = r.config.at("sim_duration_s").get<double>();
    const double thr_ref = static_cast<double>(r.packets_received) / duration;
    o.check(r.pdr_percent == pdr_ref,
            fmt::format("{} seed {} pdr {} vs {}", r.protocol, r.seed, r.pdr_percent, pdr_ref));
    o.check(r.throughput_pkts_per_s == thr_ref,
            fmt::format("{} seed {} throughput {} vs {}", r.protocol, r.seed,
                        r.throughput_pkts_per_s, thr_ref));
  }
  // Energy bookkeeping against the debit stream of traced runs.
  for (Protocol p : {Protocol::Leach, Protocol::FarZone, Protocol::OptimizedFarZone}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      SimConfig c = report.scenario.base;
      c.protocol = p;
      c.rng_seed = seed;
      c.record_trace = true;
      const RunResult run = simulate(c);
      const std::vector<double> debits = oracle::debit_totals(c.node_count, run.trace);
      double total = 0;
      for (NodeId i = 1; i < c.node_count; ++i) {
        const double consumed = c.initial_energy_j - run.final_nodes[i].residual_energy_j;
        total += consumed;
        const double scale = std::max(std::abs(consumed), 1e-300);
        o.check(std::abs(consumed - debits[i]) <= 1e-9 * scale || consumed == debits[i],
                fmt::format("{} seed {} node {}: consumed {} vs debited {}", to_string(p), seed, i,
                            consumed, debits[i]));
      }
      o.check(std::abs(total - run.report.total_energy_j) <= 1e-9 * std::max(total, 1e-300),
              fmt::format("{} seed {} total energy {} vs {}", to_string(p), seed, total,
                          run.report.total_energy_j));
    }
  }
  return o;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

Outcome determinism(const Scenario& s, const ComparisonReport& first) {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / fmt::format("wsn_accept.{}", ::getpid());
  fs::remove_all(base);
  export_results(first, base / "a");
  const ComparisonReport second = run_scenario(s);
  export_results(second, base / "b");
  const auto a = tree(base / "a"), b = tree(base / "b");
  o.check(a.size() == b.size() && !a.empty(), "different file sets");
  for (const auto& [name, text] : a) {
    auto it = b.find(name);
    o.check(it != b.end() && it->second == text, fmt::format("{} differs", name));
  }
  o.notes.push_back(fmt::format("{} files compared", a.size()));
  fs::remove_all(base);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::optional<fs::path> config;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--config") && i + 1 < argc) config = argv[++i];
    else {
      fmt::print(stderr, "usage: acceptance [--only N] [--config path]\n");
      return 2;
    }
  }

  const Scenario scenario = default_scenario(config);
  std::optional<ComparisonReport> compared;
  const auto comparison = [&]() -> const ComparisonReport& {
    if (!compared) compared = run_scenario(scenario);
    return *compared;
  };

  const std::vector<Criterion> criteria{
      {1, "ema property suite", 5, ema_properties},
      {2, "table sync oracle", 30, table_oracle},
      {3, "protocol invariants on traces", 60, protocol_invariants},
      {4, "degenerate reduction to LEACH", 30, degenerate_reduction},
      {5, "comparative trends", 300, [&] { return trends(comparison()); }},
      {6, "formula parity", 60, [&] { return formula_parity(comparison()); }},
      {7, "compare is byte-deterministic", 300, [&] { return determinism(scenario, comparison()); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.check(false, fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < c.budget_s, fmt::format("took {:.1f} s, budget {} s", secs, c.budget_s));
    fmt::print("{} [{}] {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    for (const auto& n : o.notes) fmt::print("    {}\n", n);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
