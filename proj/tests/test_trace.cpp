#include "doctest.h"

#include <sstream>

#include "wsn/config_io.hpp"
#include "wsn/engine.hpp"
#include "wsn/replay.hpp"
#include "wsn/trace.hpp"

using namespace wsn;

namespace {

SimConfig small(Protocol p) {
  SimConfig c;
  c.node_count = 15;
  c.area_width_m = 700;
  c.sim_duration_s = 120;
  c.initial_energy_j = 0.05;
  c.protocol = p;
  c.rng_seed = 9;
  return c;
}

}  // namespace

TEST_CASE("every record kind survives a line roundtrip") {
  using namespace trace;
  const std::vector<Record> records{
      {SimTime::micros(0), MobilityUpdate{}},
      {SimTime::micros(1), Meeting{1, 2, 3, std::nullopt}},
      {SimTime::micros(2), ContactTimeout{4, 5}},
      {SimTime::micros(3), RoundBoundary{7}},
      {SimTime::micros(4), ClusterFormed{3, 1, {2, 5}, {5}, 9, true}},
      {SimTime::micros(5), Sync{1, 2}},
      {SimTime::micros(6), Leave{2, 3, 0}},
      {SimTime::micros(7), Join{2, 6, std::nullopt, 4, 0.0, 0.123456789012345}},
      {SimTime::micros(8), Reelect{3, 1, 2, "critical_energy", 0.01, 0.025}},
      {SimTime::micros(9), PacketSend{2, 77}},
      {SimTime::micros(10), Debit{2, "tx", 1.35e-3, 0.1 + 0.2}},
      {SimTime::micros(11), AggregateForward{1, 3, 2, true}},
      {SimTime::micros(12), PacketDrop{78, 4, "unclustered"}},
      {SimTime::micros(13), PacketReceive{0, 77, 9, 2}},
      {SimTime::micros(14), NodeDeath{4}},
  };
  for (const Record& r : records) {
    const std::string line = to_line(r);
    CHECK(to_line(parse_line(line)) == line);
  }
  std::stringstream ss;
  write(ss, config_to_json(SimConfig{}), records);
  const TraceFile f = read(ss);
  CHECK(hash(f.records) == hash(records));
  CHECK(config_from_json(f.config).node_count == 50);
}

TEST_CASE("hash is order sensitive") {
  using namespace trace;
  const std::vector<Record> ab{{SimTime{}, Sync{1, 2}}, {SimTime{}, Sync{3, 4}}};
  const std::vector<Record> ba{ab[1], ab[0]};
  CHECK(hash(ab) != hash(ba));
  CHECK(hash({}) == 0xcbf29ce484222325ULL);
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS(trace::parse_line("not json"));
  CHECK_THROWS(trace::parse_line(R"({"t":0,"k":"bogus"})"));
}

TEST_CASE("replay reproduces the run from its trace alone") {
  for (Protocol p : {Protocol::Leach, Protocol::FarZone, Protocol::OptimizedFarZone}) {
    const SimConfig c = small(p);
    const RunResult run = simulate(c);
    std::stringstream ss;
    trace::write(ss, config_to_json(c), run.trace);
    const ReplayResult r = replay(trace::read(ss));
    for (const Violation& v : r.violations) MESSAGE(v.invariant, " ", v.detail);
    CHECK(r.ok());
    CHECK(r.report.trace_hash == run.report.trace_hash);
    CHECK(to_json(r.report).dump() == to_json(run.report).dump());
    for (NodeId i = 0; i < c.node_count; ++i)
      CHECK(canonical(r.knowledge[i]) == canonical(run.knowledge[i]));
  }
}

TEST_CASE("replay flags a tampered energy record") {
  const SimConfig c = small(Protocol::OptimizedFarZone);
  RunResult run = simulate(c);
  for (trace::Record& rec : run.trace)
    if (auto* d = std::get_if<trace::Debit>(&rec.body)) {
      d->residual += 1e-3;
      break;
    }
  std::stringstream ss;
  trace::write(ss, config_to_json(c), run.trace);
  const ReplayResult r = replay(trace::read(ss));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().invariant == "energy");
}
