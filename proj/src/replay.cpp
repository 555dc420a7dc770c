#include "wsn/replay.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wsn/config_io.hpp"

namespace wsn {

namespace {

namespace tr = trace;

class Replayer {
 public:
  explicit Replayer(const tr::TraceFile& file) {
    out_.config = config_from_json(file.config).resolved();
    const std::uint32_t n = out_.config.node_count;
    out_.knowledge.resize(n);
    for (NodeId i = 0; i < n; ++i) out_.knowledge[i].owner = i;
    out_.knowledge[kSinkId].own_cluster_id = kSinkCluster;
    alive_.assign(n, true);

    MetricsAccumulator& m = out_.metrics;
    m.sensor_count = n - 1;
    m.initial_energy_j.assign(n, out_.config.initial_energy_j);
    m.initial_energy_j[kSinkId] = 0;
    m.residual_energy_j = m.initial_energy_j;
    m.debited_j.assign(n, 0.0);
  }

  ReplayResult finish(const std::vector<tr::Record>& records) {
    for (const tr::Record& r : records) {
      now_ = r.t;
      if (!std::holds_alternative<tr::ClusterFormed>(r.body)) close_round();
      std::visit([this](const auto& body) { on(body); }, r.body);
      ++out_.records;
    }
    close_round();
    sample(out_.config.sim_duration_s);
    out_.report = build_report(out_.metrics, out_.config);
    out_.report.trace_hash = tr::hash(records);
    return std::move(out_);
  }

 private:
  void fail(const char* invariant, std::string detail) {
    out_.violations.push_back({invariant, now_.us(), std::move(detail)});
  }

  KnowledgeState& k(NodeId n) { return out_.knowledge.at(n); }
  double energy(NodeId n) const {
    return n == kSinkId ? INFINITY : out_.metrics.residual_energy_j.at(n);
  }

  void set_cluster(NodeId n, std::optional<ClusterId> c) { k(n).own_cluster_id = c; }

  void check_partition() {
    if (!out_.clustering.is_partition()) fail("partition", "a node belongs to two clusters");
  }

  void sample(double time_s) {
    const MetricsAccumulator& m = out_.metrics;
    TimePoint p;
    p.time_s = time_s;
    p.sent = m.packets_sent;
    p.received = m.packets_received;
    p.delivered_bytes = delivered_bytes_;
    p.delay_sum_s = delay_sum_;
    for (NodeId i = 1; i < alive_.size(); ++i) {
      p.residual_energy_j += m.residual_energy_j[i];
      if (alive_[i]) ++p.alive_sensors;
    }
    out_.metrics.series.push_back(p);
  }

  // Round snapshots are closed when the first non-cluster record follows.
  void close_round() {
    if (!pending_) return;
    ClusterSnapshot& s = *pending_;
    for (const ClusterView& c : out_.clustering.clusters())
      s.member_counts.push_back(static_cast<std::uint32_t>(c.members.size()));
    s.head_count = static_cast<std::uint32_t>(out_.clustering.clusters().size());
    for (NodeId i = 1; i < alive_.size(); ++i) s.alive_sensors += alive_[i] ? 1 : 0;
    out_.metrics.snapshots.push_back(std::move(s));
    pending_.reset();
  }

  void on(const tr::MobilityUpdate&) { sample(now_.sec()); }

  void on(const tr::Meeting& r) {
    if (k(r.a).own_cluster_id != r.cluster_a || k(r.b).own_cluster_id != r.cluster_b)
      fail("cluster_id", fmt::format("meeting {}-{} disagrees with replayed membership", r.a, r.b));
    observe_meeting(k(r.a), k(r.b), now_, out_.config.ema);
  }

  void on(const tr::ContactTimeout& r) {
    if (!apply_timeout(k(r.node), r.peer, now_, out_.config.ema))
      fail("timeout", fmt::format("timeout {}->{} without an entry", r.node, r.peer));
  }

  void on(const tr::RoundBoundary& r) {
    for (NodeId i = 1; i < alive_.size(); ++i) set_cluster(i, std::nullopt);
    out_.clustering = Clustering();
    pending_ = ClusterSnapshot{now_.sec(), r.round, {}, 0, 0};
  }

  void on(const tr::ClusterFormed& r) {
    ClusterView c;
    c.cluster_id = r.cluster;
    c.head = r.head;
    c.members.insert(r.members.begin(), r.members.end());
    c.far_zone.insert(r.far_zone.begin(), r.far_zone.end());
    c.zone_head = r.zone_head;
    c.hidden = r.hidden;
    set_cluster(c.head, c.cluster_id);
    for (NodeId m : c.members) set_cluster(m, c.cluster_id);
    if (c.zone_head) ++out_.metrics.zone_heads;
    out_.clustering.clusters().push_back(std::move(c));
    check_partition();
  }

  void on(const tr::Sync& r) {
    sync_tables(k(r.a), k(r.b));
    ++out_.metrics.syncs;
  }

  void on(const tr::Leave& r) {
    const ClusterView* c = out_.clustering.cluster_of(r.node);
    if (c == nullptr || c->cluster_id != r.cluster)
      fail("leave", fmt::format("node {} leaves cluster {} it is not in", r.node, r.cluster));
    else
      leave(k(r.node), out_.clustering);
    if (r.gateway_entries_after != 0 || !k(r.node).gateway_table.empty())
      fail("leave", fmt::format("node {} kept gateway entries after leaving", r.node));
    ++out_.metrics.leaves;
    check_partition();
  }

  void on(const tr::Join& r) {
    const JoinOutcome j = join(k(r.node), k(r.peer), out_.clustering,
                               out_.config.protocol_params.membership_threshold_gamma);
    if (!j.joined || j.to != r.to || j.from != r.from)
      fail("join", fmt::format("node {} join to {} not reproducible", r.node, r.to));
    if (j.stability_before != r.stability_before || j.stability_after != r.stability_after)
      fail("join", fmt::format("node {} recorded stability differs from tables", r.node));
    if (!(r.stability_after > r.stability_before))
      fail("join", fmt::format("node {} joined without improving stability", r.node));
    ++out_.metrics.joins;
    check_partition();
  }

  void on(const tr::Reelect& r) {
    ClusterView* c = out_.clustering.find(r.cluster);
    ++out_.metrics.reelections;
    if (c == nullptr || c->head != r.old_head) {
      fail("reelect", fmt::format("cluster {} has no head {}", r.cluster, r.old_head));
      return;
    }
    const bool departure = r.trigger == "departure";
    double observed = 0;
    if (departure) {
      observed = stability(c->head, *c, k(c->head));
    } else if (r.trigger == "critical_energy") {
      observed = energy(c->head);
    } else {
      fail("reelect", "unknown trigger " + r.trigger);
      return;
    }
    if (observed != r.observed || !(observed < r.limit))
      fail("reelect", fmt::format("cluster {} trigger {} not verified ({} vs limit {})", r.cluster,
                                  r.trigger, observed, r.limit));

    const EnergyOf energy_of = [this](NodeId n) { return energy(n); };
    const auto alive = [this](NodeId n) { return static_cast<bool>(alive_[n]); };
    const ReelectOutcome o = reelect_ch(
        *c, energy_of, alive, departure ? ReelectTrigger::Departure : ReelectTrigger::CriticalEnergy);
    if (o.new_head != r.new_head)
      fail("reelect", fmt::format("cluster {} new head differs", r.cluster));
    if (o.dissolved) {
      set_cluster(c->head, std::nullopt);
      for (NodeId m : c->members) set_cluster(m, std::nullopt);
      auto& cs = out_.clustering.clusters();
      std::erase_if(cs, [&](const ClusterView& v) { return v.cluster_id == r.cluster; });
    } else if (departure) {
      set_cluster(o.old_head, std::nullopt);
    }
    check_partition();
  }

  void on(const tr::PacketSend&) { ++out_.metrics.packets_sent; }

  void on(const tr::Debit& r) {
    MetricsAccumulator& m = out_.metrics;
    const double before = m.residual_energy_j.at(r.node);
    if (r.residual > before || r.joules < 0)
      fail("energy", fmt::format("node {} residual rose from {} to {}", r.node, before, r.residual));
    const double expect = before - r.joules;
    if (std::abs(expect - r.residual) > 1e-12 * std::max(1.0, before))
      fail("energy", fmt::format("node {} debit does not add up", r.node));
    m.residual_energy_j[r.node] = r.residual;
    m.debited_j[r.node] += r.joules;
    if (r.residual == 0.0) alive_[r.node] = false;
  }

  void on(const tr::AggregateForward& r) {
    if (r.delivered) ++out_.metrics.sink_frames;
  }

  void on(const tr::PacketDrop&) {}

  void on(const tr::PacketReceive& r) {
    const double delay = (now_ - SimTime::micros(r.created_us)).sec();
    ++out_.metrics.packets_received;
    out_.metrics.delays_s.push_back(delay);
    delivered_bytes_ += out_.config.packet_size_bits / 8.0;
    delay_sum_ += delay;
  }

  void on(const tr::NodeDeath& r) {
    alive_.at(r.node) = false;
    out_.metrics.death_times_s.push_back(now_.sec());
  }

  ReplayResult out_;
  SimTime now_;
  std::vector<char> alive_;
  std::optional<ClusterSnapshot> pending_;
  double delivered_bytes_ = 0;
  double delay_sum_ = 0;
};

}  // namespace

ReplayResult replay(const trace::TraceFile& file) {
  return Replayer(file).finish(file.records);
}

}  // namespace wsn
