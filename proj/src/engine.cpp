#include "wsn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace wsn {

namespace tr = trace;

bool Event::operator>(const Event& o) const {
  if (time != o.time) return time > o.time;
  if (kind != o.kind) return kind > o.kind;
  if (a != o.a) return a > o.a;
  if (b != o.b) return b > o.b;
  return seq > o.seq;
}

void EventQueue::push(Event e) {
  e.seq = next_seq_++;
  heap_.push(e);
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

Simulator::Simulator(SimConfig config)
    : config_((config.validate(), config.resolved())),
      area_{config_.area_width_m, config_.area_height_m},
      end_(SimTime::seconds(config_.sim_duration_s)),
      tick_(SimTime::seconds(config_.tick_s)),
      election_rng_(config_.rng_seed, Stream::Election) {
  const std::uint32_t n = config_.node_count;
  nodes_.resize(n);
  knowledge_.resize(n);
  mobility_rng_.reserve(n);
  Rng placement(config_.rng_seed, Stream::Placement);

  for (NodeId i = 0; i < n; ++i) {
    mobility_rng_.emplace_back(config_.rng_seed, Stream::Mobility, i);
    NodeState& s = nodes_[i];
    s.node_id = i;
    knowledge_[i].owner = i;
    if (i == kSinkId) {
      s.role = Role::Sink;
      s.position = s.waypoint = config_.sink();
      s.residual_energy_j = std::numeric_limits<double>::infinity();
      knowledge_[i].own_cluster_id = kSinkCluster;
      continue;
    }
    s.position = config_.initial_positions.empty()
                     ? Vec2{placement.uniform(0.0, area_.width), placement.uniform(0.0, area_.height)}
                     : config_.initial_positions[i - 1];
    s.residual_energy_j = config_.initial_energy_j;
    draw_leg(s, config_.mobility, area_, mobility_rng_[i]);
  }

  metrics_.sensor_count = n - 1;
  metrics_.initial_energy_j.assign(n, config_.initial_energy_j);
  metrics_.initial_energy_j[kSinkId] = 0;
  metrics_.residual_energy_j = metrics_.initial_energy_j;
  metrics_.debited_j.assign(n, 0.0);
  round_state_.was_ch_in_cycle.assign(n, false);
}

SimTime Simulator::slot() const {
  return SimTime::seconds(config_.packet_size_bits / config_.radio.bitrate_bps);
}

SimTime Simulator::frame_time(NodeId aggregator) const {
  std::int64_t senders = 1;
  for (const auto& c : clustering_.clusters()) {
    if (c.zone_head == aggregator && c.hidden) senders = static_cast<std::int64_t>(c.size());
    if (c.head == aggregator && !c.hidden) senders = static_cast<std::int64_t>(c.size());
  }
  return slot() * senders;
}

bool Simulator::in_range(NodeId a, NodeId b) const {
  const double r = config_.comm_range_m;
  return squared_distance(nodes_[a].position, nodes_[b].position) <= r * r;
}

std::uint64_t Simulator::trace_hash() const { return hasher_.value(); }

void Simulator::record(SimTime t, tr::Body body) {
  tr::Record r{t, std::move(body)};
  hasher_.add(r);
  if (config_.record_trace) trace_.push_back(std::move(r));
}

bool Simulator::debit(SimTime t, NodeId n, double joules, const char* cause) {
  if (n == kSinkId || joules <= 0) return true;
  NodeState& s = nodes_[n];
  if (!s.alive) return false;
  const bool paid = joules < s.residual_energy_j;
  const double take = paid ? joules : s.residual_energy_j;
  s.residual_energy_j = paid ? s.residual_energy_j - take : 0.0;
  metrics_.debited_j[n] += take;
  metrics_.residual_energy_j[n] = s.residual_energy_j;
  record(t, tr::Debit{n, cause, take, s.residual_energy_j});
  if (!paid) {
    s.alive = false;
    queue_.push({t, EventKind::NodeDeath, n, 0, 0, 0});
  }
  return paid;
}

void Simulator::drop(SimTime t, const Packet& p, NodeId at, const char* reason) {
  record(t, tr::PacketDrop{p.pkt_id, at, reason});
  packets_.erase(p.pkt_id);
}

void Simulator::assign(NodeId n, std::optional<ClusterId> c) {
  nodes_[n].cluster_id = c;
  knowledge_[n].own_cluster_id = c;
}

ForwardOutcome Simulator::forward_packet(Packet& pkt, std::span<const NodeId> route, SimTime now) {
  ForwardOutcome out;
  if (route.empty() || route.front() != pkt.src) {
    throw ContractViolation("forward_packet: route must begin at the packet source");
  }
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    const NodeId from = route[i];
    const NodeId to = route[i + 1];
    if (!nodes_[from].alive || !nodes_[to].alive) {
      out.failed_at = nodes_[from].alive ? to : from;
      out.reason = "node_dead";
      return out;
    }
    if (!in_range(from, to)) {
      out.failed_at = from;
      out.reason = "link_broken";
      return out;
    }
    const double d = distance(nodes_[from].position, nodes_[to].position);
    if (!debit(now, from, tx_energy(pkt.size_bits, d, config_.radio), "tx")) {
      out.failed_at = from;
      out.reason = "energy_exhausted";
      return out;
    }
    if (!debit(now, to, rx_energy(pkt.size_bits, config_.radio), "rx")) {
      out.failed_at = to;
      out.reason = "energy_exhausted";
      return out;
    }
    ++out.hops;
    ++pkt.hops;
    if (to != kSinkId && nodes_[to].role == Role::Member) nodes_[to].role = Role::Gateway;
  }
  out.delivered = route.back() == kSinkId;
  if (out.delivered) pkt.delivered = now;
  return out;
}

std::vector<NodeId> Simulator::route_to_sink(NodeId from) const {
  const std::size_t n = nodes_.size();
  constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> hops(n, kUnreached);
  std::deque<NodeId> frontier{kSinkId};
  hops[kSinkId] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (hops[v] != kUnreached || !nodes_[v].alive || !in_range(u, v)) continue;
      hops[v] = hops[u] + 1;
      frontier.push_back(v);
    }
  }
  if (!nodes_[from].alive || hops[from] == kUnreached) return {};

  // Walk down the hop gradient, preferring the relay with the most energy.
  std::vector<NodeId> route{from};
  NodeId cur = from;
  while (cur != kSinkId) {
    std::optional<NodeId> next;
    for (NodeId v = 0; v < n; ++v) {
      if (hops[v] + 1 != hops[cur] || !in_range(cur, v)) continue;
      if (!next || energy(v) > energy(*next)) next = v;
    }
    cur = *next;
    route.push_back(cur);
  }
  return route;
}

void Simulator::install_clustering(Clustering clustering) {
  for (NodeId i = 1; i < nodes_.size(); ++i) {
    assign(i, std::nullopt);
    nodes_[i].role = Role::Member;
  }
  clustering_ = std::move(clustering);
  for (const auto& c : clustering_.clusters()) {
    assign(c.head, c.cluster_id);
    nodes_[c.head].role = Role::ClusterHead;
    for (NodeId m : c.members) assign(m, c.cluster_id);
    if (c.zone_head) nodes_[*c.zone_head].role = Role::ZoneHead;
    next_cluster_id_ = std::max(next_cluster_id_, c.cluster_id + 1);
  }
}

void Simulator::schedule_send(NodeId src, SimTime at, bool periodic) {
  queue_.push({at, EventKind::PacketSend, src, 0, 0, periodic ? 1u : 0u});
}

RunResult Simulator::run() {
  if (end_ > SimTime{}) {
    queue_.push({SimTime{}, EventKind::MobilityUpdate, 0, 0, 0, 0});
    queue_.push({SimTime{}, EventKind::RoundBoundary, 0, 0, 0, 0});
    for (NodeId i = 1; i < nodes_.size(); ++i) schedule_send(i, SimTime{}, true);
  }
  process_until(end_);
  sample(end_);

  RunResult out;
  out.report = build_report(metrics_, config_);
  out.report.trace_hash = trace_hash();
  out.trace = trace_;
  out.knowledge = knowledge_;
  out.final_nodes = nodes_;
  out.final_clustering = clustering_;
  out.metrics = metrics_;
  return out;
}

void Simulator::process_until(SimTime end) {
  while (!queue_.empty() && queue_.top().time < end) handle(queue_.pop());
}

void Simulator::handle(const Event& e) {
  switch (e.kind) {
    case EventKind::MobilityUpdate:
      on_tick(e.time);
      break;
    case EventKind::Meeting:
      on_meeting(e.time, e.a, e.b);
      break;
    case EventKind::ContactTimeout:
      on_timeout(e.time, e.a, e.b);
      break;
    case EventKind::RoundBoundary:
      on_round(e.time, static_cast<std::uint32_t>(e.payload));
      break;
    case EventKind::ProtocolCheck:
      on_protocol_check(e.time);
      break;
    case EventKind::PacketSend:
      on_send(e.time, e.a, e.payload != 0);
      break;
    case EventKind::AggregateForward:
      on_aggregate(e.time, e.a);
      break;
    case EventKind::PacketReceive:
      on_receive(e.time, e.payload);
      break;
    case EventKind::NodeDeath:
      record(e.time, tr::NodeDeath{e.a});
      metrics_.death_times_s.push_back(e.time.sec());
      break;
  }
}

void Simulator::sample(SimTime t) {
  TimePoint p;
  p.time_s = t.sec();
  p.sent = metrics_.packets_sent;
  p.received = metrics_.packets_received;
  p.delivered_bytes = delivered_bytes_;
  p.delay_sum_s = delay_sum_;
  for (NodeId i = 1; i < nodes_.size(); ++i) {
    p.residual_energy_j += nodes_[i].residual_energy_j;
    if (nodes_[i].alive) ++p.alive_sensors;
  }
  metrics_.series.push_back(p);
}

void Simulator::on_tick(SimTime t) {
  record(t, tr::MobilityUpdate{});
  sample(t);
  const double dt = t > SimTime{} ? config_.tick_s : 0.0;
  for (NodeId i = 1; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    if (dt > 0) {
      nodes_[i] = advance_mobility(nodes_[i], dt, config_.mobility, area_, mobility_rng_[i]);
      debit(t, i, config_.radio.e_idle_j_per_s * dt, "idle");
    }
  }
  for (const auto& [a, b] : detect_meetings(nodes_, config_.comm_range_m)) {
    queue_.push({t, EventKind::Meeting, a, b, 0, 0});
  }
  queue_.push({t, EventKind::ProtocolCheck, 0, 0, 0, 0});
  if (t + tick_ < end_) queue_.push({t + tick_, EventKind::MobilityUpdate, 0, 0, 0, 0});
}

void Simulator::on_meeting(SimTime t, NodeId a, NodeId b) {
  if (!nodes_[a].alive || !nodes_[b].alive) return;
  KnowledgeState& ka = knowledge_[a];
  KnowledgeState& kb = knowledge_[b];
  record(t, tr::Meeting{a, b, ka.own_cluster_id, kb.own_cluster_id});
  if (observe_meeting(ka, kb, t, config_.ema)) {
    const SimTime due = t + SimTime::seconds(config_.ema.timeout_s);
    for (auto [n, p] : {std::pair{a, b}, std::pair{b, a}}) {
      timers_[{n, p}] = due;
      queue_.push({due, EventKind::ContactTimeout, n, p, 0, 0});
    }
  }

  if (!mobility_prediction_on() || a == kSinkId || b == kSinkId) return;
  const MeetingOutcome m =
      sync_on_meeting(ka, kb, clustering_, config_.protocol_params.membership_threshold_gamma);
  if (m.synced) {
    record(t, tr::Sync{a, b});
    ++metrics_.syncs;
  }
  if (m.leaver) {
    nodes_[*m.leaver].cluster_id.reset();
    record(t, tr::Leave{*m.leaver, *m.left_cluster, knowledge_[*m.leaver].gateway_table.size()});
    ++metrics_.leaves;
  }
  if (m.joiner) {
    nodes_[*m.joiner].cluster_id = m.join.to;
    record(t, tr::Join{*m.joiner, *m.join_peer, m.join.from, m.join.to, m.join.stability_before,
                       m.join.stability_after});
    ++metrics_.joins;
  }
}

void Simulator::on_timeout(SimTime t, NodeId node, NodeId peer) {
  auto it = timers_.find({node, peer});
  if (it == timers_.end() || it->second != t) return;  // superseded by a later meeting
  if (!nodes_[node].alive) {
    timers_.erase(it);
    return;
  }
  if (!apply_timeout(knowledge_[node], peer, t, config_.ema)) {
    timers_.erase(it);
    return;
  }
  record(t, tr::ContactTimeout{node, peer});
  const SimTime due = t + SimTime::seconds(config_.ema.timeout_s);
  it->second = due;
  queue_.push({due, EventKind::ContactTimeout, node, peer, 0, 0});
}

std::vector<NodeId> Simulator::elect_heads(std::uint32_t round) {
  const double p = config_.protocol_params.ch_probability_p;
  if (round % rotation_period(p) == 0) {
    std::fill(round_state_.was_ch_in_cycle.begin(), round_state_.was_ch_in_cycle.end(), false);
  }
  const double fz = uses_far_zone() ? config_.fz_threshold_j() : 0.0;
  const auto energy_ok = [&](NodeId i) { return !uses_far_zone() || energy(i) >= fz; };

  std::vector<NodeId> heads;
  for (NodeId i = 1; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    const double u = election_rng_.uniform();  // drawn for every alive sensor
    const bool served = round_state_.was_ch_in_cycle[i];
    if (energy_ok(i) && u < leach_ch_threshold(p, round, served)) heads.push_back(i);
  }
  if (heads.empty()) {
    std::optional<NodeId> best;
    for (bool need_ok : {true, false}) {
      for (NodeId i = 1; i < nodes_.size(); ++i) {
        if (!nodes_[i].alive || (need_ok && !energy_ok(i))) continue;
        if (!best || energy(i) > energy(*best)) best = i;
      }
      if (best) break;
    }
    if (best) heads.push_back(*best);
  }
  for (NodeId h : heads) round_state_.was_ch_in_cycle[h] = true;
  return heads;
}

void Simulator::serve_hidden_clusters() {
  const double fz = config_.fz_threshold_j();
  const EnergyOf energy_of = [this](NodeId n) { return energy(n); };
  for (ClusterView& c : clustering_.clusters()) {
    const FarZone z = detect_far_zone(c, energy_of, fz);
    c.far_zone = z.far_zone;
    c.hidden = z.hidden;
    if (!c.hidden) continue;
    std::vector<NodeId> candidates;
    for (NodeId i = 1; i < nodes_.size(); ++i) {
      if (!nodes_[i].alive || c.contains(i) || !in_range(i, c.head)) continue;
      if (clustering_.cluster_of(i) == nullptr || clustering_.is_head(i) ||
          clustering_.is_zone_head(i))
        continue;
      candidates.push_back(i);
    }
    try {
      c.zone_head = elect_zone_head(candidates, energy_of, fz);
      nodes_[*c.zone_head].role = Role::ZoneHead;
      ++metrics_.zone_heads;
    } catch (const UnservedZone&) {
      c.zone_head.reset();
    }
  }
}

void Simulator::record_cluster(SimTime t, const ClusterView& c) {
  record(t, tr::ClusterFormed{c.cluster_id, c.head,
                              std::vector<NodeId>(c.members.begin(), c.members.end()),
                              std::vector<NodeId>(c.far_zone.begin(), c.far_zone.end()),
                              c.zone_head, c.hidden});
}

void Simulator::on_round(SimTime t, std::uint32_t round) {
  record(t, tr::RoundBoundary{round});
  round_state_.round_index = round;
  departure_reelected_.clear();

  const std::vector<NodeId> heads = elect_heads(round);
  auto views = form_clusters(nodes_, heads, config_.comm_range_m, next_cluster_id_);
  next_cluster_id_ += static_cast<ClusterId>(heads.size());
  install_clustering(Clustering(std::move(views)));
  if (uses_far_zone()) serve_hidden_clusters();

  ClusterSnapshot snap;
  snap.time_s = t.sec();
  snap.round = round;
  for (const ClusterView& c : clustering_.clusters()) {
    record_cluster(t, c);
    snap.member_counts.push_back(static_cast<std::uint32_t>(c.members.size()));
  }
  snap.head_count = static_cast<std::uint32_t>(clustering_.clusters().size());
  for (NodeId i = 1; i < nodes_.size(); ++i) snap.alive_sensors += nodes_[i].alive ? 1 : 0;
  metrics_.snapshots.push_back(std::move(snap));

  const SimTime next = t + SimTime::seconds(config_.protocol_params.round_duration_s);
  if (next < end_) queue_.push({next, EventKind::RoundBoundary, 0, 0, 0, round + 1});
}

void Simulator::dissolve(ClusterId id) {
  auto& cs = clustering_.clusters();
  auto it = std::find_if(cs.begin(), cs.end(), [id](const ClusterView& c) { return c.cluster_id == id; });
  if (it == cs.end()) return;
  assign(it->head, std::nullopt);
  for (NodeId m : it->members) assign(m, std::nullopt);
  if (it->zone_head && nodes_[*it->zone_head].role == Role::ZoneHead)
    nodes_[*it->zone_head].role = Role::Member;
  cs.erase(it);
}

void Simulator::on_protocol_check(SimTime t) {
  if (!is_ofz()) return;
  const EnergyOf energy_of = [this](NodeId n) { return energy(n); };
  const auto alive = [this](NodeId n) { return nodes_[n].alive; };
  const double critical = config_.ch_critical_j();
  const double departure = config_.protocol_params.departure_threshold;

  std::vector<ClusterId> ids;
  for (const auto& c : clustering_.clusters()) ids.push_back(c.cluster_id);

  for (ClusterId id : ids) {
    ClusterView* c = clustering_.find(id);
    if (c == nullptr) continue;

    // Critical-energy re-election, only when a member could do better.
    const double head_e = energy(c->head);
    if (critical > 0 && head_e < critical) {
      const bool better = std::any_of(c->members.begin(), c->members.end(), [&](NodeId m) {
        return nodes_[m].alive && energy(m) >= critical;
      });
      if (better) {
        const ReelectOutcome r = reelect_ch(*c, energy_of, alive, ReelectTrigger::CriticalEnergy);
        nodes_[r.old_head].role = Role::Member;
        nodes_[*r.new_head].role = Role::ClusterHead;
        record(t, tr::Reelect{id, r.old_head, r.new_head, "critical_energy", head_e, critical});
        ++metrics_.reelections;
        continue;
      }
    }

    // Departure prediction, at most once per cluster per round.
    if (!mobility_prediction_on() || !nodes_[c->head].alive) continue;
    if (std::find(departure_reelected_.begin(), departure_reelected_.end(), id) !=
        departure_reelected_.end())
      continue;
    if (!predict_ch_departure(*c, knowledge_[c->head], departure)) continue;
    const double observed = stability(c->head, *c, knowledge_[c->head]);
    const ReelectOutcome r = reelect_ch(*c, energy_of, alive, ReelectTrigger::Departure);
    departure_reelected_.push_back(id);
    ++metrics_.reelections;
    record(t, tr::Reelect{id, r.old_head, r.new_head, "departure", observed, departure});
    if (r.dissolved) {
      dissolve(id);
      continue;
    }
    assign(r.old_head, std::nullopt);
    nodes_[r.old_head].role = Role::Member;
    nodes_[*r.new_head].role = Role::ClusterHead;
  }
}

void Simulator::on_send(SimTime t, NodeId src, bool periodic) {
  if (!nodes_[src].alive) return;
  Packet pkt{next_pkt_++, src, t, std::nullopt, config_.packet_size_bits, 0};
  ++metrics_.packets_sent;
  record(t, tr::PacketSend{src, pkt.pkt_id});
  if (periodic) {
    const SimTime next = t + SimTime::seconds(config_.cbr_interval_s);
    if (next < end_) schedule_send(src, next, true);
  }
  packets_.emplace(pkt.pkt_id, pkt);
  Packet& p = packets_.at(pkt.pkt_id);

  const ClusterView* c = clustering_.cluster_of(src);
  if (c == nullptr) {
    // Unclustered: deliver directly if the sink is a neighbour.
    if (in_range(src, kSinkId)) {
      const NodeId route[] = {src, kSinkId};
      return to_sink(t, p, route);
    }
    if (via_gateway(t, p)) return;
    return drop(t, p, src, "unclustered");
  }
  const std::optional<NodeId> aggregator = aggregator_of(src);
  if (!aggregator) {
    if (via_gateway(t, p)) return;
    return drop(t, p, src, "unserved_zone");
  }
  if (*aggregator != src) {
    if ((!nodes_[*aggregator].alive || !in_range(src, *aggregator)) && via_gateway(t, p)) return;
    const NodeId route[] = {src, *aggregator};
    const ForwardOutcome f = forward_packet(p, route, t);
    if (f.hops == 0) return drop(t, p, f.failed_at.value_or(src), f.reason.c_str());
  }
  enqueue(t, p, *aggregator);
}

std::optional<NodeId> Simulator::aggregator_of(NodeId n) const {
  const ClusterView* c = clustering_.cluster_of(n);
  if (c == nullptr) return std::nullopt;
  if (c->hidden) return c->zone_head;
  return c->head;
}

void Simulator::enqueue(SimTime t, const Packet& p, NodeId aggregator) {
  auto& buf = buffers_[aggregator];
  if (buf.empty()) {
    queue_.push({t + frame_time(aggregator), EventKind::AggregateForward, aggregator, 0, 0, 0});
  }
  buf.push_back(p.pkt_id);
}

void Simulator::to_sink(SimTime t, Packet& p, std::span<const NodeId> route) {
  const ForwardOutcome f = forward_packet(p, route, t);
  record(t, tr::AggregateForward{p.src, 1, f.hops, f.delivered});
  if (!f.delivered) return drop(t, p, f.failed_at.value_or(p.src), f.reason.c_str());
  ++metrics_.sink_frames;
  queue_.push({t + slot() * f.hops, EventKind::PacketReceive, kSinkId, 0, 0, p.pkt_id});
}

bool Simulator::via_gateway(SimTime t, Packet& p) {
  if (!mobility_prediction_on()) return false;
  const auto entry = lookup_gateway(knowledge_[p.src], kSinkCluster);
  if (!entry) return false;
  const NodeId relay = entry->gateway == p.src ? kSinkId : entry->gateway;
  if (!nodes_[relay].alive || !in_range(p.src, relay)) return false;
  if (relay == kSinkId) {
    const NodeId route[] = {p.src, kSinkId};
    to_sink(t, p, route);
    return true;
  }

  // The gateway feeds the reading into its own cluster's aggregation.
  const std::optional<NodeId> agg = aggregator_of(relay);
  if (!agg) {
    if (clustering_.cluster_of(relay) != nullptr || !in_range(relay, kSinkId)) return false;
    const NodeId route[] = {p.src, relay, kSinkId};
    to_sink(t, p, route);
    return true;
  }
  if (*agg == p.src || !nodes_[*agg].alive || !in_range(relay, *agg)) return false;
  std::vector<NodeId> route{p.src, relay};
  if (*agg != relay) route.push_back(*agg);
  const ForwardOutcome f = forward_packet(p, route, t);
  if (f.hops + 1 != route.size()) {
    drop(t, p, f.failed_at.value_or(p.src), f.reason.c_str());
    return true;
  }
  enqueue(t, p, *agg);
  return true;
}

void Simulator::on_aggregate(SimTime t, NodeId aggregator) {
  std::vector<std::uint64_t> ids = std::move(buffers_[aggregator]);
  buffers_.erase(aggregator);
  if (ids.empty()) return;

  const auto fail = [&](NodeId at, const char* reason) {
    record(t, tr::AggregateForward{aggregator, static_cast<std::uint32_t>(ids.size()), 0, false});
    for (auto id : ids) drop(t, packets_.at(id), at, reason);
  };
  if (!nodes_[aggregator].alive) return fail(aggregator, "aggregator_dead");
  const std::vector<NodeId> route = route_to_sink(aggregator);
  if (route.empty()) return fail(aggregator, "no_route");

  // One aggregated packet carries every buffered reading upstream.
  Packet frame{0, aggregator, t, std::nullopt, config_.packet_size_bits, 0};
  const ForwardOutcome f = forward_packet(frame, route, t);
  if (!f.delivered) return fail(f.failed_at.value_or(aggregator), f.reason.c_str());

  record(t, tr::AggregateForward{aggregator, static_cast<std::uint32_t>(ids.size()), f.hops, true});
  ++metrics_.sink_frames;
  const SimTime arrival = t + slot() * f.hops;
  for (auto id : ids) {
    packets_.at(id).hops += f.hops;
    queue_.push({arrival, EventKind::PacketReceive, kSinkId, 0, 0, id});
  }
}

void Simulator::on_receive(SimTime t, std::uint64_t pkt_id) {
  auto it = packets_.find(pkt_id);
  if (it == packets_.end()) return;
  Packet& p = it->second;
  p.delivered = t;
  ++metrics_.packets_received;
  const double delay = (t - p.created).sec();
  metrics_.delays_s.push_back(delay);
  delivered_bytes_ += p.size_bits / 8.0;
  delay_sum_ += delay;
  record(t, tr::PacketReceive{kSinkId, pkt_id, p.created.us(), p.hops});
  packets_.erase(it);
}

RunResult simulate(const SimConfig& config) { return Simulator(config).run(); }

RunReport run_simulation(const SimConfig& config) { return simulate(config).report; }

}  // namespace wsn
