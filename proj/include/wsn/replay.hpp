#pragma once

#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/contact.hpp"
#include "wsn/metrics.hpp"
#include "wsn/protocols.hpp"
#include "wsn/trace.hpp"

namespace wsn {

struct Violation {
  std::string invariant;  // partition | energy | join | leave | reelect | cluster_id
  std::int64_t t_us = 0;
  std::string detail;
};

struct ReplayResult {
  SimConfig config;
  std::vector<KnowledgeState> knowledge;
  Clustering clustering;
  MetricsAccumulator metrics;
  RunReport report;
  std::vector<Violation> violations;
  std::uint64_t records = 0;

  bool ok() const { return violations.empty(); }
};

/// Rebuild tables, clustering and metrics from a trace alone, checking every
/// structural invariant along the way.
ReplayResult replay(const trace::TraceFile& file);

}  // namespace wsn
