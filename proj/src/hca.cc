#include "vnfcons/hca.h"

#include <algorithm>
#include <chrono>
#include <utility>

namespace vnfcons {

const char* ToString(PlacementVerdict verdict) {
  switch (verdict) {
    case PlacementVerdict::kAccepted: return "accepted";
    case PlacementVerdict::kCapacity: return "capacity";
    case PlacementVerdict::kResidentLatency: return "resident_latency";
    case PlacementVerdict::kOwnLatency: return "own_latency";
  }
  return "unknown";
}

Hca::Hca(const Scenario& scenario, HcaConfig config)
    : scenario_(scenario),
      net_(scenario.network()),
      config_(std::move(config)),
      routing_(scenario.network()) {}

double Hca::LatencyWith(const SfcInstance& sfc, NodeId v,
                        const NodeAllocation& alloc) const {
  double total = RouteLatency(emb_, scenario_, sfc);
  for (const VnfRequest& r : sfc.requests) {
    auto u = emb_.NodeOf({sfc.id, r.position});
    if (!u) continue;
    const NodeAllocation& a = *u == v ? alloc : emb_.allocation(*u);
    total += config_.model.RequestLatency(a, net_.node(*u), r.vnf);
  }
  return total;
}

PlacementVerdict Hca::CheckResidents(NodeId v,
                                     const NodeAllocation& alloc) const {
  auto it = residents_.find(v);
  if (it == residents_.end()) return PlacementVerdict::kAccepted;
  for (SfcId id : it->second) {
    const SfcInstance& other = scenario_.sfc(id);
    if (LatencyWith(other, v, alloc) > other.max_latency + kTolerance) {
      return PlacementVerdict::kResidentLatency;
    }
  }
  return PlacementVerdict::kAccepted;
}

PlacementVerdict Hca::TryPlace(const SfcInstance& sfc,
                               const VnfRequest& request, NodeId node,
                               NodeId current) {
  const PhysicalNode& pn = net_.node(node);
  NodeAllocation grown = emb_.allocation(node);
  grown.cores[request.vnf] += request.processing;
  if (!config_.model.Admissible(grown, pn)) return PlacementVerdict::kCapacity;
  if (CheckResidents(node, grown) != PlacementVerdict::kAccepted) {
    return PlacementVerdict::kResidentLatency;
  }
  const Path& path = routing_.Shortest(current, node);
  if (config_.self_check) {
    const double partial =
        LatencyWith(sfc, node, grown) + path.total_latency +
        config_.model.RequestLatency(grown, pn, request.vnf);
    if (partial > sfc.max_latency + kTolerance) {
      return PlacementVerdict::kOwnLatency;
    }
  }
  emb_.ApplyMapping(scenario_, config_.model, request, node, path);
  return PlacementVerdict::kAccepted;
}

Hca::PhaseResult Hca::Phase1(const SfcInstance& sfc) {
  NodeId current = sfc.start;
  bool own_latency_hit = false;
  for (const VnfRequest& r : sfc.requests) {
    std::optional<NodeId> placed;

    // Existing instances of the VNF, nearest first.
    std::vector<std::pair<double, NodeId>> existing;
    for (const auto& [v, alloc] : emb_.allocations()) {
      if (alloc.Get(r.vnf) > 0.0 && routing_.Reachable(current, v)) {
        existing.emplace_back(routing_.Distance(current, v), v);
      }
    }
    std::sort(existing.begin(), existing.end());
    for (const auto& [dist, v] : existing) {
      ++stats_.scale_up_attempts;
      const PlacementVerdict verdict = TryPlace(sfc, r, v, current);
      if (verdict == PlacementVerdict::kAccepted) {
        ++stats_.scale_up_successes;
        placed = v;
        break;
      }
      if (verdict == PlacementVerdict::kOwnLatency) own_latency_hit = true;
    }

    // New instance on the node with the least residual capacity.
    if (!placed) {
      std::vector<std::pair<double, NodeId>> fresh;
      for (NodeId v : net_.NfvNodes()) {
        if (emb_.cores(v, r.vnf) > 0.0 || !routing_.Reachable(current, v)) {
          continue;
        }
        fresh.emplace_back(
            config_.model.Residual(emb_.allocation(v), net_.node(v)), v);
      }
      std::sort(fresh.begin(), fresh.end());
      for (const auto& [residual, v] : fresh) {
        const PlacementVerdict verdict = TryPlace(sfc, r, v, current);
        if (verdict == PlacementVerdict::kAccepted) {
          ++stats_.new_instances;
          placed = v;
          break;
        }
        if (verdict == PlacementVerdict::kOwnLatency) own_latency_hit = true;
      }
    }

    if (!placed) {
      return own_latency_hit ? PhaseResult::kLatencyFailure
                             : PhaseResult::kCapacityFailure;
    }
    current = *placed;
  }
  if (!routing_.Reachable(current, sfc.end)) return PhaseResult::kLatencyFailure;
  emb_.ConnectEnd(scenario_, sfc.id, routing_.Shortest(current, sfc.end));
  return PhaseResult::kMapped;
}

Path Hca::SubPath(const Path& path, NodeId v, bool prefix) const {
  auto it = std::find(path.nodes.begin(), path.nodes.end(), v);
  std::vector<NodeId> nodes = prefix
                                  ? std::vector<NodeId>(path.nodes.begin(), it + 1)
                                  : std::vector<NodeId>(it, path.nodes.end());
  if (nodes.size() == 1) return routing_.Shortest(v, v);
  return PathFromNodes(net_, nodes);
}

Hca::PhaseResult Hca::Phase2(const SfcInstance& sfc) {
  const std::vector<Path>& paths =
      routing_.KShortest(sfc.start, sfc.end, config_.k_max);
  const std::size_t limit =
      std::min(paths.size(), static_cast<std::size_t>(config_.k_max));
  for (std::size_t k = 0; k < limit; ++k) {
    const Path& path = paths[k];
    std::optional<NodeId> best;
    for (NodeId v : path.nodes) {
      const PhysicalNode& pn = net_.node(v);
      if (!pn.is_nfv() || (best && *best == v)) continue;
      if (config_.phase2_inactive_only && emb_.active().contains(v)) continue;
      if (best) {
        const double best_cores = net_.node(*best).cores;
        if (pn.cores < best_cores || (pn.cores == best_cores && v > *best)) {
          continue;
        }
      }
      NodeAllocation grown = emb_.allocation(v);
      for (const VnfRequest& r : sfc.requests) grown.cores[r.vnf] += r.processing;
      if (!config_.model.Admissible(grown, pn)) continue;
      if (CheckResidents(v, grown) != PlacementVerdict::kAccepted) continue;
      double own = path.total_latency;
      for (const VnfRequest& r : sfc.requests) {
        own += config_.model.RequestLatency(grown, pn, r.vnf);
      }
      if (own > sfc.max_latency + kTolerance) continue;
      best = v;
    }
    if (!best) continue;

    const NodeId v = *best;
    for (const VnfRequest& r : sfc.requests) {
      Path hop = r.position == 0 ? SubPath(path, v, true)
                                 : routing_.Shortest(v, v);
      emb_.ApplyMapping(scenario_, config_.model, r, v, std::move(hop));
    }
    emb_.ConnectEnd(scenario_, sfc.id, SubPath(path, v, false));
    return PhaseResult::kMapped;
  }
  return PhaseResult::kCapacityFailure;
}

void Hca::MarkEmbedded(const SfcInstance& sfc) {
  embedded_.insert(sfc.id);
  for (const VnfRequest& r : sfc.requests) {
    if (auto v = emb_.NodeOf({sfc.id, r.position})) residents_[*v].insert(sfc.id);
  }
}

HcaOutcome Hca::Run() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<const SfcInstance*> order;
  for (const SfcInstance& s : scenario_.sfcs()) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const SfcInstance* a, const SfcInstance* b) {
              if (a->max_latency != b->max_latency) {
                return a->max_latency < b->max_latency;
              }
              return a->id < b->id;
            });

  HcaOutcome out;
  auto fail = [&](const SfcInstance& sfc, std::string reason) {
    emb_.ReleaseSfc(scenario_, sfc.id);
    out.status = HcaStatus::kInfeasible;
    out.failed_sfc = sfc.id;
    out.reason = std::move(reason);
  };

  for (const SfcInstance* s : order) {
    const SfcInstance& sfc = *s;
    stats_.processing_order.push_back(sfc.id);
    PhaseResult r = Phase1(sfc);
    if (r == PhaseResult::kMapped &&
        EndToEndLatency(emb_, scenario_, sfc, config_.model) <=
            sfc.max_latency + kTolerance) {
      MarkEmbedded(sfc);
      continue;
    }
    if (r == PhaseResult::kCapacityFailure) {
      fail(sfc, "no node can host a request of SFC " + std::to_string(sfc.id));
      break;
    }
    emb_.ReleaseSfc(scenario_, sfc.id);
    ++stats_.phase2_runs;
    if (Phase2(sfc) != PhaseResult::kMapped) {
      fail(sfc, "no path node can host SFC " + std::to_string(sfc.id) +
                    " within its latency bound");
      break;
    }
    MarkEmbedded(sfc);
  }

  for (SfcId id : embedded_) {
    out.per_sfc_latency[id] =
        EndToEndLatency(emb_, scenario_, scenario_.sfc(id), config_.model);
  }
  stats_.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  out.stats = stats_;
  out.embedding = emb_;
  return out;
}

HcaOutcome RunHca(const Scenario& scenario, const HcaConfig& config) {
  return Hca(scenario, config).Run();
}

}  // namespace vnfcons
