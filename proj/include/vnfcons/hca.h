#ifndef VNFCONS_HCA_H_
#define VNFCONS_HCA_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vnfcons/costs.h"
#include "vnfcons/embedding.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons {

struct HcaConfig {
  CostModel model;
  // Cap on the number of k-shortest paths searched when re-placing a chain.
  int k_max = 64;
  // Reject a placement whose partial latency already exceeds the chain's own
  // bound instead of discovering it after the chain is complete.
  bool self_check = true;
  // Restrict chain re-placement to nodes that host nothing yet.
  bool phase2_inactive_only = false;
  // Reserved for randomized tie-breaks; every tie-break is currently
  // deterministic.
  std::uint64_t rng_seed = 0;
};

enum class HcaStatus { kSuccess, kInfeasible };

struct HcaStats {
  int scale_up_attempts = 0;
  int scale_up_successes = 0;
  int new_instances = 0;
  int phase2_runs = 0;
  double runtime_ms = 0.0;
  std::vector<SfcId> processing_order;
};

struct HcaOutcome {
  HcaStatus status = HcaStatus::kSuccess;
  // Complete on success; the partial state at the failure point otherwise.
  Embedding embedding;
  std::map<SfcId, double> per_sfc_latency;
  HcaStats stats;
  std::optional<SfcId> failed_sfc;
  std::string reason;

  bool success() const { return status == HcaStatus::kSuccess; }
};

enum class PlacementVerdict {
  kAccepted,
  kCapacity,         // node would run out of processing
  kResidentLatency,  // an already-embedded chain would miss its bound
  kOwnLatency,       // the chain being placed already misses its bound
};

const char* ToString(PlacementVerdict verdict);

// Greedy cost-aware chain embedding. Chains are embedded one at a time in
// increasing latency-bound order. Each request first tries to grow an
// existing instance of its VNF (closest first), then to open a new instance
// on the fullest node that still fits. A chain that ends up over its latency
// bound is released and re-placed entirely on one node of a low-latency
// start-to-end path.
class Hca {
 public:
  Hca(const Scenario& scenario, HcaConfig config);

  HcaOutcome Run();

  enum class PhaseResult { kMapped, kCapacityFailure, kLatencyFailure };

  // Greedy pass over the chain. kLatencyFailure means placement only failed
  // because of the chain's own bound (possible with self_check), so the
  // re-placement pass should still be tried.
  PhaseResult Phase1(const SfcInstance& sfc);

  // Re-placement along the k-shortest start-to-end paths. Assumes the chain
  // holds no resources.
  PhaseResult Phase2(const SfcInstance& sfc);

  // Tries growing the instance of the request's VNF on `node` (or opening it
  // if absent), routed from `current`. Commits on kAccepted.
  PlacementVerdict TryPlace(const SfcInstance& sfc, const VnfRequest& request,
                            NodeId node, NodeId current);

  // Marks a fully routed chain as embedded so later placements protect its
  // latency bound.
  void MarkEmbedded(const SfcInstance& sfc);

  const Embedding& embedding() const { return emb_; }
  Embedding& mutable_embedding() { return emb_; }
  const HcaStats& stats() const { return stats_; }

 private:
  // Chain latency when node `v` holds `alloc` instead of its current
  // allocation.
  double LatencyWith(const SfcInstance& sfc, NodeId v,
                     const NodeAllocation& alloc) const;
  PlacementVerdict CheckResidents(NodeId v, const NodeAllocation& alloc) const;
  Path SubPath(const Path& path, NodeId v, bool prefix) const;

  const Scenario& scenario_;
  const PhysicalNetwork& net_;
  HcaConfig config_;
  RoutingTable routing_;
  Embedding emb_;
  std::set<SfcId> embedded_;
  std::map<NodeId, std::set<SfcId>> residents_;
  HcaStats stats_;
};

// Convenience wrapper around Hca(scenario, config).Run().
HcaOutcome RunHca(const Scenario& scenario, const HcaConfig& config);

}  // namespace vnfcons

#endif  // VNFCONS_HCA_H_
