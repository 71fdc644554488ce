#include <climits>
#include <cmath>
#include <string>
#include <vector>

#include "vnfcons/ilp.h"

namespace vnfcons {

namespace {

class ExactSearch {
 public:
  explicit ExactSearch(const Scenario& scenario)
      : scenario_(scenario),
        net_(scenario.network()),
        routing_(scenario.network()),
        nfv_(net_.NfvNodes()),
        alloc_(net_.num_nodes()) {
    for (const SfcInstance& s : scenario.sfcs()) {
      for (const VnfRequest& r : s.requests) requests_.push_back(&r);
    }
    assignment_.assign(requests_.size(), -1);
  }

  ExactSolution Solve() {
    Search(0, 0);
    ExactSolution out;
    out.assignments_explored = explored_;
    if (best_.empty()) return out;
    out.status = ExactStatus::kOptimal;
    out.objective = best_active_;
    const CostModel model;
    std::size_t next = 0;
    for (const SfcInstance& s : scenario_.sfcs()) {
      NodeId prev = s.start;
      for (const VnfRequest& r : s.requests) {
        const NodeId v = best_[next++];
        out.embedding.ApplyMapping(scenario_, model, r, v, routing_.Shortest(prev, v));
        prev = v;
      }
      out.embedding.ConnectEnd(scenario_, s.id, routing_.Shortest(prev, s.end));
    }
    return out;
  }

 private:
  // Lower bound on the chain's final latency given the current partial
  // assignment. Node latencies only grow as instances grow, and the
  // unplaced tail needs at least the shortest path to the end point.
  double LatencyBound(const SfcInstance& s, std::size_t first) const {
    double total = 0.0;
    NodeId prev = s.start;
    for (const VnfRequest& r : s.requests) {
      const NodeId v = assignment_[first + r.position];
      if (v < 0) break;
      total += routing_.Distance(prev, v);
      total += model_.RequestLatency(alloc_[v], net_.node(v), r.vnf);
      prev = v;
    }
    return total + routing_.Distance(prev, s.end);
  }

  bool LatencyOk() const {
    std::size_t first = 0;
    for (const SfcInstance& s : scenario_.sfcs()) {
      if (assignment_[first] >= 0 &&
          LatencyBound(s, first) > s.max_latency + kTolerance) {
        return false;
      }
      first += s.requests.size();
    }
    return true;
  }

  void Search(std::size_t depth, int active) {
    if (active >= best_active_) return;
    if (depth == requests_.size()) {
      best_active_ = active;
      best_ = assignment_;
      return;
    }
    const VnfRequest& r = *requests_[depth];
    for (NodeId v : nfv_) {
      ++explored_;
      NodeAllocation& a = alloc_[v];
      const bool opens = a.empty();
      const double before = a.Get(r.vnf);
      a.cores[r.vnf] = before + r.processing;
      assignment_[depth] = v;
      if (model_.Admissible(a, net_.node(v)) && LatencyOk()) {
        Search(depth + 1, active + (opens ? 1 : 0));
      }
      assignment_[depth] = -1;
      if (before == 0.0) {
        a.cores.erase(r.vnf);
      } else {
        a.cores[r.vnf] = before;
      }
    }
  }

  const Scenario& scenario_;
  const PhysicalNetwork& net_;
  RoutingTable routing_;
  CostModel model_;
  std::vector<NodeId> nfv_;
  std::vector<const VnfRequest*> requests_;
  std::vector<NodeAllocation> alloc_;
  std::vector<NodeId> assignment_;
  std::vector<NodeId> best_;
  int best_active_ = INT_MAX;
  long long explored_ = 0;
};

}  // namespace

ExactSolution SolveExact(const Scenario& scenario, const ExactLimits& limits) {
  const PhysicalNetwork& net = scenario.network();
  const int nfv = static_cast<int>(net.NfvNodes().size());
  if (nfv > limits.max_nfv_nodes) {
    throw LimitError("exact solver supports at most " +
                     std::to_string(limits.max_nfv_nodes) + " NFV nodes, got " +
                     std::to_string(nfv));
  }
  if (scenario.total_requests() > limits.max_requests) {
    throw LimitError("exact solver supports at most " +
                     std::to_string(limits.max_requests) + " requests, got " +
                     std::to_string(scenario.total_requests()));
  }
  for (const PhysicalLink& l : net.links()) {
    if (!std::isinf(l.bandwidth)) {
      throw LimitError("exact solver requires unlimited link bandwidth");
    }
  }
  return ExactSearch(scenario).Solve();
}

}  // namespace vnfcons
