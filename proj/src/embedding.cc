#include "vnfcons/embedding.h"

#include <cmath>
#include <utility>

namespace vnfcons {

namespace {

const NodeAllocation kEmptyAllocation;

}  // namespace

const NodeAllocation& Embedding::allocation(NodeId v) const {
  auto it = allocations_.find(v);
  return it == allocations_.end() ? kEmptyAllocation : it->second;
}

std::optional<NodeId> Embedding::NodeOf(const RequestKey& key) const {
  auto it = request_map_.find(key);
  if (it == request_map_.end()) return std::nullopt;
  return it->second;
}

void Embedding::ApplyMapping(const Scenario& scenario, const CostModel& model,
                             const VnfRequest& request, NodeId node,
                             Path path_from_prev) {
  const SfcInstance& sfc = scenario.sfc(request.sfc);
  const PhysicalNetwork& net = scenario.network();
  if (request.position < 0 || request.position >= sfc.length()) {
    throw std::invalid_argument("request position out of range");
  }
  const RequestKey key{request.sfc, request.position};
  if (request_map_.contains(key)) {
    throw std::invalid_argument("request is already mapped");
  }
  if (!net.has_node(node) || !net.node(node).is_nfv()) {
    throw std::invalid_argument("requests can only be mapped to NFV nodes");
  }
  NodeId prev = sfc.start;
  if (request.position > 0) {
    auto p = NodeOf({request.sfc, request.position - 1});
    if (!p) throw std::invalid_argument("previous request is not mapped");
    prev = *p;
  }
  if (path_from_prev.source != prev || path_from_prev.target != node) {
    throw std::invalid_argument("path does not join the previous hop");
  }

  NodeAllocation grown = allocation(node);
  grown.cores[request.vnf] += request.processing;
  if (!model.Admissible(grown, net.node(node))) {
    throw CapacityError("node " + net.node(node).name +
                        " lacks capacity for the request");
  }

  allocations_[node] = std::move(grown);
  request_map_[key] = node;
  active_.insert(node);
  AddLoad(path_from_prev, sfc.link_bandwidth[request.position]);
  link_paths_[{request.sfc, request.position}] = std::move(path_from_prev);
}

void Embedding::ConnectEnd(const Scenario& scenario, SfcId sfc_id, Path path) {
  const SfcInstance& sfc = scenario.sfc(sfc_id);
  auto last = NodeOf({sfc_id, sfc.length() - 1});
  if (!last) throw std::invalid_argument("last request is not mapped");
  if (path.source != *last || path.target != sfc.end) {
    throw std::invalid_argument("path does not reach the end point");
  }
  SetPath(scenario, {sfc_id, sfc.length()}, std::move(path));
}

void Embedding::ReleaseSfc(const Scenario& scenario, SfcId sfc_id) {
  const SfcInstance& sfc = scenario.sfc(sfc_id);
  for (const VnfRequest& r : sfc.requests) {
    auto it = request_map_.find({sfc_id, r.position});
    if (it == request_map_.end()) continue;
    const NodeId v = it->second;
    request_map_.erase(it);
    auto alloc = allocations_.find(v);
    if (alloc == allocations_.end()) continue;
    auto inst = alloc->second.cores.find(r.vnf);
    if (inst == alloc->second.cores.end()) continue;
    inst->second -= r.processing;
    if (inst->second <= kTolerance) alloc->second.cores.erase(inst);
    if (alloc->second.empty()) {
      allocations_.erase(alloc);
      active_.erase(v);
    }
  }
  for (int k = 0; k < sfc.num_vlinks(); ++k) {
    auto it = link_paths_.find({sfc_id, k});
    if (it == link_paths_.end()) continue;
    AddLoad(it->second, -sfc.link_bandwidth[k]);
    link_paths_.erase(it);
  }
}

void Embedding::SetAllocation(NodeId v, VnfId f, double cores) {
  if (cores <= 0.0) {
    EraseAllocation(v, f);
    return;
  }
  allocations_[v].cores[f] = cores;
}

void Embedding::EraseAllocation(NodeId v, VnfId f) {
  auto it = allocations_.find(v);
  if (it == allocations_.end()) return;
  it->second.cores.erase(f);
  if (it->second.empty()) allocations_.erase(it);
}

void Embedding::SetRequestNode(const RequestKey& key, NodeId v) {
  request_map_[key] = v;
}

void Embedding::EraseRequest(const RequestKey& key) {
  request_map_.erase(key);
}

void Embedding::SetPath(const Scenario& scenario, const VlinkKey& key,
                        Path path) {
  double bandwidth = 0.0;
  if (scenario.has_sfc(key.sfc)) {
    const SfcInstance& sfc = scenario.sfc(key.sfc);
    if (key.index >= 0 && key.index < sfc.num_vlinks()) {
      bandwidth = sfc.link_bandwidth[key.index];
    }
  }
  auto it = link_paths_.find(key);
  if (it != link_paths_.end()) AddLoad(it->second, -bandwidth);
  AddLoad(path, bandwidth);
  link_paths_[key] = std::move(path);
}

void Embedding::RefreshActive() {
  active_.clear();
  for (const auto& [v, alloc] : allocations_) {
    if (!alloc.empty()) active_.insert(v);
  }
}

void Embedding::AddLoad(const Path& path, double bandwidth) {
  for (LinkId l : path.links) {
    double& load = link_load_[l];
    load += bandwidth;
    if (std::abs(load) <= kTolerance) link_load_.erase(l);
  }
}

bool ApproxEqual(const Embedding& a, const Embedding& b, double tol) {
  if (a.request_map() != b.request_map()) return false;
  if (a.active() != b.active()) return false;
  if (a.link_paths().size() != b.link_paths().size()) return false;
  for (const auto& [key, path] : a.link_paths()) {
    auto it = b.link_paths().find(key);
    if (it == b.link_paths().end() || it->second.links != path.links) {
      return false;
    }
  }
  auto same_alloc = [tol](const std::map<NodeId, NodeAllocation>& x,
                          const std::map<NodeId, NodeAllocation>& y) {
    if (x.size() != y.size()) return false;
    for (const auto& [v, alloc] : x) {
      auto it = y.find(v);
      if (it == y.end() || it->second.cores.size() != alloc.cores.size()) {
        return false;
      }
      for (const auto& [f, c] : alloc.cores) {
        auto jt = it->second.cores.find(f);
        if (jt == it->second.cores.end() || std::abs(jt->second - c) > tol) {
          return false;
        }
      }
    }
    return true;
  };
  if (!same_alloc(a.allocations(), b.allocations())) return false;
  auto load_within = [tol](const std::map<LinkId, double>& x,
                           const std::map<LinkId, double>& y) {
    for (const auto& [l, load] : x) {
      auto it = y.find(l);
      const double other = it == y.end() ? 0.0 : it->second;
      if (std::abs(other - load) > tol) return false;
    }
    return true;
  };
  return load_within(a.link_load(), b.link_load()) &&
         load_within(b.link_load(), a.link_load());
}

double RouteLatency(const Embedding& emb, const Scenario& scenario,
                    const SfcInstance& sfc) {
  double total = 0.0;
  for (int k = 0; k < sfc.num_vlinks(); ++k) {
    auto it = emb.link_paths().find({sfc.id, k});
    if (it != emb.link_paths().end()) {
      total += SumLatency(scenario.network(), it->second.links);
    }
  }
  return total;
}

double SfcLatencyOverhead(const Embedding& emb, const Scenario& scenario,
                          const SfcInstance& sfc, const CostModel& model) {
  double sigma = 0.0;
  for (const VnfRequest& r : sfc.requests) {
    auto v = emb.NodeOf({sfc.id, r.position});
    if (!v) continue;
    sigma += model.RequestLatency(emb.allocation(*v),
                                  scenario.network().node(*v), r.vnf);
  }
  return sigma;
}

double EndToEndLatency(const Embedding& emb, const Scenario& scenario,
                       const SfcInstance& sfc, const CostModel& model) {
  return RouteLatency(emb, scenario, sfc) +
         SfcLatencyOverhead(emb, scenario, sfc, model);
}

}  // namespace vnfcons
