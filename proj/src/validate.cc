#include <cmath>
#include <map>
#include <sstream>

#include "vnfcons/embedding.h"

namespace vnfcons {

namespace {

std::string Num(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

class Checker {
 public:
  Checker(const Embedding& emb, const Scenario& scenario,
          const CostModel& model)
      : emb_(emb), scenario_(scenario), net_(scenario.network()),
        model_(model) {}

  ValidationReport Run() {
    CheckMappings();
    CheckInstances();
    CheckNodes();
    CheckRoutes();
    CheckBandwidth();
    CheckLatency();
    CheckActive();
    return std::move(report_);
  }

 private:
  void Add(ConstraintFamily family, std::string detail,
           std::vector<int> ids = {}) {
    report_.violations.push_back({family, std::move(detail), std::move(ids)});
  }

  std::string NodeName(NodeId v) const {
    return net_.has_node(v) ? net_.node(v).name : "#" + std::to_string(v);
  }

  // Every request mapped exactly once, to an existing node; no stray keys.
  void CheckMappings() {
    for (const SfcInstance& sfc : scenario_.sfcs()) {
      for (const VnfRequest& r : sfc.requests) {
        auto v = emb_.NodeOf({sfc.id, r.position});
        if (!v) {
          Add(ConstraintFamily::kUniqueMapping,
              "request " + std::to_string(r.position) + " of SFC " +
                  std::to_string(sfc.id) + " is not mapped",
              {sfc.id, r.position});
        } else if (!net_.has_node(*v)) {
          Add(ConstraintFamily::kUniqueMapping,
              "request mapped to unknown node", {sfc.id, r.position, *v});
        }
      }
    }
    for (const auto& [key, v] : emb_.request_map()) {
      if (!scenario_.has_sfc(key.sfc) || key.position < 0 ||
          key.position >= scenario_.sfc(key.sfc).length()) {
        Add(ConstraintFamily::kUniqueMapping,
            "mapping for a request that does not exist",
            {key.sfc, key.position});
      }
    }
  }

  // Instance sizing versus the requests that share it, and presence flags.
  void CheckInstances() {
    std::map<std::pair<NodeId, VnfId>, double> demand;
    std::map<std::pair<NodeId, VnfId>, int> users;
    for (const SfcInstance& sfc : scenario_.sfcs()) {
      for (const VnfRequest& r : sfc.requests) {
        auto v = emb_.NodeOf({sfc.id, r.position});
        if (!v || !net_.has_node(*v)) continue;
        demand[{*v, r.vnf}] += r.processing;
        ++users[{*v, r.vnf}];
      }
    }
    for (const auto& [key, need] : demand) {
      const auto [v, f] = key;
      const double c = emb_.cores(v, f);
      if (c <= 0.0) {
        Add(ConstraintFamily::kInstancePresence,
            "requests mapped to node " + NodeName(v) + " for VNF " +
                std::to_string(f) + " which has no instance there",
            {v, f});
      }
      if (need > c + kTolerance) {
        Add(ConstraintFamily::kInstanceCapacity,
            "instance of VNF " + std::to_string(f) + " on node " +
                NodeName(v) + " has " + Num(c) + " cores but its requests "
                "need " + Num(need),
            {v, f});
      }
    }
    for (const auto& [v, alloc] : emb_.allocations()) {
      for (const auto& [f, c] : alloc.cores) {
        if (!net_.has_node(v) || f < 0 || f >= scenario_.catalog().num_vnfs()) {
          Add(ConstraintFamily::kInstancePresence,
              "instance on an unknown node or of an unknown VNF", {v, f});
          continue;
        }
        if (!(c > 0.0) || !std::isfinite(c)) {
          Add(ConstraintFamily::kInstancePresence,
              "instance with non-positive size", {v, f});
        }
        if (!users.contains({v, f})) {
          Add(ConstraintFamily::kInstancePresence,
              "instance of VNF " + std::to_string(f) + " on node " +
                  NodeName(v) + " serves no request",
              {v, f});
        }
      }
    }
  }

  // Capacity after sharing overheads.
  void CheckNodes() {
    for (const auto& [v, alloc] : emb_.allocations()) {
      if (!net_.has_node(v)) continue;
      const PhysicalNode& node = net_.node(v);
      const double used = alloc.Total() + model_.Overhead(alloc, node);
      if (used > node.cores + kTolerance) {
        Add(ConstraintFamily::kNodeCapacity,
            "node " + node.name + " uses " + Num(used) + " of " +
                Num(node.cores) + " cores",
            {v});
      }
      if (model_.mode == NodeModel::kSota &&
          !(Utilization(alloc, node) < model_.sota.saturation_cap)) {
        Add(ConstraintFamily::kNodeCapacity,
            "node " + node.name + " is at or above the saturation cap", {v});
      }
    }
  }

  // Source/destination, no spurious links, transit, self-loop rules and
  // continuity for each virtual link.
  void CheckRoutes() {
    for (const SfcInstance& sfc : scenario_.sfcs()) {
      for (int k = 0; k < sfc.num_vlinks(); ++k) {
        std::optional<NodeId> x =
            k == 0 ? std::optional<NodeId>(sfc.start)
                   : emb_.NodeOf({sfc.id, k - 1});
        std::optional<NodeId> y = k == sfc.length()
                                      ? std::optional<NodeId>(sfc.end)
                                      : emb_.NodeOf({sfc.id, k});
        auto it = emb_.link_paths().find({sfc.id, k});
        if (it == emb_.link_paths().end()) {
          Add(ConstraintFamily::kRouting,
              "virtual link " + std::to_string(k) + " of SFC " +
                  std::to_string(sfc.id) + " has no route",
              {sfc.id, k});
          continue;
        }
        if (!x || !y) continue;  // reported as an unmapped request
        CheckRoute(sfc, k, *x, *y, it->second.links);
      }
    }
    for (const auto& [key, path] : emb_.link_paths()) {
      if (!scenario_.has_sfc(key.sfc) || key.index < 0 ||
          key.index >= scenario_.sfc(key.sfc).num_vlinks()) {
        Add(ConstraintFamily::kRouting, "route for an unknown virtual link",
            {key.sfc, key.index});
      }
    }
  }

  void CheckRoute(const SfcInstance& sfc, int k, NodeId x, NodeId y,
                  const std::vector<LinkId>& links) {
    const std::string where = "virtual link " + std::to_string(k) +
                              " of SFC " + std::to_string(sfc.id);
    const std::vector<int> ids = {sfc.id, k};
    for (LinkId l : links) {
      if (l < 0 || l >= net_.num_links()) {
        Add(ConstraintFamily::kRouting, where + " uses an unknown link", ids);
        return;
      }
    }
    // Endpoint problems on the first and last virtual links are failures to
    // honour the fixed start/end points.
    const ConstraintFamily src_family =
        k == 0 ? ConstraintFamily::kFixedEndpoint : ConstraintFamily::kRouting;
    const ConstraintFamily dst_family = k == sfc.length()
                                            ? ConstraintFamily::kFixedEndpoint
                                            : ConstraintFamily::kRouting;

    std::map<NodeId, int> out_deg, in_deg;
    int self_loops = 0;
    for (LinkId l : links) {
      const PhysicalLink& link = net_.link(l);
      ++out_deg[link.from];
      ++in_deg[link.to];
      if (link.is_self_loop()) ++self_loops;
    }
    if (out_deg[x] != 1) {
      Add(src_family,
          where + " must leave " + NodeName(x) + " on exactly one link", ids);
    }
    if (in_deg[y] != 1) {
      Add(dst_family,
          where + " must enter " + NodeName(y) + " on exactly one link", ids);
    }
    if (x == y) {
      if (links.size() != 1 || self_loops != 1) {
        Add(ConstraintFamily::kRouting,
            where + " joins co-located hops and must use only the self-loop "
                    "of " + NodeName(x),
            ids);
      }
      return;
    }
    if (self_loops > 0) {
      Add(ConstraintFamily::kRouting,
          where + " uses a self-loop between distinct nodes", ids);
    }
    if (in_deg[x] != 0) {
      Add(src_family, where + " re-enters its source " + NodeName(x), ids);
    }
    if (out_deg[y] != 0) {
      Add(dst_family, where + " leaves its destination " + NodeName(y), ids);
    }
    for (const auto& [w, in] : in_deg) {
      if (w == x || w == y) continue;
      if (in != out_deg[w]) {
        Add(ConstraintFamily::kRouting,
            where + " breaks flow conservation at " + NodeName(w), ids);
      }
      if (in > 1) {
        Add(ConstraintFamily::kRouting,
            where + " splits at transit node " + NodeName(w), ids);
      }
    }
    for (const auto& [w, out] : out_deg) {
      if (w != x && w != y && !in_deg.contains(w)) {
        Add(ConstraintFamily::kRouting,
            where + " breaks flow conservation at " + NodeName(w), ids);
      }
    }
    NodeId at = x;
    for (LinkId l : links) {
      if (net_.link(l).from != at) {
        Add(ConstraintFamily::kRouting, where + " is not a continuous walk",
            ids);
        return;
      }
      at = net_.link(l).to;
    }
  }

  void CheckBandwidth() {
    std::map<LinkId, double> load;
    for (const auto& [key, path] : emb_.link_paths()) {
      if (!scenario_.has_sfc(key.sfc)) continue;
      const SfcInstance& sfc = scenario_.sfc(key.sfc);
      if (key.index < 0 || key.index >= sfc.num_vlinks()) continue;
      for (LinkId l : path.links) {
        if (l >= 0 && l < net_.num_links()) {
          load[l] += sfc.link_bandwidth[key.index];
        }
      }
    }
    for (const auto& [l, total] : load) {
      const PhysicalLink& link = net_.link(l);
      if (total > link.bandwidth + kTolerance) {
        Add(ConstraintFamily::kBandwidth,
            "link " + NodeName(link.from) + "->" + NodeName(link.to) +
                " carries " + Num(total) + " Mb/s over its " +
                Num(link.bandwidth),
            {l});
      }
    }
  }

  void CheckLatency() {
    for (const SfcInstance& sfc : scenario_.sfcs()) {
      bool complete = true;
      double route = 0.0;
      for (int k = 0; k < sfc.num_vlinks() && complete; ++k) {
        auto it = emb_.link_paths().find({sfc.id, k});
        if (it == emb_.link_paths().end()) {
          complete = false;
          break;
        }
        for (LinkId l : it->second.links) {
          if (l < 0 || l >= net_.num_links()) {
            complete = false;
            break;
          }
          route += net_.link(l).latency;
        }
      }
      double sigma = 0.0;
      for (const VnfRequest& r : sfc.requests) {
        auto v = emb_.NodeOf({sfc.id, r.position});
        if (!v || !net_.has_node(*v)) {
          complete = false;
          break;
        }
        const NodeAllocation& alloc = emb_.allocation(*v);
        const PhysicalNode& node = net_.node(*v);
        if (model_.mode == NodeModel::kSharing) {
          sigma += alloc.TotalProcesses() * node.costs.csw_latency +
                   ProcessCount(alloc.Get(r.vnf)) * node.costs.up_latency;
        } else {
          const double p = Utilization(alloc, node);
          sigma += p < model_.sota.saturation_cap
                       ? SotaLatencyAt(p, model_.sota)
                       : kInfinity;
        }
      }
      if (!complete) continue;
      const double total = route + sigma;
      if (!(total <= sfc.max_latency + kTolerance)) {
        Add(ConstraintFamily::kLatency,
            "SFC " + std::to_string(sfc.id) + " has end-to-end latency " +
                Num(total) + " ms over its bound " + Num(sfc.max_latency),
            {sfc.id});
      }
    }
  }

  void CheckActive() {
    std::set<NodeId> hosting;
    for (const auto& [v, alloc] : emb_.allocations()) {
      if (!alloc.empty()) hosting.insert(v);
    }
    for (NodeId v : hosting) {
      if (!emb_.active().contains(v)) {
        Add(ConstraintFamily::kActiveFlag,
            "node " + NodeName(v) + " hosts instances but is not active", {v});
      }
    }
    for (NodeId v : emb_.active()) {
      if (!hosting.contains(v)) {
        Add(ConstraintFamily::kActiveFlag,
            "node " + NodeName(v) + " is active but hosts nothing", {v});
      }
    }
  }

  const Embedding& emb_;
  const Scenario& scenario_;
  const PhysicalNetwork& net_;
  const CostModel& model_;
  ValidationReport report_;
};

}  // namespace

const char* ToString(ConstraintFamily family) {
  switch (family) {
    case ConstraintFamily::kFixedEndpoint:
      return "fixed_endpoint";
    case ConstraintFamily::kUniqueMapping:
      return "unique_mapping";
    case ConstraintFamily::kInstanceCapacity:
      return "instance_capacity";
    case ConstraintFamily::kInstancePresence:
      return "instance_presence";
    case ConstraintFamily::kNodeCapacity:
      return "node_capacity";
    case ConstraintFamily::kRouting:
      return "routing";
    case ConstraintFamily::kBandwidth:
      return "bandwidth";
    case ConstraintFamily::kLatency:
      return "latency";
    case ConstraintFamily::kActiveFlag:
      return "active_flag";
  }
  return "unknown";
}

bool ValidationReport::Has(ConstraintFamily family) const {
  for (const Violation& v : violations) {
    if (v.family == family) return true;
  }
  return false;
}

std::string ValidationReport::ToText() const {
  if (ok()) return "ok\n";
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << ToString(v.family) << ": " << v.detail << "\n";
  }
  return out.str();
}

ValidationReport Validate(const Embedding& emb, const Scenario& scenario,
                          const CostModel& model) {
  return Checker(emb, scenario, model).Run();
}

}  // namespace vnfcons
