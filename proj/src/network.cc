#include "vnfcons/network.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "json_util.h"

namespace vnfcons {

namespace {

void CheckNonNegative(double value, const std::string& what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(what + " must be finite and >= 0");
  }
}

}  // namespace

PhysicalNetwork PhysicalNetwork::Build(std::vector<PhysicalNode> nodes,
                                       const std::vector<LinkSpec>& links) {
  if (nodes.empty()) throw ValidationError("topology has no nodes");
  PhysicalNetwork net;
  std::set<std::string> names;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    PhysicalNode& n = nodes[i];
    n.id = static_cast<NodeId>(i);
    if (n.name.empty()) n.name = std::to_string(i);
    if (!names.insert(n.name).second) {
      throw ValidationError("duplicate node id '" + n.name + "'");
    }
    CheckNonNegative(n.cores, "cores of node " + n.name);
    CheckNonNegative(n.costs.csw_latency, "omega of node " + n.name);
    CheckNonNegative(n.costs.csw_processing, "xi of node " + n.name);
    CheckNonNegative(n.costs.up_latency, "kappa of node " + n.name);
    CheckNonNegative(n.costs.up_processing, "mu of node " + n.name);
  }
  net.nodes_ = std::move(nodes);
  const int n = net.num_nodes();

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const LinkSpec& spec : links) {
    if (spec.from < 0 || spec.from >= n || spec.to < 0 || spec.to >= n) {
      throw ValidationError("link references an unknown node");
    }
    const std::string label = net.nodes_[spec.from].name + "->" +
                              net.nodes_[spec.to].name;
    CheckNonNegative(spec.latency, "latency of link " + label);
    if (std::isnan(spec.bandwidth) || spec.bandwidth <= 0.0) {
      throw ValidationError("bandwidth of link " + label + " must be > 0");
    }
    if (spec.from == spec.to) {
      if (spec.latency != 0.0) {
        throw ValidationError("explicit self-loop " + label +
                              " must have zero latency");
      }
      if (!net.nodes_[spec.from].is_nfv()) {
        throw ValidationError("self-loop on forwarding-only node " +
                              net.nodes_[spec.from].name);
      }
      continue;  // inserted below
    }
    if (!seen.insert({spec.from, spec.to}).second) {
      throw ValidationError("duplicate link " + label);
    }
    PhysicalLink l;
    l.id = static_cast<LinkId>(net.links_.size());
    l.from = spec.from;
    l.to = spec.to;
    l.bandwidth = spec.bandwidth;
    l.latency = spec.latency;
    net.links_.push_back(l);
  }
  for (const PhysicalNode& node : net.nodes_) {
    if (!node.is_nfv()) continue;
    PhysicalLink l;
    l.id = static_cast<LinkId>(net.links_.size());
    l.from = l.to = node.id;
    l.bandwidth = kInfinity;
    l.latency = 0.0;
    net.links_.push_back(l);
  }

  net.out_.assign(n, {});
  net.in_.assign(n, {});
  for (const PhysicalLink& l : net.links_) {
    net.out_[l.from].push_back(l.id);
    net.in_[l.to].push_back(l.id);
  }

  // Weak connectivity on the undirected projection.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const PhysicalLink& l : net.links_) {
    int a = find(l.from), b = find(l.to);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  if (components != 1) throw ValidationError("topology is not connected");

  for (const auto& [from, to] : seen) {
    if (!seen.contains({to, from})) {
      net.warnings_.push_back("asymmetric link " + net.nodes_[from].name +
                              "->" + net.nodes_[to].name);
    }
  }
  return net;
}

std::optional<LinkId> PhysicalNetwork::self_loop(NodeId v) const {
  return FindLink(v, v);
}

std::optional<LinkId> PhysicalNetwork::FindLink(NodeId from, NodeId to) const {
  if (!has_node(from) || !has_node(to)) return std::nullopt;
  for (LinkId l : out_[from]) {
    if (links_[l].to == to) return l;
  }
  return std::nullopt;
}

std::optional<NodeId> PhysicalNetwork::FindNode(std::string_view name) const {
  for (const PhysicalNode& n : nodes_) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

std::vector<NodeId> PhysicalNetwork::NfvNodes() const {
  std::vector<NodeId> out;
  for (const PhysicalNode& n : nodes_) {
    if (n.is_nfv()) out.push_back(n.id);
  }
  return out;
}

PhysicalNetwork PhysicalNetwork::WithUniformCosts(
    const NodeCostParams& params) const {
  PhysicalNetwork copy = *this;
  for (PhysicalNode& n : copy.nodes_) {
    if (n.is_nfv()) n.costs = params;
  }
  return copy;
}

PhysicalNetwork LoadTopology(std::string_view text) {
  using nlohmann::json;
  json doc = json_util::ParseDocument(text, "topology");
  json_util::RequireObject(doc, "topology");
  json_util::CheckKeys(doc, {"name", "description", "nodes", "links",
                             "bidirectional"},
                       "topology");
  const bool bidirectional =
      json_util::GetOr<bool>(doc, "bidirectional", false, "topology");

  std::vector<PhysicalNode> nodes;
  std::map<std::string, NodeId> by_name;
  for (const json& jn : json_util::GetArray(doc, "nodes", "topology")) {
    json_util::RequireObject(jn, "node");
    json_util::CheckKeys(jn, {"id", "cores", "omega", "xi", "kappa", "mu"},
                         "node");
    PhysicalNode n;
    n.name = json_util::GetName(jn, "id", "node");
    n.cores = json_util::Get<double>(jn, "cores", "node " + n.name);
    n.costs.csw_latency = json_util::GetOr<double>(jn, "omega", 0.0, "node");
    n.costs.csw_processing = json_util::GetOr<double>(jn, "xi", 0.0, "node");
    n.costs.up_latency = json_util::GetOr<double>(jn, "kappa", 0.0, "node");
    n.costs.up_processing = json_util::GetOr<double>(jn, "mu", 0.0, "node");
    if (by_name.contains(n.name)) {
      throw ValidationError("duplicate node id '" + n.name + "'");
    }
    by_name[n.name] = static_cast<NodeId>(nodes.size());
    nodes.push_back(std::move(n));
  }

  auto resolve = [&](const std::string& name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw ValidationError("link references unknown node '" + name + "'");
    }
    return it->second;
  };

  std::vector<LinkSpec> links;
  if (doc.contains("links")) {
    for (const json& jl : json_util::GetArray(doc, "links", "topology")) {
      json_util::RequireObject(jl, "link");
      json_util::CheckKeys(jl, {"from", "to", "latency_ms", "bandwidth_mbps"},
                           "link");
      LinkSpec spec;
      spec.from = resolve(json_util::GetName(jl, "from", "link"));
      spec.to = resolve(json_util::GetName(jl, "to", "link"));
      spec.latency = json_util::Get<double>(jl, "latency_ms", "link");
      spec.bandwidth = jl.contains("bandwidth_mbps")
                           ? json_util::GetBandwidth(jl, "bandwidth_mbps")
                           : kInfinity;
      links.push_back(spec);
      if (bidirectional && spec.from != spec.to) {
        std::swap(spec.from, spec.to);
        links.push_back(spec);
      }
    }
  }
  return PhysicalNetwork::Build(std::move(nodes), links);
}

PhysicalNetwork LoadTopologyFile(const std::filesystem::path& file) {
  return LoadTopology(json_util::ReadFile(file));
}

std::string SerializeTopology(const PhysicalNetwork& net) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["bidirectional"] = false;
  doc["nodes"] = ordered_json::array();
  for (const PhysicalNode& n : net.nodes()) {
    ordered_json jn;
    jn["id"] = n.name;
    jn["cores"] = n.cores;
    jn["omega"] = n.costs.csw_latency;
    jn["xi"] = n.costs.csw_processing;
    jn["kappa"] = n.costs.up_latency;
    jn["mu"] = n.costs.up_processing;
    doc["nodes"].push_back(jn);
  }
  doc["links"] = ordered_json::array();
  for (const PhysicalLink& l : net.links()) {
    if (l.is_self_loop()) continue;
    ordered_json jl;
    jl["from"] = net.node(l.from).name;
    jl["to"] = net.node(l.to).name;
    jl["latency_ms"] = l.latency;
    if (std::isinf(l.bandwidth)) {
      jl["bandwidth_mbps"] = "inf";
    } else {
      jl["bandwidth_mbps"] = l.bandwidth;
    }
    doc["links"].push_back(jl);
  }
  return doc.dump(2) + "\n";
}

double SumLatency(const PhysicalNetwork& net,
                  const std::vector<LinkId>& links) {
  double total = 0.0;
  for (LinkId l : links) total += net.link(l).latency;
  return total;
}

}  // namespace vnfcons
