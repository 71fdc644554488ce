#include <utility>

#include "json.hpp"
#include "json_util.h"
#include "vnfcons/embedding.h"

namespace vnfcons {

Path PathFromNodes(const PhysicalNetwork& net,
                   const std::vector<NodeId>& nodes) {
  if (nodes.empty()) throw ValidationError("a route needs at least one node");
  Path p;
  p.source = nodes.front();
  p.target = nodes.back();
  p.nodes = nodes;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto l = net.FindLink(nodes[i], nodes[i + 1]);
    if (!l) {
      throw ValidationError("no link " + net.node(nodes[i]).name + "->" +
                            net.node(nodes[i + 1]).name);
    }
    p.links.push_back(*l);
  }
  p.total_latency = SumLatency(net, p.links);
  return p;
}

std::string SerializeEmbedding(const Embedding& emb, const Scenario& scenario) {
  using nlohmann::ordered_json;
  const PhysicalNetwork& net = scenario.network();
  ordered_json doc;
  doc["allocations"] = ordered_json::array();
  for (const auto& [v, alloc] : emb.allocations()) {
    for (const auto& [f, c] : alloc.cores) {
      ordered_json ja;
      ja["node"] = net.node(v).name;
      ja["vnf"] = scenario.catalog().vnf(f).symbol;
      ja["cores"] = c;
      doc["allocations"].push_back(ja);
    }
  }
  doc["requests"] = ordered_json::array();
  for (const auto& [key, v] : emb.request_map()) {
    ordered_json jr;
    jr["sfc"] = key.sfc;
    jr["position"] = key.position;
    jr["node"] = net.node(v).name;
    doc["requests"].push_back(jr);
  }
  doc["paths"] = ordered_json::array();
  for (const auto& [key, path] : emb.link_paths()) {
    ordered_json jp;
    jp["sfc"] = key.sfc;
    jp["vlink"] = key.index;
    jp["nodes"] = ordered_json::array();
    jp["nodes"].push_back(net.node(path.source).name);
    for (LinkId l : path.links) jp["nodes"].push_back(net.node(net.link(l).to).name);
    doc["paths"].push_back(jp);
  }
  doc["active"] = ordered_json::array();
  for (NodeId v : emb.active()) doc["active"].push_back(net.node(v).name);
  return doc.dump(2) + "\n";
}

Embedding ParseEmbedding(std::string_view text, const Scenario& scenario) {
  using nlohmann::json;
  const PhysicalNetwork& net = scenario.network();
  json doc = json_util::ParseDocument(text, "embedding");
  json_util::RequireObject(doc, "embedding");
  json_util::CheckKeys(doc, {"allocations", "requests", "paths", "active"},
                       "embedding");
  auto node = [&](const json& j, const std::string& key) {
    const std::string name = json_util::GetName(j, key, "embedding");
    auto v = net.FindNode(name);
    if (!v) throw ValidationError("embedding references unknown node '" + name + "'");
    return *v;
  };

  Embedding emb;
  if (doc.contains("allocations")) {
    for (const json& ja : json_util::GetArray(doc, "allocations", "embedding")) {
      json_util::RequireObject(ja, "allocation");
      json_util::CheckKeys(ja, {"node", "vnf", "cores"}, "allocation");
      const std::string symbol = json_util::GetName(ja, "vnf", "allocation");
      auto f = scenario.catalog().FindVnf(symbol);
      if (!f) throw ValidationError("embedding references unknown VNF '" + symbol + "'");
      emb.SetAllocation(node(ja, "node"), *f,
                        json_util::Get<double>(ja, "cores", "allocation"));
    }
  }
  if (doc.contains("requests")) {
    for (const json& jr : json_util::GetArray(doc, "requests", "embedding")) {
      json_util::RequireObject(jr, "request");
      json_util::CheckKeys(jr, {"sfc", "position", "node"}, "request");
      emb.SetRequestNode({json_util::Get<int>(jr, "sfc", "request"),
                          json_util::Get<int>(jr, "position", "request")},
                         node(jr, "node"));
    }
  }
  if (doc.contains("paths")) {
    for (const json& jp : json_util::GetArray(doc, "paths", "embedding")) {
      json_util::RequireObject(jp, "path");
      json_util::CheckKeys(jp, {"sfc", "vlink", "nodes"}, "path");
      std::vector<NodeId> nodes;
      for (const json& jn : json_util::GetArray(jp, "nodes", "path")) {
        json wrapper = {{"n", jn}};
        nodes.push_back(node(wrapper, "n"));
      }
      emb.SetPath(scenario,
                  {json_util::Get<int>(jp, "sfc", "path"),
                   json_util::Get<int>(jp, "vlink", "path")},
                  PathFromNodes(net, nodes));
    }
  }
  if (doc.contains("active")) {
    std::set<NodeId> active;
    for (const json& jn : json_util::GetArray(doc, "active", "embedding")) {
      json wrapper = {{"n", jn}};
      active.insert(node(wrapper, "n"));
    }
    emb.SetActive(std::move(active));
  } else {
    emb.RefreshActive();
  }
  return emb;
}

}  // namespace vnfcons
