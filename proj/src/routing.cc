#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "vnfcons/network.h"

namespace vnfcons {

namespace {

// Total order on paths: latency first, then the node sequence.
struct PathLess {
  bool operator()(const Path& a, const Path& b) const {
    return std::tie(a.total_latency, a.nodes) <
           std::tie(b.total_latency, b.nodes);
  }
};

Path TrivialPath(const PhysicalNetwork& net, NodeId a) {
  Path p;
  p.source = p.target = a;
  p.nodes = {a};
  if (auto loop = net.self_loop(a)) {
    p.links = {*loop};
    p.nodes.push_back(a);
  }
  p.total_latency = SumLatency(net, p.links);
  return p;
}

Path FromLinks(const PhysicalNetwork& net, NodeId a,
               const std::vector<LinkId>& links) {
  Path p;
  p.source = a;
  p.links = links;
  p.nodes = {a};
  for (LinkId l : links) p.nodes.push_back(net.link(l).to);
  p.target = p.nodes.back();
  p.total_latency = SumLatency(net, links);
  return p;
}

struct Label {
  double dist = 0.0;
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;

  bool operator<(const Label& o) const {
    return std::tie(dist, nodes) < std::tie(o.dist, o.nodes);
  }
};

// Dijkstra over full-path labels so that equal-latency ties resolve to the
// lexicographically smallest node sequence. Self-loops are never used.
std::optional<Path> ConstrainedShortest(const PhysicalNetwork& net, NodeId a,
                                        NodeId b,
                                        const std::vector<bool>& banned_node,
                                        const std::vector<bool>& banned_link) {
  const int n = net.num_nodes();
  std::vector<std::optional<Label>> best(n);
  std::vector<bool> settled(n, false);
  std::set<Label> open;
  best[a] = Label{0.0, {a}, {}};
  open.insert(*best[a]);
  while (!open.empty()) {
    Label cur = *open.begin();
    open.erase(open.begin());
    const NodeId u = cur.nodes.back();
    if (settled[u]) continue;
    settled[u] = true;
    if (u == b) break;
    for (LinkId l : net.out_links(u)) {
      const PhysicalLink& link = net.link(l);
      if (link.is_self_loop() || banned_link[l]) continue;
      const NodeId v = link.to;
      if (settled[v] || banned_node[v]) continue;
      Label next{cur.dist + link.latency, cur.nodes, cur.links};
      next.nodes.push_back(v);
      next.links.push_back(l);
      if (!best[v] || next < *best[v]) {
        if (best[v]) open.erase(*best[v]);
        best[v] = next;
        open.insert(next);
      }
    }
  }
  if (!settled[b]) return std::nullopt;
  return FromLinks(net, a, best[b]->links);
}

void CheckNodes(const PhysicalNetwork& net, NodeId a, NodeId b) {
  if (!net.has_node(a) || !net.has_node(b)) {
    throw std::out_of_range("path endpoint is not a node of the network");
  }
}

}  // namespace

Path ShortestPath(const PhysicalNetwork& net, NodeId a, NodeId b) {
  CheckNodes(net, a, b);
  if (a == b) return TrivialPath(net, a);
  std::vector<bool> no_nodes(net.num_nodes(), false);
  std::vector<bool> no_links(net.num_links(), false);
  auto p = ConstrainedShortest(net, a, b, no_nodes, no_links);
  if (!p) {
    throw std::runtime_error("node " + net.node(b).name +
                             " is unreachable from " + net.node(a).name);
  }
  return *p;
}

// Yen's algorithm.
std::vector<Path> KShortestPaths(const PhysicalNetwork& net, NodeId a,
                                 NodeId b, int k) {
  CheckNodes(net, a, b);
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (a == b) return {TrivialPath(net, a)};

  std::vector<Path> accepted;
  std::vector<bool> no_nodes(net.num_nodes(), false);
  std::vector<bool> no_links(net.num_links(), false);
  auto first = ConstrainedShortest(net, a, b, no_nodes, no_links);
  if (!first) return accepted;
  accepted.push_back(*first);

  std::set<Path, PathLess> candidates;
  while (static_cast<int>(accepted.size()) < k) {
    const Path& prev = accepted.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeId spur = prev.nodes[i];
      std::vector<bool> banned_node(net.num_nodes(), false);
      std::vector<bool> banned_link(net.num_links(), false);
      for (std::size_t j = 0; j < i; ++j) banned_node[prev.nodes[j]] = true;
      for (const Path& p : accepted) {
        if (p.nodes.size() > i + 1 &&
            std::equal(p.nodes.begin(), p.nodes.begin() + i + 1,
                       prev.nodes.begin())) {
          banned_link[p.links[i]] = true;
        }
      }
      auto spur_path =
          ConstrainedShortest(net, spur, b, banned_node, banned_link);
      if (!spur_path) continue;
      std::vector<LinkId> links(prev.links.begin(), prev.links.begin() + i);
      links.insert(links.end(), spur_path->links.begin(),
                   spur_path->links.end());
      Path candidate = FromLinks(net, a, links);
      if (std::find(accepted.begin(), accepted.end(), candidate) ==
          accepted.end()) {
        candidates.insert(std::move(candidate));
      }
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

bool PathTouchesNfv(const PhysicalNetwork& net, const Path& path) {
  return std::any_of(path.nodes.begin(), path.nodes.end(),
                     [&](NodeId v) { return net.node(v).is_nfv(); });
}

Path FirstNfvPath(const PhysicalNetwork& net, NodeId a, NodeId b, int k_max) {
  CheckNodes(net, a, b);
  std::size_t examined = 0;
  for (int k = 4;; k *= 2) {
    const int limit = std::min(k, k_max);
    std::vector<Path> paths = KShortestPaths(net, a, b, limit);
    for (; examined < paths.size(); ++examined) {
      if (PathTouchesNfv(net, paths[examined])) return paths[examined];
    }
    if (limit >= k_max || static_cast<int>(paths.size()) < limit) break;
  }
  throw std::runtime_error("no path between " + net.node(a).name + " and " +
                           net.node(b).name + " crosses an NFV node");
}

RoutingTable::RoutingTable(const PhysicalNetwork& net) : net_(&net) {
  const int n = net.num_nodes();
  shortest_.resize(n);
  k_shortest_.assign(n, std::vector<std::pair<int, std::vector<Path>>>(n));
  std::vector<bool> no_nodes(n, false);
  std::vector<bool> no_links(net.num_links(), false);
  for (NodeId a = 0; a < n; ++a) {
    shortest_[a].resize(n);
    for (NodeId b = 0; b < n; ++b) {
      shortest_[a][b] = a == b ? TrivialPath(net, a)
                               : ConstrainedShortest(net, a, b, no_nodes,
                                                     no_links);
    }
  }
}

const Path& RoutingTable::Shortest(NodeId a, NodeId b) const {
  const std::optional<Path>& p = shortest_.at(a).at(b);
  if (!p) {
    throw std::runtime_error("node " + net_->node(b).name +
                             " is unreachable from " + net_->node(a).name);
  }
  return *p;
}

const std::vector<Path>& RoutingTable::KShortest(NodeId a, NodeId b,
                                                 int k) const {
  auto& [computed_k, paths] = k_shortest_.at(a).at(b);
  if (computed_k < k) {
    paths = KShortestPaths(*net_, a, b, k);
    computed_k = k;
  }
  return paths;
}

}  // namespace vnfcons
