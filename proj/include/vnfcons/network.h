#ifndef VNFCONS_NETWORK_H_
#define VNFCONS_NETWORK_H_

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vnfcons {

using NodeId = int;
using LinkId = int;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Raised for malformed input text (syntax, unknown keys, wrong types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when well-formed input violates a model invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-node resource-sharing cost parameters.
struct NodeCostParams {
  double csw_latency = 0.0;     // ms per process
  double csw_processing = 0.0;  // cores per process
  double up_latency = 0.0;      // ms per balanced core
  double up_processing = 0.0;   // cores per balanced core

  bool operator==(const NodeCostParams&) const = default;
};

struct PhysicalNode {
  NodeId id = 0;
  std::string name;
  // Number of CPU cores; zero means forwarding-only.
  double cores = 0.0;
  NodeCostParams costs;

  bool is_nfv() const { return cores > 0.0; }
};

struct PhysicalLink {
  LinkId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double bandwidth = kInfinity;  // Mb/s
  double latency = 0.0;          // ms

  bool is_self_loop() const { return from == to; }
};

// A loopless physical route. A route from a node to itself is the node's
// self-loop (or empty for a forwarding-only node).
struct Path {
  NodeId source = 0;
  NodeId target = 0;
  std::vector<LinkId> links;
  std::vector<NodeId> nodes;
  double total_latency = 0.0;

  bool operator==(const Path&) const = default;
};

// Link description before self-loop insertion and id assignment.
struct LinkSpec {
  NodeId from = 0;
  NodeId to = 0;
  double bandwidth = kInfinity;
  double latency = 0.0;
};

// Immutable directed graph with auto-inserted self-loops on NFV nodes.
class PhysicalNetwork {
 public:
  PhysicalNetwork() = default;

  // Validates and builds. Node ids are reassigned densely in input order.
  // Throws ValidationError.
  static PhysicalNetwork Build(std::vector<PhysicalNode> nodes,
                               const std::vector<LinkSpec>& links);

  const std::vector<PhysicalNode>& nodes() const { return nodes_; }
  const std::vector<PhysicalLink>& links() const { return links_; }
  const PhysicalNode& node(NodeId v) const { return nodes_.at(v); }
  const PhysicalLink& link(LinkId l) const { return links_.at(l); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_links() const { return static_cast<int>(links_.size()); }
  bool has_node(NodeId v) const { return v >= 0 && v < num_nodes(); }

  const std::vector<LinkId>& out_links(NodeId v) const { return out_.at(v); }
  const std::vector<LinkId>& in_links(NodeId v) const { return in_.at(v); }
  std::optional<LinkId> self_loop(NodeId v) const;
  std::optional<LinkId> FindLink(NodeId from, NodeId to) const;
  std::optional<NodeId> FindNode(std::string_view name) const;
  std::vector<NodeId> NfvNodes() const;

  // Non-fatal notes collected during Build (asymmetric links).
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Copy with every NFV node's cost parameters replaced.
  PhysicalNetwork WithUniformCosts(const NodeCostParams& params) const;

 private:
  std::vector<PhysicalNode> nodes_;
  std::vector<PhysicalLink> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
  std::vector<std::string> warnings_;
};

// Strict JSON topology reader:
//   {"nodes": [{"id", "cores", "omega", "xi", "kappa", "mu"}],
//    "links": [{"from", "to", "latency_ms", "bandwidth_mbps"}],
//    "bidirectional": bool}
// Throws ParseError or ValidationError.
PhysicalNetwork LoadTopology(std::string_view text);
PhysicalNetwork LoadTopologyFile(const std::filesystem::path& file);
std::string SerializeTopology(const PhysicalNetwork& net);

// Sums link latencies in path order.
double SumLatency(const PhysicalNetwork& net, const std::vector<LinkId>& links);

// Minimum-latency path over non-self-loop links; ties go to the
// lexicographically smallest node sequence. Throws std::out_of_range on bad
// ids and std::runtime_error if b is unreachable from a.
Path ShortestPath(const PhysicalNetwork& net, NodeId a, NodeId b);

// Up to k loopless paths ordered by (latency, node sequence).
std::vector<Path> KShortestPaths(const PhysicalNetwork& net, NodeId a,
                                 NodeId b, int k);

// Lowest-latency loopless path touching an NFV node. k grows 4, 8, 16, ...
// up to k_max. Throws std::runtime_error when no such path is found.
Path FirstNfvPath(const PhysicalNetwork& net, NodeId a, NodeId b,
                  int k_max = 64);

bool PathTouchesNfv(const PhysicalNetwork& net, const Path& path);

// Per-network memo of shortest and k-shortest paths. Not thread-safe.
class RoutingTable {
 public:
  explicit RoutingTable(const PhysicalNetwork& net);

  const Path& Shortest(NodeId a, NodeId b) const;
  bool Reachable(NodeId a, NodeId b) const {
    return shortest_.at(a).at(b).has_value();
  }
  double Distance(NodeId a, NodeId b) const {
    return Reachable(a, b) ? Shortest(a, b).total_latency : kInfinity;
  }
  // May hold more than k paths if a larger k was requested earlier.
  const std::vector<Path>& KShortest(NodeId a, NodeId b, int k) const;

 private:
  const PhysicalNetwork* net_;
  std::vector<std::vector<std::optional<Path>>> shortest_;
  mutable std::vector<std::vector<std::pair<int, std::vector<Path>>>>
      k_shortest_;
};

}  // namespace vnfcons

#endif  // VNFCONS_NETWORK_H_
