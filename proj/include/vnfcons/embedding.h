#ifndef VNFCONS_EMBEDDING_H_
#define VNFCONS_EMBEDDING_H_

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vnfcons/costs.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons {

struct RequestKey {
  SfcId sfc = 0;
  int position = 0;
  auto operator<=>(const RequestKey&) const = default;
};

// Virtual link `index` of an SFC: index i < length enters request i, index
// length leaves the last request for the end point.
struct VlinkKey {
  SfcId sfc = 0;
  int index = 0;
  auto operator<=>(const VlinkKey&) const = default;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decision state of an embedding: instance sizes, request placement,
// virtual-link routes, active nodes and per-link bandwidth load.
class Embedding {
 public:
  const std::map<NodeId, NodeAllocation>& allocations() const {
    return allocations_;
  }
  const std::map<RequestKey, NodeId>& request_map() const {
    return request_map_;
  }
  const std::map<VlinkKey, Path>& link_paths() const { return link_paths_; }
  const std::set<NodeId>& active() const { return active_; }
  const std::map<LinkId, double>& link_load() const { return link_load_; }

  // Empty allocation for nodes hosting nothing.
  const NodeAllocation& allocation(NodeId v) const;
  double cores(NodeId v, VnfId f) const { return allocation(v).Get(f); }
  std::optional<NodeId> NodeOf(const RequestKey& key) const;
  int num_active() const { return static_cast<int>(active_.size()); }

  // Maps `request` onto `node`, growing (or creating) the node's instance of
  // the requested VNF by the request's processing and routing the incoming
  // virtual link over `path_from_prev`. All-or-nothing: throws CapacityError
  // if the node would exceed its capacity, std::invalid_argument if the path
  // does not join the previous hop to `node` or the request is already
  // mapped.
  void ApplyMapping(const Scenario& scenario, const CostModel& model,
                    const VnfRequest& request, NodeId node,
                    Path path_from_prev);

  // Routes the last virtual link (last request -> end point).
  void ConnectEnd(const Scenario& scenario, SfcId sfc, Path path);

  // Unmaps every request of `sfc`, shrinking the instances it used and
  // dropping instances that reach zero. No-op for an unmapped SFC.
  void ReleaseSfc(const Scenario& scenario, SfcId sfc);

  // Raw edits used by deserialization and fault injection. They keep
  // link_load consistent but no other invariant.
  void SetAllocation(NodeId v, VnfId f, double cores);
  void EraseAllocation(NodeId v, VnfId f);
  void SetRequestNode(const RequestKey& key, NodeId v);
  void EraseRequest(const RequestKey& key);
  void SetPath(const Scenario& scenario, const VlinkKey& key, Path path);
  void SetActive(std::set<NodeId> active) { active_ = std::move(active); }
  void RefreshActive();

 private:
  void AddLoad(const Path& path, double bandwidth);

  std::map<NodeId, NodeAllocation> allocations_;
  std::map<RequestKey, NodeId> request_map_;
  std::map<VlinkKey, Path> link_paths_;
  std::set<NodeId> active_;
  std::map<LinkId, double> link_load_;
};

// Same mappings, routes and active set; reals compared within `tol`.
bool ApproxEqual(const Embedding& a, const Embedding& b,
                 double tol = kTolerance);

// Sum of the propagation latency of an SFC's routed virtual links.
double RouteLatency(const Embedding& emb, const Scenario& scenario,
                    const SfcInstance& sfc);

// Node-induced latency of an SFC: the per-request node latency summed over
// its mapped requests (a node hosting two requests counts twice).
double SfcLatencyOverhead(const Embedding& emb, const Scenario& scenario,
                          const SfcInstance& sfc, const CostModel& model);

double EndToEndLatency(const Embedding& emb, const Scenario& scenario,
                       const SfcInstance& sfc, const CostModel& model);

enum class ConstraintFamily {
  kFixedEndpoint,
  kUniqueMapping,
  kInstanceCapacity,
  kInstancePresence,
  kNodeCapacity,
  kRouting,
  kBandwidth,
  kLatency,
  kActiveFlag,
};

const char* ToString(ConstraintFamily family);

struct Violation {
  ConstraintFamily family;
  std::string detail;
  std::vector<int> ids;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(ConstraintFamily family) const;
  std::string ToText() const;
};

// Checks every constraint family of the placement model directly against
// the embedding's allocations, mappings, routes and active set.
ValidationReport Validate(const Embedding& emb, const Scenario& scenario,
                          const CostModel& model);

// JSON embedding file:
//   {"allocations": [{"node", "vnf", "cores"}],
//    "requests": [{"sfc", "position", "node"}],
//    "paths": [{"sfc", "vlink", "nodes": [node ids]}],
//    "active": [node ids]}
// Nodes and VNFs are referenced by their file ids. "active" defaults to the
// nodes that host an allocation.
std::string SerializeEmbedding(const Embedding& emb, const Scenario& scenario);
Embedding ParseEmbedding(std::string_view text, const Scenario& scenario);

// Builds a path from a node sequence; a repeated node is its self-loop.
// Throws ValidationError if a hop has no link.
Path PathFromNodes(const PhysicalNetwork& net,
                   const std::vector<NodeId>& nodes);

}  // namespace vnfcons

#endif  // VNFCONS_EMBEDDING_H_
