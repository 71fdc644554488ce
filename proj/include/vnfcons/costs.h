#ifndef VNFCONS_COSTS_H_
#define VNFCONS_COSTS_H_

#include <map>
#include <stdexcept>

#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons {

// Absolute slack used for every real-valued feasibility comparison.
inline constexpr double kTolerance = 1e-9;

// Number of cores (processes) an instance of size `cores` spans: the
// ceiling, with values within kTolerance above an integer rounded down so
// that accumulated floating-point noise does not open an extra core.
int ProcessCount(double cores);

// Cores assigned per VNF type on one node. Absent entries mean no instance.
struct NodeAllocation {
  std::map<VnfId, double> cores;

  bool empty() const { return cores.empty(); }
  double Get(VnfId f) const;
  double Total() const;
  int TotalProcesses() const;

  bool operator==(const NodeAllocation&) const = default;
};

// Context switching: linear in the node's total process count.
double CswLatency(const NodeAllocation& alloc, const PhysicalNode& node);
double CswProcessing(const NodeAllocation& alloc, const PhysicalNode& node);

// Upscaling: linear in the number of cores one instance is balanced over.
double UpLatency(double cores, const PhysicalNode& node);
double UpProcessing(double cores, const PhysicalNode& node);

// Total processing lost to sharing on a node (psi).
double NodeProcessingOverhead(const NodeAllocation& alloc,
                              const PhysicalNode& node);

// cores - psi - sum of instance sizes.
double ResidualCapacity(const NodeAllocation& alloc, const PhysicalNode& node);

// Latency a request for VNF `f` picks up at this node.
double NodeLatency(const NodeAllocation& alloc, const PhysicalNode& node,
                   VnfId f);

class SaturationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Utilization-only node latency model used as a baseline.
struct SotaParams {
  int K = 100;
  double L = 10.0;
  double saturation_cap = 0.999;
};

double Utilization(const NodeAllocation& alloc, const PhysicalNode& node);

// (P - (1 + K(1-P)) P^(K+1)) / (L (1-P) (1-P^K)); 0 at P = 0.
// Throws SaturationError when P >= params.saturation_cap.
double SotaLatencyAt(double utilization, const SotaParams& params);
double SotaLatency(const NodeAllocation& alloc, const PhysicalNode& node,
                   const SotaParams& params);

enum class NodeModel { kSharing, kSota };

const char* ToString(NodeModel mode);
NodeModel ParseNodeModel(std::string_view text);

// Which node cost model drives capacity and latency decisions.
struct CostModel {
  NodeModel mode = NodeModel::kSharing;
  SotaParams sota;

  // Processing overhead; the utilization model charges none.
  double Overhead(const NodeAllocation& alloc, const PhysicalNode& node) const;
  double Residual(const NodeAllocation& alloc, const PhysicalNode& node) const;
  // Capacity holds (and, for the utilization model, the node is below the
  // saturation cap).
  bool Admissible(const NodeAllocation& alloc, const PhysicalNode& node) const;
  // Per-request node latency; +inf for a saturated node.
  double RequestLatency(const NodeAllocation& alloc, const PhysicalNode& node,
                        VnfId f) const;
};

// Relation between latency and processing parameters under coupling h.
//   kProcessingFromLatency: xi = h * omega, mu = h * kappa (default)
//   kLatencyFromProcessing: omega = h * xi, kappa = h * mu
enum class CouplingOrientation { kProcessingFromLatency, kLatencyFromProcessing };

const char* ToString(CouplingOrientation orientation);
CouplingOrientation ParseCouplingOrientation(std::string_view text);

// Throws std::invalid_argument for negative inputs, or h = 0 with the
// literal orientation and a nonzero latency parameter.
NodeCostParams CoupledCosts(double omega, double kappa, double h,
                            CouplingOrientation orientation =
                                CouplingOrientation::kProcessingFromLatency);

}  // namespace vnfcons

#endif  // VNFCONS_COSTS_H_
