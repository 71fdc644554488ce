#include "vnfcons/costs.h"

#include <cmath>
#include <string>

namespace vnfcons {

namespace {

// x^n by repeated squaring; n >= 0.
double PowInt(double x, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

}  // namespace

int ProcessCount(double cores) {
  if (cores <= kTolerance) return 0;
  return static_cast<int>(std::ceil(cores - kTolerance));
}

double NodeAllocation::Get(VnfId f) const {
  auto it = cores.find(f);
  return it == cores.end() ? 0.0 : it->second;
}

double NodeAllocation::Total() const {
  double total = 0.0;
  for (const auto& [f, c] : cores) total += c;
  return total;
}

int NodeAllocation::TotalProcesses() const {
  int total = 0;
  for (const auto& [f, c] : cores) total += ProcessCount(c);
  return total;
}

double CswLatency(const NodeAllocation& alloc, const PhysicalNode& node) {
  return alloc.TotalProcesses() * node.costs.csw_latency;
}

double CswProcessing(const NodeAllocation& alloc, const PhysicalNode& node) {
  return alloc.TotalProcesses() * node.costs.csw_processing;
}

double UpLatency(double cores, const PhysicalNode& node) {
  return ProcessCount(cores) * node.costs.up_latency;
}

double UpProcessing(double cores, const PhysicalNode& node) {
  return ProcessCount(cores) * node.costs.up_processing;
}

double NodeProcessingOverhead(const NodeAllocation& alloc,
                              const PhysicalNode& node) {
  double psi = CswProcessing(alloc, node);
  for (const auto& [f, c] : alloc.cores) psi += UpProcessing(c, node);
  return psi;
}

double ResidualCapacity(const NodeAllocation& alloc, const PhysicalNode& node) {
  return node.cores - NodeProcessingOverhead(alloc, node) - alloc.Total();
}

double NodeLatency(const NodeAllocation& alloc, const PhysicalNode& node,
                   VnfId f) {
  return CswLatency(alloc, node) + UpLatency(alloc.Get(f), node);
}

double Utilization(const NodeAllocation& alloc, const PhysicalNode& node) {
  if (node.cores <= 0.0) return alloc.empty() ? 0.0 : kInfinity;
  return alloc.Total() / node.cores;
}

double SotaLatencyAt(double p, const SotaParams& params) {
  if (!(p < params.saturation_cap)) {
    throw SaturationError("node utilization " + std::to_string(p) +
                          " reaches the saturation cap");
  }
  if (p <= 0.0) return 0.0;
  const double p_k = PowInt(p, params.K);
  const double numerator = p - (1.0 + params.K * (1.0 - p)) * p_k * p;
  const double denominator = params.L * (1.0 - p) * (1.0 - p_k);
  return numerator / denominator;
}

double SotaLatency(const NodeAllocation& alloc, const PhysicalNode& node,
                   const SotaParams& params) {
  return SotaLatencyAt(Utilization(alloc, node), params);
}

const char* ToString(NodeModel mode) {
  return mode == NodeModel::kSharing ? "sharing" : "sota";
}

NodeModel ParseNodeModel(std::string_view text) {
  if (text == "sharing") return NodeModel::kSharing;
  if (text == "sota") return NodeModel::kSota;
  throw std::invalid_argument("unknown node model '" + std::string(text) +
                              "' (expected sharing|sota)");
}

double CostModel::Overhead(const NodeAllocation& alloc,
                           const PhysicalNode& node) const {
  return mode == NodeModel::kSharing ? NodeProcessingOverhead(alloc, node)
                                     : 0.0;
}

double CostModel::Residual(const NodeAllocation& alloc,
                           const PhysicalNode& node) const {
  return node.cores - Overhead(alloc, node) - alloc.Total();
}

bool CostModel::Admissible(const NodeAllocation& alloc,
                           const PhysicalNode& node) const {
  if (Residual(alloc, node) < -kTolerance) return false;
  if (mode == NodeModel::kSota) {
    return Utilization(alloc, node) < sota.saturation_cap;
  }
  return true;
}

double CostModel::RequestLatency(const NodeAllocation& alloc,
                                 const PhysicalNode& node, VnfId f) const {
  if (mode == NodeModel::kSharing) return NodeLatency(alloc, node, f);
  const double p = Utilization(alloc, node);
  if (!(p < sota.saturation_cap)) return kInfinity;
  return SotaLatencyAt(p, sota);
}

const char* ToString(CouplingOrientation orientation) {
  return orientation == CouplingOrientation::kProcessingFromLatency
             ? "processing_from_latency"
             : "latency_from_processing";
}

CouplingOrientation ParseCouplingOrientation(std::string_view text) {
  if (text == "processing_from_latency") {
    return CouplingOrientation::kProcessingFromLatency;
  }
  if (text == "latency_from_processing") {
    return CouplingOrientation::kLatencyFromProcessing;
  }
  throw std::invalid_argument(
      "unknown coupling orientation '" + std::string(text) +
      "' (expected processing_from_latency|latency_from_processing)");
}

NodeCostParams CoupledCosts(double omega, double kappa, double h,
                            CouplingOrientation orientation) {
  if (!(omega >= 0.0) || !(kappa >= 0.0) || !(h >= 0.0)) {
    throw std::invalid_argument("cost parameters must be >= 0");
  }
  NodeCostParams p;
  p.csw_latency = omega;
  p.up_latency = kappa;
  if (orientation == CouplingOrientation::kProcessingFromLatency) {
    p.csw_processing = h * omega;
    p.up_processing = h * kappa;
  } else {
    if (h == 0.0) {
      if (omega != 0.0 || kappa != 0.0) {
        throw std::invalid_argument(
            "latency_from_processing coupling needs h > 0");
      }
      return p;
    }
    p.csw_processing = omega / h;
    p.up_processing = kappa / h;
  }
  return p;
}

}  // namespace vnfcons
