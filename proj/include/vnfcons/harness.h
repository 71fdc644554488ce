#ifndef VNFCONS_HARNESS_H_
#define VNFCONS_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnfcons/costs.h"
#include "vnfcons/hca.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons {

enum class ScenarioKind { kMixed, kHomogeneous };

struct SizePoint {
  int num_sfcs = 1;
  int users = 1;  // per SFC
  bool operator==(const SizePoint&) const = default;
};

struct CostPoint {
  double omega = 0.0;
  double kappa = 0.0;
  bool operator==(const CostPoint&) const = default;
};

// One experiment: the grid is costs x modes x cg_fractions x sizes, and
// every grid point runs `iterations` random instances.
struct ExperimentSpec {
  std::string name;
  std::shared_ptr<const PhysicalNetwork> network;
  std::shared_ptr<const Catalog> catalog;
  ScenarioKind kind = ScenarioKind::kMixed;
  std::string template_name;  // homogeneous only
  std::vector<SizePoint> sizes;
  std::vector<CostPoint> costs;
  double h = 0.01;
  CouplingOrientation orientation = CouplingOrientation::kProcessingFromLatency;
  std::vector<NodeModel> modes{NodeModel::kSharing};
  // Share of Cloud Gaming chains in a mixed scenario; nullopt draws all
  // templates uniformly.
  std::vector<std::optional<double>> cg_fractions{std::nullopt};
  int iterations = 1;
  std::uint64_t seed = 1;
  bool allow_same_endpoints = true;
  int k_max = 64;
  bool self_check = true;
  bool phase2_inactive_only = false;
  SotaParams sota;
};

// Spec file (JSON). Topology and catalog paths resolve against `base_dir`;
// a missing catalog means the built-in one. Throws ParseError or
// ValidationError.
ExperimentSpec ParseExperimentSpec(std::string_view text,
                                   const std::filesystem::path& base_dir);
ExperimentSpec LoadExperimentSpec(const std::filesystem::path& path);

struct GridPoint {
  SizePoint size;
  CostPoint cost;
  NodeModel mode = NodeModel::kSharing;
  std::optional<double> cg_fraction;
};

// Grid points in emission order.
std::vector<GridPoint> ExpandGrid(const ExperimentSpec& spec);

// 64-bit generator seed for one instance. Depends only on (seed, index), so
// every grid point sees the same instance stream.
std::uint64_t InstanceSeed(std::uint64_t seed, std::uint64_t index);

// Random scenario for one instance: templates drawn per the scenario kind,
// start and end drawn uniformly over all nodes.
Scenario GenScenario(const ExperimentSpec& spec, const SizePoint& size,
                     std::optional<double> cg_fraction,
                     std::shared_ptr<const PhysicalNetwork> network,
                     std::uint64_t index);

struct InstanceResult {
  int point = 0;
  int instance = 0;
  bool feasible = false;
  int active_nodes = 0;
  double mean_latency_ms = 0.0;  // over the instance's SFCs
  int phase2_runs = 0;
  double runtime_ms = 0.0;
};

struct PointSummary {
  GridPoint point;
  int instances = 0;
  int feasible = 0;
  double infeasible_pct = 0.0;
  double mean_active = 0.0;
  double ci95_active = 0.0;
  double mean_latency_ms = 0.0;
  double ci95_latency_ms = 0.0;
  double mean_runtime_ms = 0.0;
};

struct ExperimentResult {
  std::vector<PointSummary> points;
  std::vector<InstanceResult> instances;  // sorted by (point, instance)
};

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

// Sample mean and 1.96 s / sqrt(n) with the n-1 sample deviation; the
// half-width is 0 for n <= 1 and both are NaN for n = 0.
MeanCi MeanWithCi(const std::vector<double>& xs);

// Runs HCA on every (grid point, instance) pair using `jobs` threads. The
// result does not depend on `jobs`.
ExperimentResult RunExperiment(const ExperimentSpec& spec, int jobs = 1);

struct CsvOptions {
  bool include_runtime = false;
  // Drop points with 20% or more infeasible instances.
  bool filter_infeasible = false;
};

std::string EmitCsv(const ExperimentResult& result, const CsvOptions& options = {});
std::string EmitAuditCsv(const ExperimentResult& result,
                         const CsvOptions& options = {});

// Paired sharing-vs-utilization comparison: both node models run on the
// same instances at every (cost, cg_fraction, size) point.
struct ComparisonRow {
  SizePoint size;
  CostPoint cost;
  std::optional<double> cg_fraction;
  PointSummary sharing;
  PointSummary sota;
  int paired = 0;  // instances feasible under both models
  MeanCi delta_active;       // sharing - sota, over paired instances
  MeanCi delta_latency_ms;   // sharing - sota, over paired instances
};

std::vector<ComparisonRow> Compare(const ExperimentSpec& spec, int jobs = 1);
std::string EmitComparisonCsv(const std::vector<ComparisonRow>& rows);

}  // namespace vnfcons

#endif  // VNFCONS_HARNESS_H_
