#ifndef VNFCONS_SERVICES_H_
#define VNFCONS_SERVICES_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnfcons/network.h"

namespace vnfcons {

using VnfId = int;
using SfcId = int;

struct VnfType {
  VnfId id = 0;
  std::string symbol;  // short key used by chains, e.g. "NAT"
  std::string name;
  double proc_per_user = 0.0;  // cores per user

  bool operator==(const VnfType&) const = default;
};

struct SfcTemplate {
  std::string name;
  std::vector<VnfId> chain;
  double max_latency = 0.0;  // ms
  // Per-user bandwidth (Mb/s) of each virtual link, start->first through
  // last->end, so size() == chain.size() + 1.
  std::vector<double> bw_per_user;

  bool operator==(const SfcTemplate&) const = default;
};

class Catalog {
 public:
  Catalog() = default;
  // Ids of `vnfs` are reassigned densely in order. Throws ValidationError.
  Catalog(std::vector<VnfType> vnfs, std::vector<SfcTemplate> templates);

  const std::vector<VnfType>& vnfs() const { return vnfs_; }
  const std::vector<SfcTemplate>& templates() const { return templates_; }
  const VnfType& vnf(VnfId id) const { return vnfs_.at(id); }
  int num_vnfs() const { return static_cast<int>(vnfs_.size()); }

  std::optional<VnfId> FindVnf(std::string_view symbol) const;
  const SfcTemplate* FindTemplate(std::string_view name) const;

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<VnfType> vnfs_;
  std::vector<SfcTemplate> templates_;
};

// Six VNF types and the WebService, VoIP, VideoStreaming and CloudGaming
// chains, bandwidths in Mb/s.
Catalog DefaultCatalog();

// Strict JSON:
//   {"vnfs": [{"id", "name", "proc_per_user"}],
//    "sfcs": [{"name", "chain": [vnf ids], "max_latency_ms",
//              "bw_per_user_mbps": number | [per-link numbers]}]}
Catalog LoadCatalog(std::string_view text);
Catalog LoadCatalogFile(const std::filesystem::path& file);
std::string SerializeCatalog(const Catalog& catalog);

struct VnfRequest {
  SfcId sfc = 0;
  int position = 0;   // index in the chain
  VnfId vnf = 0;
  double processing = 0.0;  // users x proc_per_user

  bool operator==(const VnfRequest&) const = default;
};

// A concrete chain to embed. Virtual link i enters request i; link
// chain.size() leaves the last request for the end point.
struct SfcInstance {
  SfcId id = 0;
  std::string template_name;
  std::vector<VnfId> chain;
  double max_latency = 0.0;
  NodeId start = 0;
  NodeId end = 0;
  int users = 1;
  std::vector<VnfRequest> requests;
  std::vector<double> link_bandwidth;  // aggregated, Mb/s

  int length() const { return static_cast<int>(chain.size()); }
  int num_vlinks() const { return length() + 1; }
};

// Throws ValidationError for users < 1, unknown nodes, or a template
// referencing unknown VNFs.
SfcInstance Instantiate(const Catalog& catalog, const SfcTemplate& tmpl,
                        SfcId id, NodeId start, NodeId end, int users,
                        const PhysicalNetwork& net);

// A complete embedding problem. Instances are kept in input order.
class Scenario {
 public:
  Scenario(std::shared_ptr<const PhysicalNetwork> network,
           std::shared_ptr<const Catalog> catalog,
           std::vector<SfcInstance> sfcs);

  const PhysicalNetwork& network() const { return *network_; }
  const Catalog& catalog() const { return *catalog_; }
  std::shared_ptr<const PhysicalNetwork> network_ptr() const {
    return network_;
  }
  std::shared_ptr<const Catalog> catalog_ptr() const { return catalog_; }
  const std::vector<SfcInstance>& sfcs() const { return sfcs_; }
  const SfcInstance& sfc(SfcId id) const;
  bool has_sfc(SfcId id) const { return index_.contains(id); }
  int total_requests() const;

 private:
  std::shared_ptr<const PhysicalNetwork> network_;
  std::shared_ptr<const Catalog> catalog_;
  std::vector<SfcInstance> sfcs_;
  std::map<SfcId, std::size_t> index_;
};

// Scenario file: {"topology"?: path, "catalog"?: path,
//   "sfcs": [{"id", "template", "start", "end", "users"}]}
// Node references use topology node ids.
struct ScenarioFile {
  std::optional<std::filesystem::path> topology;
  std::optional<std::filesystem::path> catalog;
  struct Entry {
    SfcId id = 0;
    std::string template_name;
    std::string start;
    std::string end;
    int users = 1;
  };
  std::vector<Entry> sfcs;
};

// Relative topology/catalog paths are resolved against `base_dir`.
ScenarioFile ParseScenarioFile(std::string_view text,
                               const std::filesystem::path& base_dir);
Scenario BuildScenario(const ScenarioFile& file,
                       std::shared_ptr<const PhysicalNetwork> network,
                       std::shared_ptr<const Catalog> catalog);
std::string SerializeScenario(const Scenario& scenario);

}  // namespace vnfcons

#endif  // VNFCONS_SERVICES_H_
