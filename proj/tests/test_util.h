#ifndef VNFCONS_TESTS_TEST_UTIL_H_
#define VNFCONS_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vnfcons/costs.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace vnfcons::testing {

inline std::filesystem::path DataDir() { return VNFCONS_DATA_DIR; }

// Small seeded generator for property tests, deliberately independent of
// the library's own RNG plumbing.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  int Below(int n) { return static_cast<int>(Next() % static_cast<std::uint64_t>(n)); }
  double Unit() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }
  double Range(double lo, double hi) { return lo + (hi - lo) * Unit(); }

 private:
  std::uint64_t state_;
};

inline PhysicalNode Node(const std::string& name, double cores,
                         NodeCostParams costs = {}) {
  PhysicalNode n;
  n.name = name;
  n.cores = cores;
  n.costs = costs;
  return n;
}

// Both directions of an undirected link.
inline void Both(std::vector<LinkSpec>& links, NodeId a, NodeId b,
                 double latency, double bandwidth = kInfinity) {
  links.push_back({a, b, bandwidth, latency});
  links.push_back({b, a, bandwidth, latency});
}

inline std::shared_ptr<const PhysicalNetwork> Share(PhysicalNetwork net) {
  return std::make_shared<const PhysicalNetwork>(std::move(net));
}

inline std::shared_ptr<const Catalog> DefaultCatalogPtr() {
  return std::make_shared<const Catalog>(DefaultCatalog());
}

// Line a - b - c - ... with the given per-hop latency.
inline PhysicalNetwork LineNetwork(int n, double cores, double latency,
                                   NodeCostParams costs = {}) {
  std::vector<PhysicalNode> nodes;
  std::vector<LinkSpec> links;
  for (int i = 0; i < n; ++i) {
    nodes.push_back(Node("n" + std::to_string(i), cores, costs));
    if (i > 0) Both(links, i - 1, i, latency);
  }
  return PhysicalNetwork::Build(nodes, links);
}

// Connected random graph: a random spanning tree plus extra edges.
inline PhysicalNetwork RandomNetwork(TestRng& rng, int n, int extra_edges,
                                     double min_cores, double max_cores,
                                     NodeCostParams costs = {}) {
  std::vector<PhysicalNode> nodes;
  std::vector<LinkSpec> links;
  for (int i = 0; i < n; ++i) {
    nodes.push_back(Node("v" + std::to_string(i),
                         std::round(rng.Range(min_cores, max_cores)), costs));
  }
  for (int i = 1; i < n; ++i) {
    Both(links, rng.Below(i), i, 0.5 * std::round(rng.Range(6.0, 27.0)));
  }
  for (int e = 0; e < extra_edges; ++e) {
    const int a = rng.Below(n);
    const int b = rng.Below(n);
    bool dup = a == b;
    for (const LinkSpec& l : links) dup = dup || (l.from == a && l.to == b);
    if (!dup) Both(links, a, b, 0.5 * std::round(rng.Range(6.0, 27.0)));
  }
  return PhysicalNetwork::Build(nodes, links);
}

// Random chains drawn from the catalog's templates with random endpoints.
inline Scenario RandomScenario(TestRng& rng,
                               std::shared_ptr<const PhysicalNetwork> net,
                               std::shared_ptr<const Catalog> catalog,
                               int num_sfcs, int min_users, int max_users) {
  std::vector<SfcInstance> sfcs;
  const auto& templates = catalog->templates();
  for (int c = 0; c < num_sfcs; ++c) {
    const SfcTemplate& t = templates[rng.Below(static_cast<int>(templates.size()))];
    const int users = min_users + rng.Below(max_users - min_users + 1);
    sfcs.push_back(Instantiate(*catalog, t, c, rng.Below(net->num_nodes()),
                               rng.Below(net->num_nodes()), users, *net));
  }
  return Scenario(net, catalog, std::move(sfcs));
}

// One-VNF catalog with a configurable bound, for hand-built cases.
inline std::shared_ptr<const Catalog> SingleVnfCatalog(double proc_per_user,
                                                       double max_latency,
                                                       int chain_length = 1) {
  VnfType fw{0, "FW", "Firewall", proc_per_user};
  SfcTemplate t;
  t.name = "Chain";
  t.chain.assign(chain_length, 0);
  t.max_latency = max_latency;
  t.bw_per_user.assign(chain_length + 1, 1.0);
  return std::make_shared<const Catalog>(std::vector<VnfType>{fw},
                                         std::vector<SfcTemplate>{t});
}

}  // namespace vnfcons::testing

#endif  // VNFCONS_TESTS_TEST_UTIL_H_
