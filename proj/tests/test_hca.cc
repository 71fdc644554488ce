#include <algorithm>
#include <memory>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "vnfcons/embedding.h"
#include "vnfcons/hca.h"
#include "vnfcons/ilp.h"

namespace vnfcons {
namespace {

using testing::Both;
using testing::Node;
using testing::Share;
using testing::SingleVnfCatalog;
using testing::TestRng;

SfcInstance Chain(const Catalog& c, SfcId id, NodeId start, NodeId end,
                  int users, const PhysicalNetwork& net, double phi = -1) {
  SfcInstance s = Instantiate(c, c.templates()[0], id, start, end, users, net);
  if (phi > 0) s.max_latency = phi;
  return s;
}

// A resident chain on n0 (n0 -> n1 over 98.5 ms, one FW instance of 0.9
// cores, kappa = 1) sits at 99.5 ms against a 100 ms bound.
struct ResidentCase {
  std::shared_ptr<const PhysicalNetwork> net;
  std::shared_ptr<const Catalog> catalog = SingleVnfCatalog(0.01, 100);
  Scenario scenario;
  Hca hca;

  ResidentCase(double cores, int newcomer_users)
      : net(Share(PhysicalNetwork::Build(
            {Node("n0", cores, {0, 0, 1.0, 0}), Node("n1", 0)},
            [] {
              std::vector<LinkSpec> l;
              Both(l, 0, 1, 98.5);
              return l;
            }()))),
        scenario(net, catalog,
                 {Chain(*catalog, 0, 0, 1, 90, *net),
                  Chain(*catalog, 1, 0, 0, newcomer_users, *net)}),
        hca(scenario, {}) {
    REQUIRE(hca.Phase1(scenario.sfc(0)) == Hca::PhaseResult::kMapped);
    hca.MarkEmbedded(scenario.sfc(0));
    REQUIRE(EndToEndLatency(hca.embedding(), scenario, scenario.sfc(0), {}) ==
            doctest::Approx(99.5));
  }

  PlacementVerdict Grow() {
    const SfcInstance& s = scenario.sfc(1);
    return hca.TryPlace(s, s.requests[0], 0, s.start);
  }
};

double TotalCores(const Embedding& emb) {
  double total = 0.0;
  for (const auto& [v, alloc] : emb.allocations()) total += alloc.Total();
  return total;
}

TEST_SUITE("hca") {

TEST_CASE("single chain on its own start node") {
  auto net = Share(testing::LineNetwork(3, 16, 2.0));
  auto catalog = testing::DefaultCatalogPtr();
  const Scenario sc(net, catalog,
                    {Instantiate(*catalog, *catalog->FindTemplate("CloudGaming"),
                                 0, 0, 0, 50, *net)});
  const HcaOutcome out = RunHca(sc, {});
  REQUIRE(out.success());
  CHECK(out.embedding.num_active() == 1);
  CHECK(out.per_sfc_latency.at(0) == 0.0);
  CHECK(out.stats.phase2_runs == 0);
  const ExactSolution exact = SolveExact(sc);
  CHECK(exact.objective == out.embedding.num_active());
}

TEST_CASE("more demand than total capacity is infeasible") {
  auto net = Share(testing::LineNetwork(2, 4, 1.0));
  auto catalog = SingleVnfCatalog(0.01, 1000, 3);
  const Scenario sc(net, catalog, {Chain(*catalog, 0, 0, 1, 300, *net)});  // 9 cores
  const HcaOutcome out = RunHca(sc, {});
  CHECK_FALSE(out.success());
  CHECK(out.failed_sfc == 0);
  CHECK(out.embedding.allocations().empty());  // failed chain released
}

TEST_CASE("second chain scales up the first chain's instance") {
  auto net = Share(testing::LineNetwork(3, 16, 2.0));
  auto catalog = SingleVnfCatalog(0.01, 100);
  const Scenario sc(net, catalog,
                    {Chain(*catalog, 0, 1, 1, 30, *net), Chain(*catalog, 1, 1, 2, 40, *net)});
  const HcaOutcome out = RunHca(sc, {});
  REQUIRE(out.success());
  CHECK(out.embedding.num_active() == 1);
  CHECK(out.stats.new_instances == 1);
  CHECK(out.stats.scale_up_successes == 1);
  CHECK(TotalCores(out.embedding) == doctest::Approx(0.7));
}

TEST_CASE("placement verdicts") {
  SUBCASE("growth within one core keeps latencies") {
    ResidentCase rc(16, 5);  // 0.9 -> 0.95
    CHECK(rc.Grow() == PlacementVerdict::kAccepted);
    CHECK(EndToEndLatency(rc.hca.embedding(), rc.scenario, rc.scenario.sfc(0), {}) ==
          doctest::Approx(99.5));
  }
  SUBCASE("growth past a core boundary would break the resident") {
    ResidentCase rc(16, 20);  // 0.9 -> 1.1 puts the resident at 100.5 ms
    const Embedding before = rc.hca.embedding();
    CHECK(rc.Grow() == PlacementVerdict::kResidentLatency);
    CHECK(ApproxEqual(rc.hca.embedding(), before));
  }
  SUBCASE("not enough residual") {
    ResidentCase rc(1.2, 50);  // residual 0.3, needs 0.5
    CHECK(rc.Grow() == PlacementVerdict::kCapacity);
  }
}

TEST_CASE("protected resident pushes the newcomer to another node") {
  // n0 and n1 are NFV, 1 ms apart; the tight chain A sits on n1.
  std::vector<LinkSpec> links;
  Both(links, 0, 1, 1.0);
  auto net = Share(PhysicalNetwork::Build(
      {Node("n0", 16, {0, 0, 1.0, 0}), Node("n1", 16, {0, 0, 1.0, 0})}, links));
  auto catalog = SingleVnfCatalog(0.01, 100);
  const Scenario sc(net, catalog,
                    {Chain(*catalog, 0, 1, 1, 60, *net, 1.0),
                     Chain(*catalog, 1, 1, 1, 60, *net)});
  const HcaOutcome out = RunHca(sc, {});
  REQUIRE(out.success());
  CHECK(out.embedding.NodeOf({0, 0}) == 1);
  CHECK(out.embedding.NodeOf({1, 0}) == 0);
  CHECK(out.stats.scale_up_attempts == 1);
  CHECK(out.stats.scale_up_successes == 0);
  CHECK(out.per_sfc_latency.at(0) == doctest::Approx(1.0));
  CHECK(Validate(out.embedding, sc, {}).ok());
}

TEST_CASE("re-placement moves a detoured chain onto its shortest path") {
  // n0 is 15 ms from both n1 and n2, which are 5 ms apart. Greedy placement
  // favours n0 (lowest id among equally empty nodes).
  std::vector<LinkSpec> links;
  Both(links, 0, 1, 15.0);
  Both(links, 0, 2, 15.0);
  Both(links, 1, 2, 5.0);
  auto net = Share(PhysicalNetwork::Build(
      {Node("n0", 16), Node("n1", 16), Node("n2", 16)}, links));
  auto catalog = testing::DefaultCatalogPtr();
  SfcInstance cg = Instantiate(*catalog, *catalog->FindTemplate("CloudGaming"),
                               0, 1, 2, 20, *net);
  cg.max_latency = 20.0;
  const Scenario sc(net, catalog, {cg});
  for (bool self_check : {true, false}) {
    CAPTURE(self_check);
    HcaConfig config;
    config.self_check = self_check;
    const HcaOutcome out = RunHca(sc, config);
    REQUIRE(out.success());
    CHECK(out.stats.phase2_runs == 1);
    CHECK(out.embedding.active() == std::set<NodeId>{1});
    for (int u = 0; u < 5; ++u) CHECK(out.embedding.NodeOf({0, u}) == 1);
    CHECK(out.per_sfc_latency.at(0) == doctest::Approx(5.0));
    CHECK(Validate(out.embedding, sc, {}).ok());
  }

  SUBCASE("inactive-only re-placement still finds n1") {
    HcaConfig config;
    config.phase2_inactive_only = true;
    CHECK(RunHca(sc, config).success());
  }
}

TEST_CASE("bound below the propagation floor is infeasible") {
  auto net = Share(testing::LineNetwork(3, 16, 10.0));
  auto catalog = SingleVnfCatalog(0.01, 15.0);
  const Scenario sc(net, catalog, {Chain(*catalog, 0, 0, 2, 10, *net)});
  const HcaOutcome out = RunHca(sc, {});
  CHECK_FALSE(out.success());
  CHECK(out.stats.phase2_runs == 1);
  CHECK(SolveExact(sc).status == ExactStatus::kInfeasible);
}

TEST_CASE("fixture scenarios") {
  auto catalog = testing::DefaultCatalogPtr();
  auto net = Share(LoadTopologyFile(testing::DataDir() / "topologies/internet2_like.json"));
  const auto dir = testing::DataDir() / "scenarios";
  const Scenario three = BuildScenario(
      ParseScenarioFile(R"({"sfcs": [
        {"id": 0, "template": "CloudGaming", "start": "SEAT", "end": "NEWY", "users": 300},
        {"id": 1, "template": "VoIP", "start": "LOSA", "end": "CHIC", "users": 300},
        {"id": 2, "template": "WebService", "start": "HOUS", "end": "WASH", "users": 300}]})",
                        dir),
      net, catalog);
  const HcaOutcome out = RunHca(three, {});
  REQUIRE(out.success());
  CHECK(out.stats.processing_order == std::vector<SfcId>{0, 1, 2});
  CHECK(Validate(out.embedding, three, {}).ok());
}

TEST_CASE("randomized invariants") {
  TestRng rng(99);
  auto catalog = testing::DefaultCatalogPtr();
  int successes = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const double omega = 0.4 * rng.Below(3);
    const double kappa = 1.75 * rng.Below(3);
    auto net = Share(testing::RandomNetwork(rng, 4 + rng.Below(7), rng.Below(6), 4, 16,
                                            CoupledCosts(omega, kappa, 0.01)));
    const Scenario sc = testing::RandomScenario(rng, net, catalog, 1 + rng.Below(8), 5, 200);
    HcaConfig config;
    config.model.mode = rng.Below(4) == 0 ? NodeModel::kSota : NodeModel::kSharing;
    const HcaOutcome out = RunHca(sc, config);

    // Processing order sorted by (bound, id).
    std::vector<std::pair<double, SfcId>> keys;
    for (SfcId id : out.stats.processing_order) {
      keys.emplace_back(sc.sfc(id).max_latency, id);
    }
    CHECK(std::is_sorted(keys.begin(), keys.end()));

    // Determinism.
    const HcaOutcome again = RunHca(sc, config);
    CHECK(again.success() == out.success());
    CHECK(ApproxEqual(again.embedding, out.embedding, 0.0));

    if (!out.success()) continue;
    ++successes;
    CHECK(out.stats.processing_order.size() == sc.sfcs().size());
    CHECK(Validate(out.embedding, sc, config.model).ok());
    double demand = 0.0;
    for (const SfcInstance& s : sc.sfcs()) {
      for (const VnfRequest& r : s.requests) demand += r.processing;
    }
    CHECK(TotalCores(out.embedding) == doctest::Approx(demand).epsilon(1e-9));
    for (const auto& [id, lat] : out.per_sfc_latency) {
      CHECK(lat <= sc.sfc(id).max_latency + kTolerance);
    }
  }
  CHECK(successes >= 75);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vnfcons
