#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "vnfcons/services.h"

namespace vnfcons {
namespace {

double PerUser(const Catalog& c, const char* symbol) {
  return c.vnf(*c.FindVnf(symbol)).proc_per_user;
}

TEST_SUITE("services") {

TEST_CASE("default catalog carries the published requirements") {
  const Catalog c = DefaultCatalog();
  REQUIRE(c.num_vnfs() == 6);
  CHECK(PerUser(c, "NAT") == 0.00092);
  CHECK(PerUser(c, "FW") == 0.0009);
  CHECK(PerUser(c, "TM") == 0.0133);
  CHECK(PerUser(c, "WOC") == 0.0054);
  CHECK(PerUser(c, "IDPS") == 0.0107);
  CHECK(PerUser(c, "VOC") == 0.0054);

  struct Expected {
    const char* name;
    std::vector<const char*> chain;
    double phi;
    double bw;
  };
  const std::vector<Expected> expected = {
      {"WebService", {"NAT", "FW", "TM", "WOC", "IDPS"}, 500, 0.1},
      {"VoIP", {"NAT", "FW", "TM", "FW", "NAT"}, 100, 0.064},
      {"VideoStreaming", {"NAT", "FW", "TM", "VOC", "IDPS"}, 100, 4},
      {"CloudGaming", {"NAT", "FW", "VOC", "WOC", "IDPS"}, 60, 4},
  };
  REQUIRE(c.templates().size() == expected.size());
  for (const Expected& e : expected) {
    CAPTURE(e.name);
    const SfcTemplate* t = c.FindTemplate(e.name);
    REQUIRE(t != nullptr);
    CHECK(t->max_latency == e.phi);
    REQUIRE(t->chain.size() == e.chain.size());
    for (std::size_t i = 0; i < e.chain.size(); ++i) {
      CHECK(c.vnf(t->chain[i]).symbol == e.chain[i]);
    }
    REQUIRE(t->bw_per_user.size() == e.chain.size() + 1);
    for (double bw : t->bw_per_user) CHECK(bw == e.bw);
  }
}

TEST_CASE("shipped catalog file equals the built-in one") {
  CHECK(LoadCatalogFile(testing::DataDir() / "catalogs/default.json") ==
        DefaultCatalog());
}

TEST_CASE("instantiate scales demand by users") {
  const Catalog c = DefaultCatalog();
  const PhysicalNetwork net = testing::LineNetwork(3, 16, 1.0);
  SUBCASE("video streaming with ten users") {
    const SfcInstance s =
        Instantiate(c, *c.FindTemplate("VideoStreaming"), 0, 0, 2, 10, net);
    CHECK(s.num_vlinks() == 6);
    REQUIRE(s.link_bandwidth.size() == 6);
    for (double bw : s.link_bandwidth) CHECK(bw == doctest::Approx(40.0));
  }
  SUBCASE("NAT with 300 users") {
    const SfcInstance s =
        Instantiate(c, *c.FindTemplate("WebService"), 0, 0, 2, 300, net);
    CHECK(s.requests[0].processing == doctest::Approx(0.276).epsilon(1e-12));
  }
  SUBCASE("one user is the per-user value") {
    const SfcInstance s =
        Instantiate(c, *c.FindTemplate("CloudGaming"), 0, 1, 1, 1, net);
    CHECK(s.link_bandwidth[0] == 4.0);
    for (const VnfRequest& r : s.requests) {
      CHECK(r.processing == c.vnf(r.vnf).proc_per_user);
    }
  }
  SUBCASE("VoIP keeps repeated VNFs as distinct requests") {
    const SfcInstance s = Instantiate(c, *c.FindTemplate("VoIP"), 3, 0, 2, 5, net);
    REQUIRE(s.requests.size() == 5);
    CHECK(s.requests[0].vnf == s.requests[4].vnf);
    CHECK(s.requests[1].vnf == s.requests[3].vnf);
    for (int i = 0; i < 5; ++i) {
      CHECK(s.requests[i].position == i);
      CHECK(s.requests[i].sfc == 3);
    }
  }
  SUBCASE("errors") {
    const SfcTemplate& t = *c.FindTemplate("VoIP");
    CHECK_THROWS_AS(Instantiate(c, t, 0, 0, 2, 0, net), ValidationError);
    CHECK_THROWS_AS(Instantiate(c, t, 0, 0, 9, 1, net), ValidationError);
  }
}

TEST_CASE("demand is linear in users") {
  testing::TestRng rng(5);
  const Catalog c = DefaultCatalog();
  const PhysicalNetwork net = testing::LineNetwork(2, 16, 1.0);
  for (int i = 0; i < 50; ++i) {
    const SfcTemplate& t = c.templates()[rng.Below(4)];
    const int n = 1 + rng.Below(200);
    const int a = 1 + rng.Below(9);
    const SfcInstance one = Instantiate(c, t, 0, 0, 1, n, net);
    const SfcInstance many = Instantiate(c, t, 0, 0, 1, a * n, net);
    for (std::size_t k = 0; k < one.link_bandwidth.size(); ++k) {
      CHECK(many.link_bandwidth[k] == doctest::Approx(a * one.link_bandwidth[k]));
    }
  }
}

TEST_CASE("catalog loader") {
  SUBCASE("round trip") {
    CHECK(LoadCatalog(SerializeCatalog(DefaultCatalog())) == DefaultCatalog());
  }
  SUBCASE("unknown VNF in a chain") {
    CHECK_THROWS_AS(LoadCatalog(R"({"vnfs": [{"id": "FW", "name": "f", "proc_per_user": 1}],
      "sfcs": [{"name": "x", "chain": ["NAT"], "max_latency_ms": 5, "bw_per_user_mbps": 1}]})"),
                    ValidationError);
  }
  SUBCASE("empty SFC list is a valid catalog") {
    const Catalog c = LoadCatalog(
        R"({"vnfs": [{"id": "FW", "name": "f", "proc_per_user": 1}], "sfcs": []})");
    CHECK(c.templates().empty());
  }
  SUBCASE("non-positive requirement") {
    CHECK_THROWS_AS(LoadCatalog(R"({"vnfs": [{"id": "FW", "name": "f", "proc_per_user": 0}],
      "sfcs": []})"),
                    ValidationError);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(LoadCatalog(R"({"vnfs": [], "sfcs": [], "extra": 1})"), ParseError);
  }
}

TEST_CASE("scenario files") {
  const auto dir = testing::DataDir() / "scenarios";
  const ScenarioFile file =
      ParseScenarioFile(R"({"sfcs": [{"id": 4, "template": "VoIP", "start": "n0",
                                      "end": "n1", "users": 7}]})",
                        dir);
  auto net = testing::Share(testing::LineNetwork(2, 16, 1.0));
  const Scenario s = BuildScenario(file, net, testing::DefaultCatalogPtr());
  REQUIRE(s.sfcs().size() == 1);
  CHECK(s.sfc(4).users == 7);
  CHECK(s.sfc(4).end == 1);
  CHECK(s.total_requests() == 5);

  SUBCASE("duplicate ids rejected") {
    const ScenarioFile dup = ParseScenarioFile(
        R"({"sfcs": [{"id": 1, "template": "VoIP", "start": "n0", "end": "n1", "users": 1},
                     {"id": 1, "template": "VoIP", "start": "n0", "end": "n1", "users": 1}]})",
        dir);
    CHECK_THROWS_AS(BuildScenario(dup, net, testing::DefaultCatalogPtr()),
                    ValidationError);
  }
  SUBCASE("unknown template") {
    const ScenarioFile bad = ParseScenarioFile(
        R"({"sfcs": [{"id": 1, "template": "Nope", "start": "n0", "end": "n1", "users": 1}]})",
        dir);
    CHECK_THROWS_AS(BuildScenario(bad, net, testing::DefaultCatalogPtr()),
                    ValidationError);
  }
  SUBCASE("serialized scenario parses back") {
    const ScenarioFile again = ParseScenarioFile(SerializeScenario(s), dir);
    const Scenario s2 = BuildScenario(again, net, testing::DefaultCatalogPtr());
    CHECK(SerializeScenario(s2) == SerializeScenario(s));
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace vnfcons
