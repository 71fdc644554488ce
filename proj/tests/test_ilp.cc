#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "vnfcons/hca.h"
#include "vnfcons/ilp.h"

namespace vnfcons {
namespace {

using testing::Share;
using testing::SingleVnfCatalog;
using testing::TestRng;

Scenario TinyFixture() {
  const auto dir = testing::DataDir() / "scenarios";
  std::ifstream in(dir / "tiny.json");
  std::stringstream text;
  text << in.rdbuf();
  const ScenarioFile file = ParseScenarioFile(text.str(), dir);
  return BuildScenario(file, Share(LoadTopologyFile(*file.topology)),
                       std::make_shared<const Catalog>(LoadCatalogFile(*file.catalog)));
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

std::size_t CountRows(const LinearModel& m, std::string_view family) {
  std::size_t n = 0;
  for (const Constraint& c : m.constraints()) n += FamilyOf(c.name) == family;
  return n;
}

// Random instance inside the exact solver's limits: up to 4 NFV nodes,
// at most 8 requests, unlimited bandwidth.
Scenario TinyRandom(TestRng& rng) {
  const int n = 2 + rng.Below(3);
  const double omega = 0.4 * rng.Below(2);
  const double kappa = 1.75 * rng.Below(2);
  auto net = Share(testing::RandomNetwork(rng, n, 1, 2, 6,
                                          CoupledCosts(omega, kappa, 0.01)));
  auto catalog = std::make_shared<const Catalog>(
      std::vector<VnfType>{{0, "A", "a", 0.01}, {1, "B", "b", 0.02}},
      std::vector<SfcTemplate>{{"AB", {0, 1}, 40, {1, 1, 1}},
                               {"BAB", {1, 0, 1}, 60, {1, 1, 1, 1}}});
  std::vector<SfcInstance> sfcs;
  const int count = 1 + rng.Below(2);
  for (int c = 0; c < count; ++c) {
    const SfcTemplate& t = catalog->templates()[rng.Below(2)];
    sfcs.push_back(Instantiate(*catalog, t, c, rng.Below(n), rng.Below(n),
                               20 + rng.Below(150), *net));
  }
  return Scenario(net, catalog, std::move(sfcs));
}

TEST_SUITE("ilp") {

TEST_CASE("tiny model has the hand-counted shape") {
  // Two nodes joined both ways (4 links with the self-loops), one VNF type,
  // one chain of length 1 from A to B: 3 chain points and 2 virtual links.
  const LinearModel m = BuildModel(TinyFixture());
  CHECK(m.CountPrefix("m") == 3 * 2);
  CHECK(m.CountPrefix("c") == 2);
  CHECK(m.CountPrefix("i") == 2);
  CHECK(m.CountPrefix("n") == 2);
  CHECK(m.CountPrefix("psi") == 2);
  CHECK(m.CountPrefix("a") == 2);
  CHECK(m.CountPrefix("sigma") == 1);
  CHECK(m.CountPrefix("pair") == 2 + 2);  // start fixed on link 0, end on link 1
  CHECK(m.CountPrefix("e") == 4 * 4);
  CHECK(m.CountPrefix("q") == 2);
  CHECK(m.variables().size() == 39);
  CHECK(m.CountKind(VarKind::kBinary) == 6 + 2 + 2 + 4 + 16);
  CHECK(m.CountKind(VarKind::kInteger) == 2);

  CHECK(CountRows(m, "fix") == 4);
  CHECK(CountRows(m, "map") == 1);
  for (const char* f : {"inst", "ibig", "ieps", "ione", "ceil", "ceileps"}) {
    CHECK(CountRows(m, f) == 2);
  }
  CHECK(CountRows(m, "epair") == 16);
  CHECK(CountRows(m, "src") == 2);
  CHECK(CountRows(m, "bw") == 0);
  CHECK(CountRows(m, "lat") == 1);
  CHECK(m.constraints().size() == 81);
}

TEST_CASE("tiny model matches the golden LP file") {
  const std::string lp = ExportLp(BuildModel(TinyFixture()));
  CHECK(lp == ReadFile(std::filesystem::path(VNFCONS_GOLDEN_DIR) / "tiny.lp"));
  CHECK(lp.find("ieps.0.0: i.0.0 - c.0.0 <= 0.999999\n") != std::string::npos);
}

TEST_CASE("no-cost model is still well formed") {
  const LinearModel m = BuildModel(TinyFixture());
  for (const Constraint& row : m.constraints()) {
    for (const Term& t : row.terms) CHECK(t.coef != 0.0);
  }
  CHECK(CountRows(m, "psi") == 2);
  CHECK(CountRows(m, "sigma") == 1);
  CHECK(ParseLp(ExportLp(m)).constraints().size() == m.constraints().size());
}

TEST_CASE("big-M parameters are validated") {
  const Scenario s = TinyFixture();
  const BigM def = DefaultBigM(s);
  CHECK(def.m_gamma == 5.0);
  CHECK(def.m_f == 2.0);
  BigM bad = def;
  bad.m_gamma = 4.0;
  CHECK_THROWS_AS(BuildModel(s, bad), std::invalid_argument);
  bad = def;
  bad.m_f = 1.0;
  CHECK_THROWS_AS(BuildModel(s, bad), std::invalid_argument);
  bad = def;
  bad.eps = 1e-3;
  CHECK_THROWS_AS(BuildModel(s, bad), std::invalid_argument);
}

TEST_CASE("finite bandwidth adds rows") {
  std::vector<LinkSpec> links;
  testing::Both(links, 0, 1, 1.0, 50.0);
  auto net = Share(PhysicalNetwork::Build(
      {testing::Node("a", 4), testing::Node("b", 4)}, links));
  auto catalog = SingleVnfCatalog(0.01, 10);
  const Scenario s(net, catalog,
                   {Instantiate(*catalog, catalog->templates()[0], 0, 0, 1, 10, *net)});
  CHECK(CountRows(BuildModel(s), "bw") == 2);
}

TEST_CASE("LP text round trip and determinism") {
  TestRng rng(31);
  for (int i = 0; i < 5; ++i) {
    const Scenario s = TinyRandom(rng);
    const LinearModel m = BuildModel(s);
    const std::string lp = ExportLp(m);
    CHECK(lp == ExportLp(BuildModel(s)));
    const LinearModel back = ParseLp(lp);
    CHECK(back.variables().size() == m.variables().size());
    CHECK(back.constraints().size() == m.constraints().size());
    CHECK(ExportLp(back) == lp);
  }
  CHECK_THROWS_AS(ParseLp("Minimize\n obj: x\nSubject To\n r: x + <= 1\nEnd\n"),
                  ParseError);
}

TEST_CASE("assignment checker catches violations") {
  const Scenario s = TinyFixture();
  const LinearModel m = BuildModel(s);
  const ExactSolution sol = SolveExact(s);
  REQUIRE(sol.status == ExactStatus::kOptimal);
  std::vector<double> x = NaturalAssignment(m, s, sol.embedding);
  CHECK(CheckAssignment(m, x).empty());
  x[m.Var("a.0")] = 0.5;
  CHECK_FALSE(CheckAssignment(m, x).empty());
  x = NaturalAssignment(m, s, sol.embedding);
  x[m.Var("m.0.0.0")] = 0.0;  // start point unmapped
  bool fix_hit = false;
  for (const RowViolation& v : CheckAssignment(m, x)) fix_hit |= FamilyOf(v.name) == "fix";
  CHECK(fix_hit);
}

TEST_CASE("exact solver examples") {
  SUBCASE("chain on the only NFV node") {
    auto net = Share(PhysicalNetwork::Build({testing::Node("a", 16)}, {}));
    auto catalog = SingleVnfCatalog(0.01, 10, 2);
    const Scenario s(net, catalog,
                     {Instantiate(*catalog, catalog->templates()[0], 0, 0, 0, 10, *net)});
    const ExactSolution sol = SolveExact(s);
    CHECK(sol.status == ExactStatus::kOptimal);
    CHECK(sol.objective == 1);
  }
  SUBCASE("shared VNF too big for one node") {
    auto net = Share(testing::LineNetwork(2, 4, 1.0));
    auto catalog = SingleVnfCatalog(0.01, 100);
    const Scenario s(net, catalog,
                     {Instantiate(*catalog, catalog->templates()[0], 0, 0, 1, 300, *net),
                      Instantiate(*catalog, catalog->templates()[0], 1, 1, 0, 300, *net)});
    const ExactSolution sol = SolveExact(s);
    REQUIRE(sol.status == ExactStatus::kOptimal);
    CHECK(sol.objective == 2);
    // Two requests on two nodes: 2^2 leaves at most, plus the first level.
    CHECK(sol.assignments_explored <= 6);
    CHECK(Validate(sol.embedding, s, {}).ok());
  }
  SUBCASE("bound below propagation") {
    auto net = Share(testing::LineNetwork(2, 4, 30.0));
    auto catalog = SingleVnfCatalog(0.01, 20);
    const Scenario s(net, catalog,
                     {Instantiate(*catalog, catalog->templates()[0], 0, 0, 1, 10, *net)});
    CHECK(SolveExact(s).status == ExactStatus::kInfeasible);
  }
  SUBCASE("size guard") {
    auto net = Share(testing::LineNetwork(6, 4, 1.0));
    auto catalog = SingleVnfCatalog(0.01, 20);
    const Scenario s(net, catalog,
                     {Instantiate(*catalog, catalog->templates()[0], 0, 0, 1, 10, *net)});
    CHECK_THROWS_AS(SolveExact(s), LimitError);
    std::vector<LinkSpec> links;
    testing::Both(links, 0, 1, 1.0, 100.0);
    auto finite = Share(PhysicalNetwork::Build(
        {testing::Node("a", 4), testing::Node("b", 4)}, links));
    const Scenario s2(finite, catalog,
                      {Instantiate(*catalog, catalog->templates()[0], 0, 0, 1, 10, *finite)});
    CHECK_THROWS_AS(SolveExact(s2), LimitError);
  }
}

TEST_CASE("embeddings accepted by the validator satisfy the model") {
  TestRng rng(8);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    const Scenario s = TinyRandom(rng);
    const LinearModel m = BuildModel(s);
    const ExactSolution sol = SolveExact(s);
    const HcaOutcome hca = RunHca(s, {});
    if (hca.success()) CHECK(sol.status == ExactStatus::kOptimal);
    if (sol.status != ExactStatus::kOptimal) continue;
    ++checked;
    REQUIRE(Validate(sol.embedding, s, {}).ok());
    const auto bad = CheckAssignment(m, NaturalAssignment(m, s, sol.embedding));
    CHECK_MESSAGE(bad.empty(), (bad.empty() ? "" : bad.front().name));
    double objective = 0.0;
    const auto x = NaturalAssignment(m, s, sol.embedding);
    for (const Term& t : m.objective()) objective += t.coef * x[t.var];
    CHECK(objective == sol.objective);
    if (hca.success()) {
      CHECK(hca.embedding.num_active() >= sol.objective);
      CHECK(CheckAssignment(m, NaturalAssignment(m, s, hca.embedding)).empty());
    }
  }
  CHECK(checked >= 15);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vnfcons
