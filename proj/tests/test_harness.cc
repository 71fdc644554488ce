#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.h"
#include "vnfcons/harness.h"

namespace vnfcons {
namespace {

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

ExperimentSpec SmallSpec() {
  ExperimentSpec spec;
  spec.name = "small";
  spec.network = testing::Share(
      LoadTopologyFile(testing::DataDir() / "topologies/internet2_like.json"));
  spec.catalog = testing::DefaultCatalogPtr();
  spec.sizes = {{3, 100}, {5, 200}};
  spec.costs = {{0.0, 0.0}, {0.4, 1.75}};
  spec.iterations = 20;
  spec.seed = 17;
  return spec;
}

TEST_SUITE("harness") {

TEST_CASE("scenario generation is a function of seed and index") {
  const ExperimentSpec spec = SmallSpec();
  const Scenario a = GenScenario(spec, {4, 10}, std::nullopt, spec.network, 7);
  const Scenario b = GenScenario(spec, {4, 10}, std::nullopt, spec.network, 7);
  const Scenario c = GenScenario(spec, {4, 10}, std::nullopt, spec.network, 8);
  CHECK(SerializeScenario(a) == SerializeScenario(b));
  CHECK(SerializeScenario(a) != SerializeScenario(c));
  CHECK(InstanceSeed(1, 2) == InstanceSeed(1, 2));
  CHECK(InstanceSeed(1, 2) != InstanceSeed(2, 2));
  CHECK(InstanceSeed(1, 2) != InstanceSeed(1, 3));
}

TEST_CASE("mixed draws are uniform over the templates") {
  const ExperimentSpec spec = SmallSpec();
  const Scenario s = GenScenario(spec, {4000, 1}, std::nullopt, spec.network, 0);
  std::map<std::string, int> freq;
  for (const SfcInstance& sfc : s.sfcs()) ++freq[sfc.template_name];
  REQUIRE(freq.size() == 4);
  for (const auto& [name, n] : freq) {
    CAPTURE(name);
    CHECK(std::abs(n / 4000.0 - 0.25) <= 0.02);
  }
  for (const SfcInstance& sfc : s.sfcs()) CHECK(sfc.users == 1);
}

TEST_CASE("endpoints and homogeneous scenarios") {
  ExperimentSpec spec = SmallSpec();
  spec.kind = ScenarioKind::kHomogeneous;
  spec.template_name = "CloudGaming";
  spec.allow_same_endpoints = false;
  const Scenario s = GenScenario(spec, {100, 20}, std::nullopt, spec.network, 3);
  REQUIRE(s.sfcs().size() == 100);
  for (const SfcInstance& sfc : s.sfcs()) {
    CHECK(sfc.template_name == "CloudGaming");
    CHECK(sfc.start != sfc.end);
    CHECK(sfc.users == 20);
  }
}

TEST_CASE("cloud gaming share") {
  const ExperimentSpec spec = SmallSpec();
  const Scenario all = GenScenario(spec, {50, 1}, 1.0, spec.network, 0);
  for (const SfcInstance& sfc : all.sfcs()) CHECK(sfc.template_name == "CloudGaming");
  const Scenario none = GenScenario(spec, {50, 1}, 0.0, spec.network, 0);
  for (const SfcInstance& sfc : none.sfcs()) CHECK(sfc.template_name != "CloudGaming");
}

TEST_CASE("mean and interval") {
  const MeanCi one = MeanWithCi({3.0});
  CHECK(one.mean == 3.0);
  CHECK(one.ci95 == 0.0);
  const MeanCi none = MeanWithCi({});
  CHECK(std::isnan(none.mean));
  CHECK(std::isnan(none.ci95));
  // s = sqrt(((1-2.5)^2 + (2-2.5)^2 + (3-2.5)^2 + (4-2.5)^2) / 3)
  const MeanCi four = MeanWithCi({1, 2, 3, 4});
  CHECK(four.mean == doctest::Approx(2.5));
  CHECK(four.ci95 == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("grid order and trivial experiment") {
  ExperimentSpec spec = SmallSpec();
  spec.modes = {NodeModel::kSharing, NodeModel::kSota};
  const std::vector<GridPoint> grid = ExpandGrid(spec);
  REQUIRE(grid.size() == 2 * 2 * 2);
  CHECK(grid[0].size == SizePoint{3, 100});
  CHECK(grid[1].size == SizePoint{5, 200});
  CHECK(grid[2].mode == NodeModel::kSota);
  CHECK(grid[4].cost == CostPoint{0.4, 1.75});

  // One node, one chain from the node to itself: a single active node.
  ExperimentSpec trivial;
  trivial.network = testing::Share(testing::LineNetwork(1, 16, 1.0));
  trivial.catalog = testing::DefaultCatalogPtr();
  trivial.sizes = {{1, 5}};
  trivial.costs = {{0, 0}};
  const ExperimentResult r = RunExperiment(trivial);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].mean_active == 1.0);
  CHECK(r.points[0].ci95_active == 0.0);
  CHECK(r.points[0].mean_latency_ms == 0.0);
}

TEST_CASE("results do not depend on thread count") {
  const ExperimentSpec spec = SmallSpec();
  const ExperimentResult a = RunExperiment(spec, 1);
  const ExperimentResult b = RunExperiment(spec, 4);
  CHECK(EmitCsv(a) == EmitCsv(b));
  CHECK(EmitAuditCsv(a) == EmitAuditCsv(b));
}

TEST_CASE("summary rows are recomputable from audit rows") {
  const ExperimentSpec spec = SmallSpec();
  const ExperimentResult result = RunExperiment(spec, 2);
  const auto summary = ParseCsv(EmitCsv(result));
  const auto audit = ParseCsv(EmitAuditCsv(result));
  REQUIRE(summary.size() == 1 + 4);
  REQUIRE(audit.size() == 1 + 4 * 20);
  CHECK(summary[0].size() == 14);

  std::map<int, std::vector<double>> active, latency;
  std::map<int, int> total;
  for (std::size_t i = 1; i < audit.size(); ++i) {
    const int point = std::stoi(audit[i][0]);
    ++total[point];
    if (audit[i][2] == "1") {
      active[point].push_back(std::stod(audit[i][3]));
      latency[point].push_back(std::stod(audit[i][4]));
    }
  }
  for (std::size_t i = 1; i < summary.size(); ++i) {
    const auto& row = summary[i];
    const int point = std::stoi(row[0]);
    CAPTURE(point);
    const std::vector<double>& xs = active[point];
    CHECK(std::stoi(row[7]) == total[point]);
    CHECK(std::stoi(row[8]) == static_cast<int>(xs.size()));
    const double pct = 100.0 * (total[point] - static_cast<double>(xs.size())) / total[point];
    CHECK(std::abs(std::stod(row[9]) - pct) <= 1e-9);
    if (xs.empty()) continue;
    // Independent mean and deviation.
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double ci = xs.size() > 1 ? 1.96 * std::sqrt(ss / (xs.size() - 1)) / std::sqrt(xs.size()) : 0.0;
    CHECK(std::abs(std::stod(row[10]) - mean) <= 1e-9);
    CHECK(std::abs(std::stod(row[11]) - ci) <= 1e-9);
    double lsum = 0.0;
    for (double x : latency[point]) lsum += x;
    CHECK(std::abs(std::stod(row[12]) - lsum / xs.size()) <= 1e-9);
  }
}

TEST_CASE("empty grid emits only the header") {
  ExperimentSpec spec = SmallSpec();
  spec.sizes.clear();
  const std::string csv = EmitCsv(RunExperiment(spec));
  CHECK(ParseCsv(csv).size() == 1);
  CHECK(csv.back() == '\n');
}

TEST_CASE("infeasible filter drops points") {
  ExperimentSpec spec = SmallSpec();
  spec.sizes = {{100, 300}};  // far beyond the fixture's capacity
  spec.costs = {{0, 0}};
  spec.iterations = 3;
  const ExperimentResult r = RunExperiment(spec);
  CHECK(r.points[0].infeasible_pct == 100.0);
  CHECK(std::isnan(r.points[0].mean_active));
  CHECK(ParseCsv(EmitCsv(r)).size() == 2);
  CHECK(ParseCsv(EmitCsv(r, {false, true})).size() == 1);
}

TEST_CASE("shipped small-scale spec expands to a 3 x 3 grid") {
  const ExperimentSpec spec =
      LoadExperimentSpec(testing::DataDir() / "experiments/small_scale.json");
  CHECK(ExpandGrid(spec).size() == 9);
  CHECK(spec.iterations == 100);
  CHECK(spec.sizes[1] == SizePoint{6, 150});
}

TEST_CASE("experiment spec errors") {
  const auto dir = testing::DataDir() / "experiments";
  const std::string topo = R"("topology": "../topologies/internet2_like.json")";
  auto parse = [&](const std::string& body) {
    return ParseExperimentSpec("{" + topo + "," + body + "}", dir);
  };
  CHECK(parse(R"("sfcs": [10], "total_users": [1000])").sizes[0].users == 100);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "total_users": [1000])"), ValidationError);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "users": [1], "iterations": 0)"), ValidationError);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "users": [1], "bogus": 0)"), ParseError);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "users": [1], "total_users": [3])"), ParseError);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "users": [1], "kind": "homogeneous")"), ParseError);
  CHECK_THROWS_AS(parse(R"("sfcs": [3], "users": [1], "h": 0, "omegas": [0.4],
                           "orientation": "latency_from_processing")"),
                  ValidationError);
}

TEST_CASE("paired comparison") {
  ExperimentSpec spec = SmallSpec();
  spec.h = 0.0;
  spec.costs = {{0.4, 1.75}};
  const std::vector<ComparisonRow> rows = Compare(spec, 2);
  REQUIRE(rows.size() == 2);
  const ExperimentResult sharing = RunExperiment(spec, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& row = rows[i];
    CHECK(row.sharing.mean_active == sharing.points[i].mean_active);
    CHECK(row.paired <= row.sharing.feasible);
    CHECK(row.paired <= row.sota.feasible);
    if (row.paired > 0 && row.paired == row.sharing.feasible &&
        row.paired == row.sota.feasible) {
      CHECK(row.delta_active.mean ==
            doctest::Approx(row.sharing.mean_active - row.sota.mean_active));
    }
  }
  const auto csv = ParseCsv(EmitComparisonCsv(rows));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0].size() == 16);
  CHECK(csv[0][5] == "paired");
}

}  // TEST_SUITE

}  // namespace
}  // namespace vnfcons
