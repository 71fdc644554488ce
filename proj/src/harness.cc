#include "vnfcons/harness.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "json.hpp"
#include "json_util.h"

namespace vnfcons {

namespace {

using nlohmann::json;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform integer in [0, n) by rejection, so draws do not depend on the
// standard library's distribution implementation.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string Num(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

std::string CgText(const std::optional<double>& cg) {
  return cg ? Num(*cg) : "";
}

std::vector<std::optional<double>> ParseCgFractions(const json& doc) {
  std::vector<std::optional<double>> out;
  for (const json& v : json_util::GetArray(doc, "cg_fractions", "experiment")) {
    if (v.is_null()) {
      out.push_back(std::nullopt);
    } else if (v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0) {
      out.push_back(v.get<double>());
    } else {
      throw ParseError("experiment: cg_fractions entries must be null or in [0, 1]");
    }
  }
  return out;
}

std::vector<int> IntList(const json& doc, const std::string& key) {
  std::vector<int> out;
  for (const json& v : json_util::GetArray(doc, key, "experiment")) {
    if (!v.is_number_integer()) {
      throw ParseError("experiment: '" + key + "' must hold integers");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<double> NumberList(const json& doc, const std::string& key) {
  std::vector<double> out;
  for (const json& v : json_util::GetArray(doc, key, "experiment")) {
    if (!v.is_number()) throw ParseError("experiment: '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SizePoint ParseSize(const json& j) {
  json_util::RequireObject(j, "size");
  json_util::CheckKeys(j, {"sfcs", "users", "total_users"}, "size");
  SizePoint s;
  s.num_sfcs = json_util::Get<int>(j, "sfcs", "size");
  if (s.num_sfcs < 1) throw ValidationError("size: sfcs must be at least 1");
  if (j.contains("users") == j.contains("total_users")) {
    throw ParseError("size: give exactly one of 'users' and 'total_users'");
  }
  if (j.contains("users")) {
    s.users = json_util::Get<int>(j, "users", "size");
  } else {
    const int total = json_util::Get<int>(j, "total_users", "size");
    if (total % s.num_sfcs != 0) {
      throw ValidationError("size: total_users must split evenly over the SFCs");
    }
    s.users = total / s.num_sfcs;
  }
  if (s.users < 1) throw ValidationError("size: users must be at least 1");
  return s;
}

}  // namespace

ExperimentSpec ParseExperimentSpec(std::string_view text,
                                   const std::filesystem::path& base_dir) {
  json doc = json_util::ParseDocument(text, "experiment");
  json_util::RequireObject(doc, "experiment");
  json_util::CheckKeys(
      doc,
      {"name", "description", "topology", "catalog", "kind", "template",
       "sizes", "sfcs", "users", "total_users", "costs", "omegas", "kappas",
       "h", "orientation", "modes", "cg_fractions", "iterations", "seed",
       "allow_same_endpoints", "hca", "sota"},
      "experiment");

  ExperimentSpec spec;
  spec.name = json_util::GetOr<std::string>(doc, "name", "experiment", "experiment");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  spec.network = std::make_shared<const PhysicalNetwork>(LoadTopologyFile(
      resolve(json_util::Get<std::string>(doc, "topology", "experiment"))));
  spec.catalog = std::make_shared<const Catalog>(
      doc.contains("catalog")
          ? LoadCatalogFile(resolve(json_util::Get<std::string>(doc, "catalog", "experiment")))
          : DefaultCatalog());

  const std::string kind = json_util::GetOr<std::string>(doc, "kind", "mixed", "experiment");
  if (kind == "mixed") {
    spec.kind = ScenarioKind::kMixed;
    if (doc.contains("template")) {
      throw ParseError("experiment: 'template' only applies to homogeneous runs");
    }
  } else if (kind == "homogeneous") {
    spec.kind = ScenarioKind::kHomogeneous;
    spec.template_name = json_util::Get<std::string>(doc, "template", "experiment");
    if (!spec.catalog->FindTemplate(spec.template_name)) {
      throw ValidationError("experiment: unknown template '" + spec.template_name + "'");
    }
  } else {
    throw ParseError("experiment: kind must be 'mixed' or 'homogeneous'");
  }

  // Sizes: an explicit list, or the product of sfcs with users/total_users.
  if (doc.contains("sizes")) {
    if (doc.contains("sfcs") || doc.contains("users") || doc.contains("total_users")) {
      throw ParseError("experiment: 'sizes' excludes 'sfcs'/'users'/'total_users'");
    }
    for (const json& j : json_util::GetArray(doc, "sizes", "experiment")) {
      spec.sizes.push_back(ParseSize(j));
    }
  } else {
    const std::vector<int> sfcs = IntList(doc, "sfcs");
    const bool total = doc.contains("total_users");
    if (total == doc.contains("users")) {
      throw ParseError("experiment: give exactly one of 'users' and 'total_users'");
    }
    const std::vector<int> users = IntList(doc, total ? "total_users" : "users");
    for (int c : sfcs) {
      for (int u : users) {
        json j = {{"sfcs", c}, {total ? "total_users" : "users", u}};
        spec.sizes.push_back(ParseSize(j));
      }
    }
  }

  if (doc.contains("costs")) {
    if (doc.contains("omegas") || doc.contains("kappas")) {
      throw ParseError("experiment: 'costs' excludes 'omegas'/'kappas'");
    }
    for (const json& j : json_util::GetArray(doc, "costs", "experiment")) {
      json_util::RequireObject(j, "cost");
      json_util::CheckKeys(j, {"omega", "kappa"}, "cost");
      spec.costs.push_back({json_util::Get<double>(j, "omega", "cost"),
                            json_util::Get<double>(j, "kappa", "cost")});
    }
  } else {
    const std::vector<double> omegas =
        doc.contains("omegas") ? NumberList(doc, "omegas") : std::vector<double>{0.0};
    const std::vector<double> kappas =
        doc.contains("kappas") ? NumberList(doc, "kappas") : std::vector<double>{0.0};
    for (double w : omegas) {
      for (double k : kappas) spec.costs.push_back({w, k});
    }
  }
  for (const CostPoint& c : spec.costs) {
    if (!(c.omega >= 0.0) || !(c.kappa >= 0.0) || std::isinf(c.omega) ||
        std::isinf(c.kappa)) {
      throw ValidationError("experiment: cost parameters must be finite and non-negative");
    }
  }

  spec.h = json_util::GetOr<double>(doc, "h", 0.01, "experiment");
  if (doc.contains("orientation")) {
    spec.orientation = ParseCouplingOrientation(
        json_util::Get<std::string>(doc, "orientation", "experiment"));
  }
  if (doc.contains("modes")) {
    spec.modes.clear();
    for (const json& m : json_util::GetArray(doc, "modes", "experiment")) {
      if (!m.is_string()) throw ParseError("experiment: modes must be strings");
      spec.modes.push_back(ParseNodeModel(m.get<std::string>()));
    }
  }
  if (doc.contains("cg_fractions")) {
    spec.cg_fractions = ParseCgFractions(doc);
    for (const auto& cg : spec.cg_fractions) {
      if (cg && spec.kind != ScenarioKind::kMixed) {
        throw ValidationError("experiment: cg_fractions need a mixed scenario");
      }
      if (cg && !spec.catalog->FindTemplate("CloudGaming")) {
        throw ValidationError("experiment: cg_fractions need a CloudGaming template");
      }
    }
  }
  spec.iterations = json_util::GetOr<int>(doc, "iterations", 1, "experiment");
  spec.seed = json_util::GetOr<std::uint64_t>(doc, "seed", 1, "experiment");
  spec.allow_same_endpoints =
      json_util::GetOr<bool>(doc, "allow_same_endpoints", true, "experiment");

  if (doc.contains("hca")) {
    const json& j = doc.at("hca");
    json_util::RequireObject(j, "hca");
    json_util::CheckKeys(j, {"k_max", "self_check", "phase2_inactive_only"}, "hca");
    spec.k_max = json_util::GetOr<int>(j, "k_max", spec.k_max, "hca");
    spec.self_check = json_util::GetOr<bool>(j, "self_check", spec.self_check, "hca");
    spec.phase2_inactive_only = json_util::GetOr<bool>(
        j, "phase2_inactive_only", spec.phase2_inactive_only, "hca");
  }
  if (doc.contains("sota")) {
    const json& j = doc.at("sota");
    json_util::RequireObject(j, "sota");
    json_util::CheckKeys(j, {"K", "L", "saturation_cap"}, "sota");
    spec.sota.K = json_util::GetOr<int>(j, "K", spec.sota.K, "sota");
    spec.sota.L = json_util::GetOr<double>(j, "L", spec.sota.L, "sota");
    spec.sota.saturation_cap =
        json_util::GetOr<double>(j, "saturation_cap", spec.sota.saturation_cap, "sota");
  }

  if (spec.iterations < 1) throw ValidationError("experiment: iterations must be >= 1");
  if (spec.sizes.empty() || spec.costs.empty() || spec.modes.empty() ||
      spec.cg_fractions.empty()) {
    throw ValidationError("experiment: every grid dimension needs a value");
  }
  if (spec.k_max < 1) throw ValidationError("experiment: k_max must be >= 1");
  if (spec.sota.K < 1 || !(spec.sota.L > 0.0) ||
      !(spec.sota.saturation_cap > 0.0 && spec.sota.saturation_cap < 1.0)) {
    throw ValidationError("experiment: invalid sota parameters");
  }
  if (!spec.allow_same_endpoints && spec.network->num_nodes() < 2) {
    throw ValidationError("experiment: distinct endpoints need two nodes");
  }
  // Surface coupling errors (e.g. h = 0 with the literal orientation) now.
  for (const CostPoint& c : spec.costs) {
    try {
      CoupledCosts(c.omega, c.kappa, spec.h, spec.orientation);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("experiment: ") + e.what());
    }
  }
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::filesystem::path& path) {
  return ParseExperimentSpec(json_util::ReadFile(path), path.parent_path());
}

std::vector<GridPoint> ExpandGrid(const ExperimentSpec& spec) {
  std::vector<GridPoint> out;
  for (const CostPoint& cost : spec.costs) {
    for (NodeModel mode : spec.modes) {
      for (const auto& cg : spec.cg_fractions) {
        for (const SizePoint& size : spec.sizes) {
          out.push_back({size, cost, mode, cg});
        }
      }
    }
  }
  return out;
}

std::uint64_t InstanceSeed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ index);
}

Scenario GenScenario(const ExperimentSpec& spec, const SizePoint& size,
                     std::optional<double> cg_fraction,
                     std::shared_ptr<const PhysicalNetwork> network,
                     std::uint64_t index) {
  std::mt19937_64 rng(InstanceSeed(spec.seed, index));
  const Catalog& catalog = *spec.catalog;
  const auto& templates = catalog.templates();
  const SfcTemplate* fixed =
      spec.kind == ScenarioKind::kHomogeneous ? catalog.FindTemplate(spec.template_name)
                                              : nullptr;
  const SfcTemplate* cg = cg_fraction ? catalog.FindTemplate("CloudGaming") : nullptr;
  std::vector<const SfcTemplate*> others;
  for (const SfcTemplate& t : templates) {
    if (&t != cg) others.push_back(&t);
  }
  const std::uint64_t n = network->num_nodes();

  std::vector<SfcInstance> sfcs;
  for (int i = 0; i < size.num_sfcs; ++i) {
    const SfcTemplate* t = fixed;
    if (!t && cg) {
      // Cloud Gaming with the given share; the rest uniform over the others.
      const bool is_cg = UniformUnit(rng) < *cg_fraction;
      t = is_cg || others.empty() ? cg : others[UniformBelow(rng, others.size())];
    } else if (!t) {
      t = &templates[UniformBelow(rng, templates.size())];
    }
    const NodeId start = static_cast<NodeId>(UniformBelow(rng, n));
    NodeId end = static_cast<NodeId>(UniformBelow(rng, n));
    while (!spec.allow_same_endpoints && end == start) {
      end = static_cast<NodeId>(UniformBelow(rng, n));
    }
    sfcs.push_back(Instantiate(catalog, *t, i, start, end, size.users, *network));
  }
  return Scenario(std::move(network), spec.catalog, std::move(sfcs));
}

MeanCi MeanWithCi(const std::vector<double>& xs) {
  MeanCi out;
  if (xs.empty()) {
    out.mean = out.ci95 = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double s = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  out.ci95 = 1.96 * s / std::sqrt(static_cast<double>(xs.size()));
  return out;
}

namespace {

PointSummary Summarize(const GridPoint& point,
                       const std::vector<const InstanceResult*>& rows) {
  PointSummary s;
  s.point = point;
  s.instances = static_cast<int>(rows.size());
  std::vector<double> active, latency, runtime;
  for (const InstanceResult* r : rows) {
    runtime.push_back(r->runtime_ms);
    if (!r->feasible) continue;
    ++s.feasible;
    active.push_back(r->active_nodes);
    latency.push_back(r->mean_latency_ms);
  }
  s.infeasible_pct = s.instances == 0
                         ? 0.0
                         : 100.0 * (s.instances - s.feasible) / s.instances;
  const MeanCi a = MeanWithCi(active);
  const MeanCi l = MeanWithCi(latency);
  s.mean_active = a.mean;
  s.ci95_active = a.ci95;
  s.mean_latency_ms = l.mean;
  s.ci95_latency_ms = l.ci95;
  s.mean_runtime_ms = MeanWithCi(runtime).mean;
  return s;
}

InstanceResult RunInstance(const ExperimentSpec& spec, const GridPoint& point,
                           std::shared_ptr<const PhysicalNetwork> network,
                           int point_index, int instance) {
  const Scenario scenario =
      GenScenario(spec, point.size, point.cg_fraction, std::move(network), instance);
  HcaConfig config;
  config.model.mode = point.mode;
  config.model.sota = spec.sota;
  config.k_max = spec.k_max;
  config.self_check = spec.self_check;
  config.phase2_inactive_only = spec.phase2_inactive_only;
  config.rng_seed = InstanceSeed(spec.seed, instance);
  const HcaOutcome outcome = RunHca(scenario, config);

  InstanceResult r;
  r.point = point_index;
  r.instance = instance;
  r.feasible = outcome.success();
  r.phase2_runs = outcome.stats.phase2_runs;
  r.runtime_ms = outcome.stats.runtime_ms;
  if (r.feasible) {
    r.active_nodes = outcome.embedding.num_active();
    double sum = 0.0;
    for (const auto& [id, latency] : outcome.per_sfc_latency) sum += latency;
    r.mean_latency_ms =
        outcome.per_sfc_latency.empty() ? 0.0 : sum / outcome.per_sfc_latency.size();
  }
  return r;
}

// Runs fn(task) for task in [0, count) on `jobs` threads.
template <typename Fn>
void ParallelFor(int count, int jobs, Fn fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t) {
    threads.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentSpec& spec, int jobs) {
  const std::vector<GridPoint> grid = ExpandGrid(spec);
  // One costed copy of the topology per cost point.
  std::map<std::pair<double, double>, std::shared_ptr<const PhysicalNetwork>> networks;
  for (const CostPoint& c : spec.costs) {
    auto& slot = networks[{c.omega, c.kappa}];
    if (!slot) {
      slot = std::make_shared<const PhysicalNetwork>(spec.network->WithUniformCosts(
          CoupledCosts(c.omega, c.kappa, spec.h, spec.orientation)));
    }
  }

  ExperimentResult result;
  const int per_point = spec.iterations;
  const int total = static_cast<int>(grid.size()) * per_point;
  result.instances.resize(total);
  ParallelFor(total, jobs, [&](int task) {
    const int p = task / per_point;
    const int i = task % per_point;
    const GridPoint& point = grid[p];
    result.instances[task] = RunInstance(
        spec, point, networks.at({point.cost.omega, point.cost.kappa}), p, i);
  });

  for (int p = 0; p < static_cast<int>(grid.size()); ++p) {
    std::vector<const InstanceResult*> rows;
    for (int i = 0; i < per_point; ++i) rows.push_back(&result.instances[p * per_point + i]);
    result.points.push_back(Summarize(grid[p], rows));
  }
  return result;
}

std::string EmitCsv(const ExperimentResult& result, const CsvOptions& options) {
  std::string out =
      "point,num_sfcs,users,omega,kappa,mode,cg_fraction,instances,feasible,"
      "infeasible_pct,mean_active,ci95_active,mean_latency_ms,ci95_latency_ms";
  if (options.include_runtime) out += ",mean_runtime_ms";
  out += "\n";
  for (std::size_t p = 0; p < result.points.size(); ++p) {
    const PointSummary& s = result.points[p];
    if (options.filter_infeasible && s.infeasible_pct >= 20.0) continue;
    out += std::to_string(p) + "," + std::to_string(s.point.size.num_sfcs) + "," +
           std::to_string(s.point.size.users) + "," + Num(s.point.cost.omega) + "," +
           Num(s.point.cost.kappa) + "," + ToString(s.point.mode) + "," +
           CgText(s.point.cg_fraction) + "," + std::to_string(s.instances) + "," +
           std::to_string(s.feasible) + "," + Num(s.infeasible_pct) + "," +
           Num(s.mean_active) + "," + Num(s.ci95_active) + "," +
           Num(s.mean_latency_ms) + "," + Num(s.ci95_latency_ms);
    if (options.include_runtime) out += "," + Num(s.mean_runtime_ms);
    out += "\n";
  }
  return out;
}

std::string EmitAuditCsv(const ExperimentResult& result, const CsvOptions& options) {
  std::string out = "point,instance,feasible,active_nodes,mean_latency_ms,phase2_runs";
  if (options.include_runtime) out += ",runtime_ms";
  out += "\n";
  for (const InstanceResult& r : result.instances) {
    out += std::to_string(r.point) + "," + std::to_string(r.instance) + "," +
           (r.feasible ? "1" : "0") + "," +
           (r.feasible ? std::to_string(r.active_nodes) : std::string()) + "," +
           (r.feasible ? Num(r.mean_latency_ms) : std::string()) + "," +
           std::to_string(r.phase2_runs);
    if (options.include_runtime) out += "," + Num(r.runtime_ms);
    out += "\n";
  }
  return out;
}

std::vector<ComparisonRow> Compare(const ExperimentSpec& spec, int jobs) {
  ExperimentSpec paired = spec;
  paired.modes = {NodeModel::kSharing, NodeModel::kSota};
  const ExperimentResult result = RunExperiment(paired, jobs);
  const std::vector<GridPoint> grid = ExpandGrid(paired);
  const int per_point = paired.iterations;

  std::vector<ComparisonRow> rows;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (grid[p].mode != NodeModel::kSharing) continue;
    // The matching utilization-model point has the same cost, cg and size.
    std::size_t q = 0;
    for (; q < grid.size(); ++q) {
      if (grid[q].mode == NodeModel::kSota && grid[q].cost == grid[p].cost &&
          grid[q].cg_fraction == grid[p].cg_fraction && grid[q].size == grid[p].size) {
        break;
      }
    }
    ComparisonRow row;
    row.size = grid[p].size;
    row.cost = grid[p].cost;
    row.cg_fraction = grid[p].cg_fraction;
    row.sharing = result.points[p];
    row.sota = result.points[q];
    std::vector<double> da, dl;
    for (int i = 0; i < per_point; ++i) {
      const InstanceResult& a = result.instances[p * per_point + i];
      const InstanceResult& b = result.instances[q * per_point + i];
      if (!a.feasible || !b.feasible) continue;
      da.push_back(a.active_nodes - b.active_nodes);
      dl.push_back(a.mean_latency_ms - b.mean_latency_ms);
    }
    row.paired = static_cast<int>(da.size());
    row.delta_active = MeanWithCi(da);
    row.delta_latency_ms = MeanWithCi(dl);
    rows.push_back(row);
  }
  return rows;
}

std::string EmitComparisonCsv(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "num_sfcs,users,omega,kappa,cg_fraction,paired,"
      "sharing_infeasible_pct,sota_infeasible_pct,"
      "sharing_mean_active,sota_mean_active,delta_active,ci95_delta_active,"
      "sharing_mean_latency_ms,sota_mean_latency_ms,delta_latency_ms,"
      "ci95_delta_latency_ms\n";
  for (const ComparisonRow& r : rows) {
    out += std::to_string(r.size.num_sfcs) + "," + std::to_string(r.size.users) + "," +
           Num(r.cost.omega) + "," + Num(r.cost.kappa) + "," + CgText(r.cg_fraction) +
           "," + std::to_string(r.paired) + "," + Num(r.sharing.infeasible_pct) + "," +
           Num(r.sota.infeasible_pct) + "," + Num(r.sharing.mean_active) + "," +
           Num(r.sota.mean_active) + "," + Num(r.delta_active.mean) + "," +
           Num(r.delta_active.ci95) + "," + Num(r.sharing.mean_latency_ms) + "," +
           Num(r.sota.mean_latency_ms) + "," + Num(r.delta_latency_ms.mean) + "," +
           Num(r.delta_latency_ms.ci95) + "\n";
  }
  return out;
}

}  // namespace vnfcons
