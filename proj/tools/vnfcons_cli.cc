// Command-line front end: solve, validate, export-ilp, exact, experiment and
// compare. Exit codes: 0 success, 1 operational error, 2 infeasible or
// invalid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "vnfcons/costs.h"
#include "vnfcons/embedding.h"
#include "vnfcons/harness.h"
#include "vnfcons/hca.h"
#include "vnfcons/ilp.h"
#include "vnfcons/network.h"
#include "vnfcons/services.h"

namespace fs = std::filesystem;
using namespace vnfcons;

namespace {

constexpr int kOk = 0;
constexpr int kOperational = 1;
constexpr int kDomain = 2;

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Topology, catalog and scenario options shared by the per-scenario
// subcommands. Flags override paths named inside the scenario file.
struct ScenarioOptions {
  std::string scenario;
  std::string topology;
  std::string catalog;
  std::optional<double> omega;
  std::optional<double> kappa;
  double h = 0.01;
  std::string orientation = "processing_from_latency";

  void Register(CLI::App* app, bool costs) {
    app->add_option("--scenario", scenario, "Scenario file (JSON)")->required();
    app->add_option("--topology", topology, "Topology file; overrides the scenario's");
    app->add_option("--catalog", catalog, "Catalog file; overrides the scenario's");
    if (costs) {
      app->add_option("--omega", omega, "Uniform context-switching latency (ms)");
      app->add_option("--kappa", kappa, "Uniform upscaling latency (ms)");
      app->add_option("--coupling", h, "Latency/processing coupling factor")->capture_default_str();
      app->add_option("--orientation", orientation, "Coupling orientation")
          ->check(CLI::IsMember({"processing_from_latency", "latency_from_processing"}))
          ->capture_default_str();
    }
  }

  Scenario Load() const {
    const fs::path path(scenario);
    const ScenarioFile file = ParseScenarioFile(ReadText(path), path.parent_path());
    fs::path topo = topology;
    if (topo.empty()) {
      if (!file.topology) throw std::runtime_error("no topology given (use --topology)");
      topo = *file.topology;
    }
    PhysicalNetwork net = LoadTopologyFile(topo);
    for (const std::string& w : net.warnings()) std::cerr << "warning: " << w << "\n";
    if (omega || kappa) {
      net = net.WithUniformCosts(CoupledCosts(omega.value_or(0.0), kappa.value_or(0.0), h,
                                              ParseCouplingOrientation(orientation)));
    }
    std::shared_ptr<const Catalog> cat;
    if (!catalog.empty()) {
      cat = std::make_shared<const Catalog>(LoadCatalogFile(catalog));
    } else if (file.catalog) {
      cat = std::make_shared<const Catalog>(LoadCatalogFile(*file.catalog));
    } else {
      cat = std::make_shared<const Catalog>(DefaultCatalog());
    }
    std::cerr << "config: scenario=" << scenario << " topology=" << topo.string()
              << " catalog=" << (!catalog.empty() ? catalog
                                 : file.catalog ? file.catalog->string()
                                                : std::string("built-in"));
    if (omega || kappa) {
      std::cerr << " omega=" << omega.value_or(0.0) << " kappa=" << kappa.value_or(0.0)
                << " coupling=" << h << " orientation=" << orientation;
    }
    std::cerr << "\n";
    return BuildScenario(file, std::make_shared<const PhysicalNetwork>(std::move(net)),
                         std::move(cat));
  }
};

CostModel MakeModel(const std::string& mode) {
  CostModel model;
  model.mode = ParseNodeModel(mode);
  return model;
}

int RunSolve(const ScenarioOptions& so, const std::string& mode, const std::string& out,
             int k_max, bool no_self_check, bool inactive_only) {
  const Scenario scenario = so.Load();
  HcaConfig config;
  config.model = MakeModel(mode);
  config.k_max = k_max;
  config.self_check = !no_self_check;
  config.phase2_inactive_only = inactive_only;
  std::cerr << "config: mode=" << mode << " k_max=" << k_max
            << " self_check=" << config.self_check
            << " phase2_inactive_only=" << inactive_only << "\n";
  const HcaOutcome outcome = RunHca(scenario, config);
  if (!outcome.success()) {
    std::cout << "status: infeasible\nreason: " << outcome.reason << "\n";
    return kDomain;
  }
  if (!out.empty()) WriteText(out, SerializeEmbedding(outcome.embedding, scenario));
  std::cout << "status: feasible\nactive_nodes: " << outcome.embedding.num_active() << "\n";
  for (const auto& [id, latency] : outcome.per_sfc_latency) {
    const SfcInstance& s = scenario.sfc(id);
    std::cout << "sfc " << id << " (" << s.template_name << "): latency_ms=" << latency
              << " bound_ms=" << s.max_latency << "\n";
  }
  std::cout << "scale_ups: " << outcome.stats.scale_up_successes << "/"
            << outcome.stats.scale_up_attempts
            << " new_instances: " << outcome.stats.new_instances
            << " phase2_runs: " << outcome.stats.phase2_runs << "\n";
  return kOk;
}

int RunValidate(const ScenarioOptions& so, const std::string& mode,
                const std::string& embedding) {
  const Scenario scenario = so.Load();
  std::cerr << "config: mode=" << mode << " embedding=" << embedding << "\n";
  std::optional<Embedding> emb;
  try {
    emb = ParseEmbedding(ReadText(embedding), scenario);
  } catch (const ValidationError& e) {
    // Well-formed file that names links or nodes the scenario lacks.
    std::cout << "invalid embedding: " << e.what() << "\n";
    return kDomain;
  }
  const ValidationReport report = Validate(*emb, scenario, MakeModel(mode));
  if (report.ok()) {
    std::cout << "valid\n";
    return kOk;
  }
  std::cout << report.ToText();
  return kDomain;
}

int RunExportIlp(const ScenarioOptions& so, const std::string& out) {
  const Scenario scenario = so.Load();
  const LinearModel model = BuildModel(scenario);
  WriteText(out, ExportLp(model));
  std::cout << "variables: " << model.variables().size()
            << " constraints: " << model.constraints().size() << "\n";
  return kOk;
}

int RunExact(const ScenarioOptions& so, const ExactLimits& limits, const std::string& out) {
  const Scenario scenario = so.Load();
  std::cerr << "config: max_nfv_nodes=" << limits.max_nfv_nodes
            << " max_requests=" << limits.max_requests << "\n";
  const ExactSolution sol = SolveExact(scenario, limits);
  std::cout << "explored: " << sol.assignments_explored << "\n";
  if (sol.status == ExactStatus::kInfeasible) {
    std::cout << "status: infeasible\n";
    return kDomain;
  }
  std::cout << "status: optimal\nactive_nodes: " << sol.objective << "\n";
  if (!out.empty()) WriteText(out, SerializeEmbedding(sol.embedding, scenario));
  return kOk;
}

ExperimentSpec LoadSpec(const std::string& path, std::optional<std::uint64_t> seed,
                        int jobs) {
  ExperimentSpec spec = LoadExperimentSpec(path);
  if (seed) spec.seed = *seed;
  std::cerr << "config: spec=" << path << " name=" << spec.name
            << " seed=" << spec.seed << " iterations=" << spec.iterations
            << " grid_points=" << ExpandGrid(spec).size() << " jobs=" << jobs << "\n";
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VNF placement and SFC embedding with resource-sharing costs"};
  app.require_subcommand(1);

  ScenarioOptions so;
  std::string mode = "sharing";
  std::string out;
  std::string embedding;
  int k_max = 64;
  bool no_self_check = false;
  bool inactive_only = false;
  ExactLimits limits;
  std::string spec_path;
  std::string audit;
  std::optional<std::uint64_t> seed;
  const unsigned hw = std::thread::hardware_concurrency();
  int jobs = hw == 0 ? 1 : static_cast<int>(hw);
  bool timing = false;
  bool filter_infeasible = false;

  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "Node model")
        ->check(CLI::IsMember({"sharing", "sota"}))
        ->capture_default_str();
  };

  CLI::App* solve = app.add_subcommand("solve", "Embed a scenario with the heuristic");
  so.Register(solve, true);
  add_mode(solve);
  solve->add_option("--out", out, "Write the embedding here");
  solve->add_option("--k-max", k_max, "k-shortest-path cap")->capture_default_str();
  solve->add_flag("--no-self-check", no_self_check,
                  "Do not reject placements that already break the chain's latency bound");
  solve->add_flag("--phase2-inactive-only", inactive_only,
                  "Re-place chains only on inactive nodes");

  CLI::App* validate = app.add_subcommand("validate", "Check an embedding");
  so.Register(validate, true);
  add_mode(validate);
  validate->add_option("--embedding", embedding, "Embedding file")->required();

  CLI::App* export_ilp = app.add_subcommand("export-ilp", "Write the ILP model in LP format");
  so.Register(export_ilp, true);
  export_ilp->add_option("--out", out, "LP file")->required();

  CLI::App* exact = app.add_subcommand("exact", "Solve a tiny scenario exactly");
  so.Register(exact, true);
  exact->add_option("--out", out, "Write the optimal embedding here");
  exact->add_option("--max-nfv-nodes", limits.max_nfv_nodes)->capture_default_str();
  exact->add_option("--max-requests", limits.max_requests)->capture_default_str();

  CLI::App* experiment = app.add_subcommand("experiment", "Run an experiment grid");
  experiment->add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  experiment->add_option("--out", out, "Results CSV")->required();
  experiment->add_option("--audit", audit, "Per-instance CSV");
  experiment->add_option("--seed", seed, "Override the spec's seed");
  experiment->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  experiment->add_flag("--timing", timing, "Include runtime columns");
  experiment->add_flag("--filter-infeasible", filter_infeasible,
                       "Drop points with at least 20% infeasible instances");

  CLI::App* compare = app.add_subcommand("compare", "Paired sharing vs utilization model");
  compare->add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  compare->add_option("--out", out, "Comparison CSV (default: stdout)");
  compare->add_option("--seed", seed, "Override the spec's seed");
  compare->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kOperational;
  }

  try {
    if (*solve) return RunSolve(so, mode, out, k_max, no_self_check, inactive_only);
    if (*validate) return RunValidate(so, mode, embedding);
    if (*export_ilp) return RunExportIlp(so, out);
    if (*exact) return RunExact(so, limits, out);
    if (*experiment) {
      const ExperimentSpec spec = LoadSpec(spec_path, seed, jobs);
      const ExperimentResult result = RunExperiment(spec, jobs);
      CsvOptions options;
      options.include_runtime = timing;
      options.filter_infeasible = filter_infeasible;
      WriteText(out, EmitCsv(result, options));
      if (!audit.empty()) WriteText(audit, EmitAuditCsv(result, options));
      std::cout << "points: " << result.points.size()
                << " instances: " << result.instances.size() << "\n";
      return kOk;
    }
    if (*compare) {
      const ExperimentSpec spec = LoadSpec(spec_path, seed, jobs);
      const std::string csv = EmitComparisonCsv(Compare(spec, jobs));
      if (out.empty()) {
        std::cout << csv;
      } else {
        WriteText(out, csv);
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperational;
  }
  return kOperational;
}
