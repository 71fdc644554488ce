#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "vnfcons/ilp.h"

namespace vnfcons {

namespace {

void AppendParts(std::string&) {}

template <typename T, typename... Rest>
void AppendParts(std::string& out, const T& first, const Rest&... rest) {
  out += '.';
  out += std::to_string(first);
  AppendParts(out, rest...);
}

// Name("e", 0, 2, 7) -> "e.0.2.7"
template <typename... Ints>
std::string Name(std::string_view prefix, const Ints&... parts) {
  std::string out(prefix);
  AppendParts(out, parts...);
  return out;
}

// Chain points of an SFC: 0 is the start, 1..n the requests, n+1 the end.
// Virtual link k joins point k to point k+1.
class Builder {
 public:
  Builder(const Scenario& scenario, const BigM& bigm)
      : scenario_(scenario), net_(scenario.network()), bigm_(bigm) {}

  LinearModel Build() {
    DeclareVariables();
    PlacementRows();
    RoutingRows();
    PerformanceRows();
    std::vector<Term> obj;
    for (const PhysicalNode& v : net_.nodes()) obj.push_back({Var("a", v.id), 1.0});
    model_.SetObjective(std::move(obj));
    return std::move(model_);
  }

 private:
  int Var(std::string_view prefix, auto... parts) {
    return model_.Var(Name(prefix, parts...));
  }
  int num_vnfs() const {
    return static_cast<int>(scenario_.catalog().vnfs().size());
  }
  // Candidate (x, y) endpoints of virtual link k; fixed endpoints are pruned.
  std::vector<std::pair<NodeId, NodeId>> Endpoints(const SfcInstance& s,
                                                   int k) const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const PhysicalNode& x : net_.nodes()) {
      if (k == 0 && x.id != s.start) continue;
      for (const PhysicalNode& y : net_.nodes()) {
        if (k == s.length() && y.id != s.end) continue;
        out.emplace_back(x.id, y.id);
      }
    }
    return out;
  }
  // Upper bound on a node's per-request latency.
  double MaxNodeLatency(const PhysicalNode& v) const {
    const double n = std::ceil(v.cores);
    return v.costs.csw_latency * n * num_vnfs() + v.costs.up_latency * n;
  }

  void DeclareVariables() {
    for (const SfcInstance& s : scenario_.sfcs()) {
      for (int p = 0; p <= s.length() + 1; ++p) {
        for (const PhysicalNode& v : net_.nodes()) {
          model_.AddVariable(Name("m", s.id, p, v.id), VarKind::kBinary, 0, 1);
        }
      }
    }
    for (int f = 0; f < num_vnfs(); ++f) {
      for (const PhysicalNode& v : net_.nodes()) {
        model_.AddVariable(Name("c", f, v.id), VarKind::kContinuous, 0.0,
                           v.cores);
        model_.AddVariable(Name("i", f, v.id), VarKind::kBinary, 0, 1);
        model_.AddVariable(Name("n", f, v.id), VarKind::kInteger, 0.0,
                           std::ceil(v.cores));
      }
    }
    for (const PhysicalNode& v : net_.nodes()) {
      model_.AddVariable(Name("psi", v.id), VarKind::kContinuous);
      model_.AddVariable(Name("a", v.id), VarKind::kBinary, 0, 1);
    }
    for (const SfcInstance& s : scenario_.sfcs()) {
      model_.AddVariable(Name("sigma", s.id), VarKind::kContinuous);
      for (int k = 0; k < s.num_vlinks(); ++k) {
        for (auto [x, y] : Endpoints(s, k)) {
          model_.AddVariable(Name("pair", s.id, k, x, y), VarKind::kBinary, 0,
                             1);
          for (const PhysicalLink& l : net_.links()) {
            model_.AddVariable(Name("e", s.id, k, l.id, x, y),
                               VarKind::kBinary, 0, 1);
          }
        }
      }
      for (const VnfRequest& r : s.requests) {
        for (const PhysicalNode& v : net_.nodes()) {
          model_.AddVariable(Name("q", s.id, r.position, v.id),
                             VarKind::kContinuous, 0.0, MaxNodeLatency(v));
        }
      }
    }
  }

  void PlacementRows() {
    for (const SfcInstance& s : scenario_.sfcs()) {
      const int last = s.length() + 1;
      for (int p : {0, last}) {
        const NodeId eta = p == 0 ? s.start : s.end;
        for (const PhysicalNode& v : net_.nodes()) {
          model_.AddConstraint(Name("fix", s.id, p, v.id),
                               {{Var("m", s.id, p, v.id), 1.0}},
                               Relation::kEq, v.id == eta ? 1.0 : 0.0);
        }
      }
      for (const VnfRequest& r : s.requests) {
        std::vector<Term> terms;
        for (const PhysicalNode& v : net_.nodes()) {
          terms.push_back({Var("m", s.id, r.position + 1, v.id), 1.0});
        }
        model_.AddConstraint(Name("map", s.id, r.position), std::move(terms),
                             Relation::kEq, 1.0);
      }
    }

    for (int f = 0; f < num_vnfs(); ++f) {
      for (const PhysicalNode& v : net_.nodes()) {
        const int c = Var("c", f, v.id);
        const int i = Var("i", f, v.id);
        const int n = Var("n", f, v.id);
        std::vector<Term> demand;
        std::vector<Term> presence{{i, 1.0}};
        for (const SfcInstance& s : scenario_.sfcs()) {
          for (const VnfRequest& r : s.requests) {
            if (r.vnf != f) continue;
            const int m = Var("m", s.id, r.position + 1, v.id);
            demand.push_back({m, r.processing});
            presence.push_back({m, -1.0});
          }
        }
        demand.push_back({c, -1.0});
        model_.AddConstraint(Name("inst", f, v.id), std::move(demand),
                             Relation::kLe, 0.0);
        model_.AddConstraint(Name("ibig", f, v.id), {{c, 1.0}, {i, -bigm_.m_gamma}},
                             Relation::kLe, 0.0);
        model_.AddConstraint(Name("ieps", f, v.id), {{i, 1.0}, {c, -1.0}},
                             Relation::kLe, 1.0 - bigm_.eps);
        model_.AddConstraint(Name("ione", f, v.id), std::move(presence),
                             Relation::kLe, 0.0);
        // n = ceil(c): c <= n < c + 1.
        model_.AddConstraint(Name("ceil", f, v.id), {{c, 1.0}, {n, -1.0}},
                             Relation::kLe, 0.0);
        model_.AddConstraint(Name("ceileps", f, v.id), {{n, 1.0}, {c, -1.0}},
                             Relation::kLe, 1.0 - bigm_.eps);
      }
    }

    for (const PhysicalNode& v : net_.nodes()) {
      const double per_process = v.costs.csw_processing + v.costs.up_processing;
      std::vector<Term> overhead{{Var("psi", v.id), 1.0}};
      std::vector<Term> capacity;
      for (int f = 0; f < num_vnfs(); ++f) {
        if (per_process != 0.0) overhead.push_back({Var("n", f, v.id), -per_process});
        capacity.push_back({Var("c", f, v.id), 1.0});
      }
      capacity.push_back({Var("psi", v.id), 1.0});
      model_.AddConstraint(Name("psi", v.id), std::move(overhead),
                           Relation::kEq, 0.0);
      model_.AddConstraint(Name("cap", v.id), std::move(capacity),
                           Relation::kLe, v.cores);
    }
  }

  void RoutingRows() {
    for (const SfcInstance& s : scenario_.sfcs()) {
      for (int k = 0; k < s.num_vlinks(); ++k) {
        const auto endpoints = Endpoints(s, k);
        std::vector<Term> source;
        std::vector<Term> destination;
        for (auto [x, y] : endpoints) {
          const int pair = Var("pair", s.id, k, x, y);
          const int mx = Var("m", s.id, k, x);
          const int my = Var("m", s.id, k + 1, y);
          model_.AddConstraint(Name("and1", s.id, k, x, y),
                               {{pair, 1.0}, {mx, -1.0}}, Relation::kLe, 0.0);
          model_.AddConstraint(Name("and2", s.id, k, x, y),
                               {{pair, 1.0}, {my, -1.0}}, Relation::kLe, 0.0);
          model_.AddConstraint(Name("and3", s.id, k, x, y),
                               {{pair, 1.0}, {mx, -1.0}, {my, -1.0}},
                               Relation::kGe, -1.0);
          for (const PhysicalLink& l : net_.links()) {
            model_.AddConstraint(Name("epair", s.id, k, l.id, x, y),
                                 {{Var("e", s.id, k, l.id, x, y), 1.0}, {pair, -1.0}},
                                 Relation::kLe, 0.0);
          }
          // e <= pair makes e * pair = e, so the source and destination
          // products reduce to the e terms themselves.
          for (LinkId l : net_.out_links(x)) {
            source.push_back({Var("e", s.id, k, l, x, y), 1.0});
          }
          for (LinkId l : net_.in_links(y)) {
            destination.push_back({Var("e", s.id, k, l, x, y), 1.0});
          }
        }
        model_.AddConstraint(Name("src", s.id, k), std::move(source),
                             Relation::kEq, 1.0);
        model_.AddConstraint(Name("dst", s.id, k), std::move(destination),
                             Relation::kEq, 1.0);

        for (auto [x, y] : endpoints) {
          auto e = [&](LinkId l) { return Var("e", s.id, k, l, x, y); };
          if (x != y) {
            std::vector<Term> in_x, out_y;
            for (LinkId l : net_.in_links(x)) in_x.push_back({e(l), 1.0});
            for (LinkId l : net_.out_links(y)) out_y.push_back({e(l), 1.0});
            model_.AddConstraint(Name("noin", s.id, k, x, y), std::move(in_x),
                                 Relation::kEq, 0.0);
            model_.AddConstraint(Name("noout", s.id, k, x, y), std::move(out_y),
                                 Relation::kEq, 0.0);
          }
          for (const PhysicalNode& w : net_.nodes()) {
            if (w.id == x || w.id == y) continue;
            std::vector<Term> balance, inflow;
            for (LinkId l : net_.in_links(w.id)) {
              balance.push_back({e(l), 1.0});
              inflow.push_back({e(l), 1.0});
            }
            for (LinkId l : net_.out_links(w.id)) balance.push_back({e(l), -1.0});
            model_.AddConstraint(Name("trans", s.id, k, x, y, w.id),
                                 std::move(balance), Relation::kEq, 0.0);
            model_.AddConstraint(Name("unsplit", s.id, k, x, y, w.id),
                                 std::move(inflow), Relation::kLe, 1.0);
          }
          for (const PhysicalLink& l : net_.links()) {
            if (x != y && l.is_self_loop()) {
              model_.AddConstraint(Name("loop", s.id, k, l.id, x, y),
                                   {{e(l.id), 1.0}}, Relation::kEq, 0.0);
            }
            if (x == y && !l.is_self_loop()) {
              model_.AddConstraint(Name("onlyloop", s.id, k, l.id, x),
                                   {{e(l.id), 1.0}}, Relation::kEq, 0.0);
            }
          }
        }
      }
    }
  }

  void PerformanceRows() {
    for (const PhysicalLink& l : net_.links()) {
      if (std::isinf(l.bandwidth)) continue;
      std::vector<Term> load;
      for (const SfcInstance& s : scenario_.sfcs()) {
        for (int k = 0; k < s.num_vlinks(); ++k) {
          for (auto [x, y] : Endpoints(s, k)) {
            load.push_back({Var("e", s.id, k, l.id, x, y), s.link_bandwidth[k]});
          }
        }
      }
      model_.AddConstraint(Name("bw", l.id), std::move(load), Relation::kLe,
                           l.bandwidth);
    }

    for (const SfcInstance& s : scenario_.sfcs()) {
      std::vector<Term> sigma{{Var("sigma", s.id), 1.0}};
      for (const VnfRequest& r : s.requests) {
        for (const PhysicalNode& v : net_.nodes()) {
          // q = m * L with L = omega * sum_f n_f + kappa * n_tau in
          // [0, Lmax]:  q <= Lmax m,  q <= L,  q >= L - Lmax (1 - m).
          const int q = Var("q", s.id, r.position, v.id);
          const int m = Var("m", s.id, r.position + 1, v.id);
          const double lmax = MaxNodeLatency(v);
          std::vector<Term> node_latency;
          for (int f = 0; f < num_vnfs(); ++f) {
            double coef = v.costs.csw_latency;
            if (f == r.vnf) coef += v.costs.up_latency;
            if (coef != 0.0) node_latency.push_back({Var("n", f, v.id), coef});
          }
          std::vector<Term> upper{{q, 1.0}};
          std::vector<Term> lower{{q, 1.0}};
          for (const Term& t : node_latency) {
            upper.push_back({t.var, -t.coef});
            lower.push_back({t.var, -t.coef});
          }
          std::vector<Term> gate{{q, 1.0}};
          if (lmax != 0.0) {
            lower.push_back({m, -lmax});
            gate.push_back({m, -lmax});
          }
          model_.AddConstraint(Name("qm", s.id, r.position, v.id),
                               std::move(gate), Relation::kLe, 0.0);
          model_.AddConstraint(Name("qle", s.id, r.position, v.id),
                               std::move(upper), Relation::kLe, 0.0);
          model_.AddConstraint(Name("qge", s.id, r.position, v.id),
                               std::move(lower), Relation::kGe, -lmax);
          sigma.push_back({q, -1.0});
        }
      }
      model_.AddConstraint(Name("sigma", s.id), std::move(sigma),
                           Relation::kEq, 0.0);

      std::vector<Term> latency;
      for (int k = 0; k < s.num_vlinks(); ++k) {
        for (auto [x, y] : Endpoints(s, k)) {
          for (const PhysicalLink& l : net_.links()) {
            if (l.latency != 0.0) {
              latency.push_back({Var("e", s.id, k, l.id, x, y), l.latency});
            }
          }
        }
      }
      latency.push_back({Var("sigma", s.id), 1.0});
      model_.AddConstraint(Name("lat", s.id), std::move(latency), Relation::kLe,
                           s.max_latency);
    }

    for (const PhysicalNode& v : net_.nodes()) {
      const int a = Var("a", v.id);
      std::vector<Term> upper, lower{{a, 1.0}};
      for (int f = 0; f < num_vnfs(); ++f) {
        upper.push_back({Var("i", f, v.id), 1.0});
        lower.push_back({Var("i", f, v.id), -1.0});
      }
      upper.push_back({a, -bigm_.m_f});
      model_.AddConstraint(Name("acthi", v.id), std::move(upper),
                           Relation::kLe, 0.0);
      model_.AddConstraint(Name("actlo", v.id), std::move(lower),
                           Relation::kLe, 0.0);
    }
  }

  const Scenario& scenario_;
  const PhysicalNetwork& net_;
  BigM bigm_;
  LinearModel model_;
};

}  // namespace

int LinearModel::AddVariable(std::string name, VarKind kind, double lower,
                             double upper) {
  if (index_.contains(name)) {
    throw std::invalid_argument("duplicate variable " + name);
  }
  const int id = static_cast<int>(variables_.size());
  index_.emplace(name, id);
  variables_.push_back({std::move(name), kind, lower, upper});
  return id;
}

void LinearModel::AddConstraint(std::string name, std::vector<Term> terms,
                                Relation relation, double rhs) {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(variables_.size())) {
      throw std::invalid_argument("row " + name + " uses an undeclared variable");
    }
  }
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
}

std::optional<int> LinearModel::FindVariable(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LinearModel::Var(std::string_view name) const {
  auto id = FindVariable(name);
  if (!id) throw std::out_of_range("unknown variable " + std::string(name));
  return *id;
}

std::size_t LinearModel::CountKind(VarKind kind) const {
  return std::count_if(variables_.begin(), variables_.end(),
                       [kind](const Variable& v) { return v.kind == kind; });
}

std::size_t LinearModel::CountPrefix(std::string_view prefix) const {
  return std::count_if(variables_.begin(), variables_.end(),
                       [prefix](const Variable& v) {
                         return v.name.size() > prefix.size() &&
                                v.name.starts_with(prefix) &&
                                v.name[prefix.size()] == '.';
                       });
}

std::string FamilyOf(std::string_view row_name) {
  return std::string(row_name.substr(0, row_name.find('.')));
}

bool IsEpsFamily(std::string_view family) {
  return family == "ieps" || family == "ceileps";
}

BigM DefaultBigM(const Scenario& scenario) {
  double max_cores = 0.0;
  for (const PhysicalNode& v : scenario.network().nodes()) {
    max_cores = std::max(max_cores, v.cores);
  }
  BigM m;
  m.m_gamma = std::floor(max_cores) + 1.0;
  m.m_f = static_cast<double>(scenario.catalog().vnfs().size()) + 1.0;
  m.eps = 1e-6;
  return m;
}

LinearModel BuildModel(const Scenario& scenario, const BigM& bigm) {
  double max_cores = 0.0;
  for (const PhysicalNode& v : scenario.network().nodes()) {
    max_cores = std::max(max_cores, v.cores);
  }
  if (!(bigm.m_gamma > max_cores)) {
    throw std::invalid_argument("M_gamma must exceed the largest node capacity");
  }
  if (!(bigm.m_f > static_cast<double>(scenario.catalog().vnfs().size()))) {
    throw std::invalid_argument("M_F must exceed the number of VNF types");
  }
  if (!(bigm.eps > 0.0 && bigm.eps <= 1e-6)) {
    throw std::invalid_argument("eps must lie in (0, 1e-6]");
  }
  return Builder(scenario, bigm).Build();
}

LinearModel BuildModel(const Scenario& scenario) {
  return BuildModel(scenario, DefaultBigM(scenario));
}

std::vector<double> NaturalAssignment(const LinearModel& model,
                                      const Scenario& scenario,
                                      const Embedding& emb) {
  const PhysicalNetwork& net = scenario.network();
  const int num_vnfs = static_cast<int>(scenario.catalog().vnfs().size());
  std::vector<double> x(model.variables().size(), 0.0);
  auto set = [&](const std::string& name, double value) {
    if (auto id = model.FindVariable(name)) x[*id] = value;
  };

  std::map<std::pair<NodeId, VnfId>, int> processes;
  for (const auto& [v, alloc] : emb.allocations()) {
    double psi = 0.0;
    const PhysicalNode& node = net.node(v);
    bool any = false;
    for (const auto& [f, c] : alloc.cores) {
      const int n = ProcessCount(c);
      processes[{v, f}] = n;
      set(Name("c", f, v), c);
      set(Name("n", f, v), n);
      if (c > 0.0) {
        set(Name("i", f, v), 1.0);
        any = true;
      }
      psi += n * (node.costs.csw_processing + node.costs.up_processing);
    }
    set(Name("psi", v), psi);
    if (any) set(Name("a", v), 1.0);
  }

  for (const SfcInstance& s : scenario.sfcs()) {
    std::vector<std::optional<NodeId>> point(s.length() + 2);
    point.front() = s.start;
    point.back() = s.end;
    for (const VnfRequest& r : s.requests) {
      point[r.position + 1] = emb.NodeOf({s.id, r.position});
    }
    for (int p = 0; p < static_cast<int>(point.size()); ++p) {
      if (point[p]) set(Name("m", s.id, p, *point[p]), 1.0);
    }
    for (int k = 0; k < s.num_vlinks(); ++k) {
      if (!point[k] || !point[k + 1]) continue;
      const NodeId px = *point[k];
      const NodeId py = *point[k + 1];
      set(Name("pair", s.id, k, px, py), 1.0);
      auto it = emb.link_paths().find({s.id, k});
      if (it == emb.link_paths().end()) continue;
      for (LinkId l : it->second.links) set(Name("e", s.id, k, l, px, py), 1.0);
    }
    double sigma = 0.0;
    for (const VnfRequest& r : s.requests) {
      if (!point[r.position + 1]) continue;
      const NodeId v = *point[r.position + 1];
      const PhysicalNode& node = net.node(v);
      double latency = 0.0;
      for (int f = 0; f < num_vnfs; ++f) {
        auto pit = processes.find({v, f});
        const int n = pit == processes.end() ? 0 : pit->second;
        latency += node.costs.csw_latency * n;
        if (f == r.vnf) latency += node.costs.up_latency * n;
      }
      set(Name("q", s.id, r.position, v), latency);
      sigma += latency;
    }
    set(Name("sigma", s.id), sigma);
  }
  return x;
}

std::vector<RowViolation> CheckAssignment(const LinearModel& model,
                                          const std::vector<double>& values,
                                          double tol, double eps_slack) {
  if (values.size() != model.variables().size()) {
    throw std::invalid_argument("assignment size does not match the model");
  }
  std::vector<RowViolation> out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const Variable& var = model.variables()[j];
    const double v = values[j];
    double excess = std::max(var.lower - v, v - var.upper);
    if (var.kind != VarKind::kContinuous) {
      excess = std::max(excess, std::abs(v - std::round(v)));
    }
    if (excess > tol) out.push_back({var.name, excess});
  }
  for (const Constraint& row : model.constraints()) {
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * values[t.var];
    double excess = 0.0;
    switch (row.relation) {
      case Relation::kLe: excess = lhs - row.rhs; break;
      case Relation::kGe: excess = row.rhs - lhs; break;
      case Relation::kEq: excess = std::abs(lhs - row.rhs); break;
    }
    const double allowed = IsEpsFamily(FamilyOf(row.name)) ? tol + eps_slack : tol;
    if (excess > allowed) out.push_back({row.name, excess});
  }
  return out;
}

}  // namespace vnfcons
