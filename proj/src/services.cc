#include "vnfcons/services.h"

#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"
#include "json_util.h"

namespace vnfcons {

namespace {

void CheckPositive(double value, const std::string& what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ValidationError(what + " must be finite and > 0");
  }
}

SfcTemplate MakeTemplate(const std::vector<VnfType>& vnfs, std::string name,
                         std::initializer_list<std::string_view> chain,
                         double max_latency, double bw_per_user) {
  SfcTemplate t;
  t.name = std::move(name);
  for (std::string_view symbol : chain) {
    for (const VnfType& v : vnfs) {
      if (v.symbol == symbol) t.chain.push_back(v.id);
    }
  }
  t.max_latency = max_latency;
  t.bw_per_user.assign(t.chain.size() + 1, bw_per_user);
  return t;
}

}  // namespace

Catalog::Catalog(std::vector<VnfType> vnfs, std::vector<SfcTemplate> templates)
    : vnfs_(std::move(vnfs)), templates_(std::move(templates)) {
  std::set<std::string> symbols;
  for (std::size_t i = 0; i < vnfs_.size(); ++i) {
    VnfType& v = vnfs_[i];
    v.id = static_cast<VnfId>(i);
    if (v.symbol.empty()) throw ValidationError("VNF with empty id");
    if (!symbols.insert(v.symbol).second) {
      throw ValidationError("duplicate VNF id '" + v.symbol + "'");
    }
    CheckPositive(v.proc_per_user, "proc_per_user of VNF " + v.symbol);
  }
  std::set<std::string> names;
  for (const SfcTemplate& t : templates_) {
    if (!names.insert(t.name).second) {
      throw ValidationError("duplicate SFC template '" + t.name + "'");
    }
    if (t.chain.empty()) {
      throw ValidationError("SFC template '" + t.name + "' has an empty chain");
    }
    for (VnfId f : t.chain) {
      if (f < 0 || f >= num_vnfs()) {
        throw ValidationError("SFC template '" + t.name +
                              "' references an unknown VNF");
      }
    }
    CheckPositive(t.max_latency, "max latency of SFC " + t.name);
    if (t.bw_per_user.size() != t.chain.size() + 1) {
      throw ValidationError("SFC template '" + t.name +
                            "' needs one bandwidth per virtual link");
    }
    for (double bw : t.bw_per_user) {
      CheckPositive(bw, "bandwidth of SFC " + t.name);
    }
  }
}

std::optional<VnfId> Catalog::FindVnf(std::string_view symbol) const {
  for (const VnfType& v : vnfs_) {
    if (v.symbol == symbol) return v.id;
  }
  return std::nullopt;
}

const SfcTemplate* Catalog::FindTemplate(std::string_view name) const {
  for (const SfcTemplate& t : templates_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Catalog DefaultCatalog() {
  std::vector<VnfType> vnfs = {
      {0, "NAT", "Network Address Translator", 0.00092},
      {1, "FW", "Firewall", 0.0009},
      {2, "TM", "Traffic Monitor", 0.0133},
      {3, "WOC", "WAN Optimization Controller", 0.0054},
      {4, "IDPS", "Intrusion Detection and Prevention", 0.0107},
      {5, "VOC", "Video Optimization Controller", 0.0054},
  };
  std::vector<SfcTemplate> templates = {
      MakeTemplate(vnfs, "WebService", {"NAT", "FW", "TM", "WOC", "IDPS"},
                   500.0, 0.1),
      MakeTemplate(vnfs, "VoIP", {"NAT", "FW", "TM", "FW", "NAT"}, 100.0,
                   0.064),
      MakeTemplate(vnfs, "VideoStreaming", {"NAT", "FW", "TM", "VOC", "IDPS"},
                   100.0, 4.0),
      MakeTemplate(vnfs, "CloudGaming", {"NAT", "FW", "VOC", "WOC", "IDPS"},
                   60.0, 4.0),
  };
  return Catalog(std::move(vnfs), std::move(templates));
}

Catalog LoadCatalog(std::string_view text) {
  using nlohmann::json;
  json doc = json_util::ParseDocument(text, "catalog");
  json_util::RequireObject(doc, "catalog");
  json_util::CheckKeys(doc, {"name", "description", "vnfs", "sfcs"},
                       "catalog");
  std::vector<VnfType> vnfs;
  for (const json& jv : json_util::GetArray(doc, "vnfs", "catalog")) {
    json_util::RequireObject(jv, "vnf");
    json_util::CheckKeys(jv, {"id", "name", "proc_per_user"}, "vnf");
    VnfType v;
    v.id = static_cast<VnfId>(vnfs.size());
    v.symbol = json_util::GetName(jv, "id", "vnf");
    v.name = json_util::GetOr<std::string>(jv, "name", v.symbol, "vnf");
    v.proc_per_user = json_util::Get<double>(jv, "proc_per_user", "vnf");
    vnfs.push_back(std::move(v));
  }
  std::vector<SfcTemplate> templates;
  if (doc.contains("sfcs")) {
    for (const json& jt : json_util::GetArray(doc, "sfcs", "catalog")) {
      json_util::RequireObject(jt, "sfc");
      json_util::CheckKeys(
          jt, {"name", "chain", "max_latency_ms", "bw_per_user_mbps"}, "sfc");
      SfcTemplate t;
      t.name = json_util::Get<std::string>(jt, "name", "sfc");
      for (const json& jf : json_util::GetArray(jt, "chain", "sfc " + t.name)) {
        if (!jf.is_string()) throw ParseError("sfc chain entries are VNF ids");
        const std::string symbol = jf.get<std::string>();
        VnfId id = -1;
        for (const VnfType& v : vnfs) {
          if (v.symbol == symbol) id = v.id;
        }
        if (id < 0) {
          throw ValidationError("SFC template '" + t.name +
                                "' references unknown VNF '" + symbol + "'");
        }
        t.chain.push_back(id);
      }
      t.max_latency = json_util::Get<double>(jt, "max_latency_ms", "sfc");
      if (!jt.contains("bw_per_user_mbps")) {
        throw ParseError("sfc: missing key 'bw_per_user_mbps'");
      }
      const json& jb = jt.at("bw_per_user_mbps");
      if (jb.is_number()) {
        t.bw_per_user.assign(t.chain.size() + 1, jb.get<double>());
      } else if (jb.is_array()) {
        for (const json& x : jb) {
          if (!x.is_number()) throw ParseError("bandwidths must be numbers");
          t.bw_per_user.push_back(x.get<double>());
        }
      } else {
        throw ParseError("'bw_per_user_mbps' must be a number or an array");
      }
      templates.push_back(std::move(t));
    }
  }
  return Catalog(std::move(vnfs), std::move(templates));
}

Catalog LoadCatalogFile(const std::filesystem::path& file) {
  return LoadCatalog(json_util::ReadFile(file));
}

std::string SerializeCatalog(const Catalog& catalog) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["vnfs"] = ordered_json::array();
  for (const VnfType& v : catalog.vnfs()) {
    ordered_json jv;
    jv["id"] = v.symbol;
    jv["name"] = v.name;
    jv["proc_per_user"] = v.proc_per_user;
    doc["vnfs"].push_back(jv);
  }
  doc["sfcs"] = ordered_json::array();
  for (const SfcTemplate& t : catalog.templates()) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["chain"] = ordered_json::array();
    for (VnfId f : t.chain) jt["chain"].push_back(catalog.vnf(f).symbol);
    jt["max_latency_ms"] = t.max_latency;
    bool uniform = true;
    for (double bw : t.bw_per_user) uniform = uniform && bw == t.bw_per_user[0];
    if (uniform) {
      jt["bw_per_user_mbps"] = t.bw_per_user[0];
    } else {
      jt["bw_per_user_mbps"] = t.bw_per_user;
    }
    doc["sfcs"].push_back(jt);
  }
  return doc.dump(2) + "\n";
}

SfcInstance Instantiate(const Catalog& catalog, const SfcTemplate& tmpl,
                        SfcId id, NodeId start, NodeId end, int users,
                        const PhysicalNetwork& net) {
  if (users < 1) throw ValidationError("an SFC needs at least one user");
  if (!net.has_node(start) || !net.has_node(end)) {
    throw ValidationError("SFC endpoint is not a node of the network");
  }
  if (tmpl.bw_per_user.size() != tmpl.chain.size() + 1) {
    throw ValidationError("SFC template '" + tmpl.name +
                          "' needs one bandwidth per virtual link");
  }
  SfcInstance sfc;
  sfc.id = id;
  sfc.template_name = tmpl.name;
  sfc.chain = tmpl.chain;
  sfc.max_latency = tmpl.max_latency;
  sfc.start = start;
  sfc.end = end;
  sfc.users = users;
  for (std::size_t u = 0; u < tmpl.chain.size(); ++u) {
    const VnfId f = tmpl.chain[u];
    if (f < 0 || f >= catalog.num_vnfs()) {
      throw ValidationError("SFC template '" + tmpl.name +
                            "' references an unknown VNF");
    }
    sfc.requests.push_back(VnfRequest{id, static_cast<int>(u), f,
                                      users * catalog.vnf(f).proc_per_user});
  }
  for (double bw : tmpl.bw_per_user) sfc.link_bandwidth.push_back(users * bw);
  return sfc;
}

Scenario::Scenario(std::shared_ptr<const PhysicalNetwork> network,
                   std::shared_ptr<const Catalog> catalog,
                   std::vector<SfcInstance> sfcs)
    : network_(std::move(network)),
      catalog_(std::move(catalog)),
      sfcs_(std::move(sfcs)) {
  for (std::size_t i = 0; i < sfcs_.size(); ++i) {
    if (!index_.emplace(sfcs_[i].id, i).second) {
      throw ValidationError("duplicate SFC id " +
                            std::to_string(sfcs_[i].id));
    }
  }
}

const SfcInstance& Scenario::sfc(SfcId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::out_of_range("unknown SFC id " + std::to_string(id));
  }
  return sfcs_[it->second];
}

int Scenario::total_requests() const {
  int total = 0;
  for (const SfcInstance& s : sfcs_) total += s.length();
  return total;
}

ScenarioFile ParseScenarioFile(std::string_view text,
                               const std::filesystem::path& base_dir) {
  using nlohmann::json;
  json doc = json_util::ParseDocument(text, "scenario");
  json_util::RequireObject(doc, "scenario");
  json_util::CheckKeys(doc, {"name", "description", "topology", "catalog",
                             "sfcs"},
                       "scenario");
  ScenarioFile file;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (doc.contains("topology")) {
    file.topology =
        resolve(json_util::Get<std::string>(doc, "topology", "scenario"));
  }
  if (doc.contains("catalog")) {
    file.catalog =
        resolve(json_util::Get<std::string>(doc, "catalog", "scenario"));
  }
  for (const json& js : json_util::GetArray(doc, "sfcs", "scenario")) {
    json_util::RequireObject(js, "sfc");
    json_util::CheckKeys(js, {"id", "template", "start", "end", "users"},
                         "sfc");
    ScenarioFile::Entry e;
    e.id = json_util::Get<int>(js, "id", "sfc");
    e.template_name = json_util::Get<std::string>(js, "template", "sfc");
    e.start = json_util::GetName(js, "start", "sfc");
    e.end = json_util::GetName(js, "end", "sfc");
    e.users = json_util::Get<int>(js, "users", "sfc");
    file.sfcs.push_back(std::move(e));
  }
  return file;
}

Scenario BuildScenario(const ScenarioFile& file,
                       std::shared_ptr<const PhysicalNetwork> network,
                       std::shared_ptr<const Catalog> catalog) {
  std::vector<SfcInstance> sfcs;
  for (const ScenarioFile::Entry& e : file.sfcs) {
    const SfcTemplate* tmpl = catalog->FindTemplate(e.template_name);
    if (tmpl == nullptr) {
      throw ValidationError("unknown SFC template '" + e.template_name + "'");
    }
    auto start = network->FindNode(e.start);
    auto end = network->FindNode(e.end);
    if (!start || !end) {
      throw ValidationError("SFC " + std::to_string(e.id) +
                            " references an unknown node");
    }
    sfcs.push_back(
        Instantiate(*catalog, *tmpl, e.id, *start, *end, e.users, *network));
  }
  return Scenario(std::move(network), std::move(catalog), std::move(sfcs));
}

std::string SerializeScenario(const Scenario& scenario) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["sfcs"] = ordered_json::array();
  for (const SfcInstance& s : scenario.sfcs()) {
    ordered_json js;
    js["id"] = s.id;
    js["template"] = s.template_name;
    js["start"] = scenario.network().node(s.start).name;
    js["end"] = scenario.network().node(s.end).name;
    js["users"] = s.users;
    doc["sfcs"].push_back(js);
  }
  return doc.dump(2) + "\n";
}

}  // namespace vnfcons
