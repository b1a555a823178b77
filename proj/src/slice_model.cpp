#include "nsaas/slice_model.hpp"

#include <algorithm>
#include <cstdio>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

namespace {

// Field names of the northbound request document, verbatim (including the "Burts" spelling).
constexpr const char* kNst = "NST";
constexpr const char* kType = "type";
constexpr const char* kAttributes = "Slice Attributes";
constexpr const char* kAvailability = "availability";
constexpr const char* kDataNetwork = "Supported Data Network";
constexpr const char* kSsq = "SSQ";
constexpr const char* kPdb = "Packet Delay Budget";
constexpr const char* kPer = "Packet Error Rate";
constexpr const char* kMdbv = "Maximum Data Burts Volume";
constexpr const char* kMdbvAlt = "Maximum Data Burst Volume";
constexpr const char* kUeDensity = "UE density";
constexpr const char* kNon3gpp = "Non-3GPP Access";
constexpr const char* kResources = "resource_description";

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(Errc::kSchema, path + ": " + message, {{"field", path}});
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "/" + key, "missing required field");
  return *it;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected number");
  return j.get<double>();
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected string");
  return j.get<std::string>();
}

std::optional<double> opt_number(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return number_at(*it, path + "/" + key);
}

std::vector<NfRequest> parse_nfs(const Json& domain, const std::string& path) {
  std::vector<NfRequest> out;
  if (!domain.is_object()) schema_error(path, "expected object");
  auto it = domain.find("nfs");
  if (it == domain.end()) return out;
  if (!it->is_array()) schema_error(path + "/nfs", "expected array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& nf = (*it)[i];
    const auto nf_path = path + "/nfs/" + std::to_string(i);
    NfRequest r;
    r.name = string_at(require(nf, "name", nf_path), nf_path + "/name");
    if (auto t = nf.find("type"); t != nf.end()) r.type = string_at(*t, nf_path + "/type");
    if (auto rep = nf.find("replicas"); rep != nf.end()) {
      if (!rep->is_number_integer()) schema_error(nf_path + "/replicas", "expected integer");
      r.replicas = rep->get<int>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

Json nfs_to_json(const std::vector<NfRequest>& nfs) {
  Json arr = Json::array();
  for (const auto& nf : nfs) {
    Json o{{"name", nf.name}};
    if (nf.type) o["type"] = *nf.type;
    if (nf.replicas) o["replicas"] = *nf.replicas;
    arr.push_back(std::move(o));
  }
  return {{"nfs", std::move(arr)}};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string SNssai::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u-%06x", static_cast<unsigned>(sst), sd);
  return buf;
}

void to_json(Json& j, const SNssai& s) { j = Json{{"sst", s.sst}, {"sd", s.sd}}; }
void from_json(const Json& j, SNssai& s) {
  s.sst = j.at("sst").get<std::uint8_t>();
  s.sd = j.at("sd").get<std::uint32_t>();
}

// ---------------------------------------------------------------------------

SliceRequest SliceRequest::from_json(const Json& j) {
  if (!j.is_object()) schema_error("", "request body must be a JSON object");
  SliceRequest req;
  req.name = string_at(require(j, "name", ""), "/name");
  if (auto t = j.find("tenant"); t != j.end()) req.tenant = string_at(*t, "/tenant");

  const auto& nst = require(j, kNst, "");
  if (!nst.is_object()) schema_error("/NST", "expected object");
  req.nst_type = parse_nst_type(string_at(require(nst, kType, "/NST"), "/NST/type"));

  if (auto a = nst.find(kAttributes); a != nst.end()) {
    const std::string path = std::string("/NST/") + kAttributes;
    if (!a->is_object()) schema_error(path, "expected object");
    SliceAttributes attrs;
    attrs.availability = opt_number(*a, kAvailability, path);
    if (auto dn = a->find(kDataNetwork); dn != a->end()) attrs.data_network = string_at(*dn, path + "/" + kDataNetwork);
    if (auto s = a->find(kSsq); s != a->end()) {
      const std::string spath = path + "/" + kSsq;
      if (!s->is_object()) schema_error(spath, "expected object");
      Ssq ssq;
      ssq.packet_delay_budget_s = opt_number(*s, kPdb, spath);
      ssq.packet_error_rate = opt_number(*s, kPer, spath);
      ssq.max_data_burst_volume_mb = opt_number(*s, kMdbv, spath);
      if (!ssq.max_data_burst_volume_mb) ssq.max_data_burst_volume_mb = opt_number(*s, kMdbvAlt, spath);
      attrs.ssq = ssq;
    }
    attrs.ue_density = opt_number(*a, kUeDensity, path);
    if (auto n = a->find(kNon3gpp); n != a->end()) {
      if (!n->is_boolean()) schema_error(path + "/" + kNon3gpp, "expected boolean");
      attrs.non_3gpp_access = n->get<bool>();
    }
    req.attributes = attrs;
  }

  if (auto r = nst.find(kResources); r != nst.end()) {
    const std::string path = std::string("/NST/") + kResources;
    if (!r->is_object()) schema_error(path, "expected object");
    ResourceRequest res;
    if (auto c = r->find("core"); c != r->end()) res.core = parse_nfs(*c, path + "/core");
    if (auto c = r->find("ran"); c != r->end()) res.ran = parse_nfs(*c, path + "/ran");
    if (auto t = r->find("tn"); t != r->end()) {
      if (auto routes = t->find("routes"); routes != t->end()) {
        if (!routes->is_array()) schema_error(path + "/tn/routes", "expected array");
        for (std::size_t i = 0; i < routes->size(); ++i) {
          const auto rpath = path + "/tn/routes/" + std::to_string(i);
          res.tn_routes.push_back(string_at(require((*routes)[i], "name", rpath), rpath + "/name"));
        }
      }
    }
    req.resources = res;
  }

  req.validate();
  return req;
}

Json SliceRequest::to_json() const {
  Json nst{{kType, std::string(to_string(nst_type))}};
  if (attributes) {
    Json a = Json::object();
    if (attributes->availability) a[kAvailability] = *attributes->availability;
    if (attributes->data_network) a[kDataNetwork] = *attributes->data_network;
    if (attributes->ssq) {
      Json s = Json::object();
      if (attributes->ssq->packet_delay_budget_s) s[kPdb] = *attributes->ssq->packet_delay_budget_s;
      if (attributes->ssq->packet_error_rate) s[kPer] = *attributes->ssq->packet_error_rate;
      if (attributes->ssq->max_data_burst_volume_mb) s[kMdbv] = *attributes->ssq->max_data_burst_volume_mb;
      a[kSsq] = std::move(s);
    }
    if (attributes->ue_density) a[kUeDensity] = *attributes->ue_density;
    if (attributes->non_3gpp_access) a[kNon3gpp] = *attributes->non_3gpp_access;
    nst[kAttributes] = std::move(a);
  }
  if (resources) {
    Json r = Json::object();
    if (!resources->core.empty()) r["core"] = nfs_to_json(resources->core);
    if (!resources->ran.empty()) r["ran"] = nfs_to_json(resources->ran);
    if (!resources->tn_routes.empty()) {
      Json routes = Json::array();
      for (const auto& name : resources->tn_routes) routes.push_back({{"name", name}});
      r["tn"] = {{"routes", std::move(routes)}};
    }
    nst[kResources] = std::move(r);
  }
  Json j{{"name", name}, {kNst, std::move(nst)}};
  if (tenant != "default") j["tenant"] = tenant;
  return j;
}

void SliceRequest::validate() const {
  const std::string apath = std::string("/NST/") + kAttributes;
  if (nst_type == NstType::kCustom && !attributes) {
    schema_error(apath, "custom slice requests must carry slice attributes");
  }
  if (attributes) {
    if (attributes->availability && (*attributes->availability < 0.0 || *attributes->availability > 1.0)) {
      schema_error(apath + "/" + kAvailability, "must be a fraction in [0, 1]");
    }
    if (attributes->ue_density && *attributes->ue_density < 0.0) {
      schema_error(apath + "/" + kUeDensity, "must be non-negative");
    }
    if (attributes->ssq) {
      const std::string spath = apath + "/" + kSsq;
      const auto& s = *attributes->ssq;
      if (s.packet_delay_budget_s && !(*s.packet_delay_budget_s > 0.0)) {
        schema_error(spath + "/" + kPdb, "must be > 0");
      }
      if (s.packet_error_rate && !(*s.packet_error_rate > 0.0 && *s.packet_error_rate < 1.0)) {
        schema_error(spath + "/" + kPer, "must lie in (0, 1)");
      }
      if (s.max_data_burst_volume_mb && *s.max_data_burst_volume_mb < 0.0) {
        schema_error(spath + "/" + kMdbv, "must be non-negative");
      }
    }
  }
  if (resources) {
    const std::string rpath = std::string("/NST/") + kResources;
    auto check = [&](const std::vector<NfRequest>& nfs, const char* dom) {
      for (std::size_t i = 0; i < nfs.size(); ++i) {
        if (nfs[i].replicas && *nfs[i].replicas < 1) {
          schema_error(rpath + "/" + dom + "/nfs/" + std::to_string(i) + "/replicas", "must be >= 1");
        }
      }
    };
    check(resources->core, "core");
    check(resources->ran, "ran");
  }
}

std::string SliceRequest::digest() const { return digest_of(to_json()); }

// ---------------------------------------------------------------------------

Json NormalizedRequirements::to_json() const {
  Json j{{"request_name", request_name},
         {"tenant", tenant},
         {"nst_type", std::string(nsaas::to_string(nst_type))},
         {"delay_budget_ms", delay_budget_ms},
         {"error_rate", error_rate},
         {"burst_volume_mb", burst_volume_mb},
         {"availability_pct", availability_pct},
         {"ue_density_per_km2", ue_density_per_km2},
         {"data_network", data_network},
         {"non_3gpp_access", non_3gpp_access},
         {"defaulted", defaulted}};
  if (explicit_nf_overrides) {
    SliceRequest shell;
    shell.resources = explicit_nf_overrides;
    j["explicit_nf_overrides"] = shell.to_json()[kNst].value(kResources, Json::object());
  }
  return j;
}

void to_json(Json& j, const SlaTarget& t) {
  j = Json{{"attribute", t.attribute},
           {"target", t.target},
           {"direction", t.direction == Direction::kAtMost ? "<=" : ">="},
           {"source_request", t.source_request},
           {"version_tag", t.version_tag}};
}

void from_json(const Json& j, SlaTarget& t) {
  t.attribute = j.at("attribute").get<std::string>();
  t.target = j.at("target").get<double>();
  t.direction = j.at("direction").get<std::string>() == "<=" ? Direction::kAtMost : Direction::kAtLeast;
  t.source_request = j.at("source_request").get<std::string>();
  t.version_tag = j.at("version_tag").get<std::string>();
}

// ---------------------------------------------------------------------------

void to_json(Json& j, const NfProfile& p) {
  j = Json{{"name", p.name},
           {"replicas", p.replicas},
           {"cpu_request", p.cpu_request},
           {"cpu_limit", p.cpu_limit},
           {"ram_request_mb", p.ram_request_mb},
           {"ram_limit_mb", p.ram_limit_mb},
           {"cpu_usage", p.cpu_usage},
           {"ram_usage_mb", p.ram_usage_mb},
           {"image", p.image}};
}

void from_json(const Json& j, NfProfile& p) {
  p.name = j.at("name").get<std::string>();
  p.replicas = j.value("replicas", 1);
  p.cpu_request = j.value("cpu_request", 0.0);
  p.cpu_limit = j.value("cpu_limit", p.cpu_request);
  p.ram_request_mb = j.value("ram_request_mb", 0.0);
  p.ram_limit_mb = j.value("ram_limit_mb", p.ram_request_mb);
  p.cpu_usage = j.value("cpu_usage", p.cpu_request);
  p.ram_usage_mb = j.value("ram_usage_mb", p.ram_request_mb);
  p.image = j.value("image", p.name + ":latest");
}

double Nsst::footprint() const {
  double total = 0;
  for (const auto& nf : nfs) total += nf.replicas * (nf.cpu_request + nf.ram_request_mb / 1000.0);
  return total;
}

bool Nsst::serves(Scenario s) const { return std::find(scenarios.begin(), scenarios.end(), s) != scenarios.end(); }

Json Nsst::to_json() const {
  Json sc = Json::array();
  for (auto s : scenarios) sc.push_back(std::string(to_string(s)));
  return Json{{"kind", "NSST"},
              {"id", id},
              {"domain", std::string(to_string(domain))},
              {"scenarios", std::move(sc)},
              {"variables", variables},
              {"nfs", nfs},
              {"shared_refs", shared_refs},
              {"artifacts", artifacts}};
}

Nsst Nsst::from_json(const Json& j) {
  Nsst n;
  n.id = j.at("id").get<std::string>();
  n.domain = parse_domain(j.at("domain").get<std::string>());
  for (const auto& s : j.at("scenarios")) n.scenarios.push_back(parse_scenario(s.get<std::string>()));
  n.variables = j.value("variables", Json::object());
  n.nfs = j.value("nfs", std::vector<NfProfile>{});
  n.shared_refs = j.value("shared_refs", std::vector<std::string>{});
  n.artifacts = j.value("artifacts", std::vector<std::string>{});
  for (const auto& nf : n.nfs) {
    if (nf.cpu_request < 0 || nf.ram_request_mb < 0 || nf.replicas < 0) {
      throw Error(Errc::kValidation, "NSST " + n.id + ": negative footprint", {{"nsst", n.id}});
    }
  }
  return n;
}

// ---------------------------------------------------------------------------

namespace {

Json ref_json(const NsstRef& r) { return Json{{"id", r.id}, {"version", r.version}}; }
NsstRef ref_from(const Json& j) { return NsstRef{j.at("id").get<std::string>(), j.at("version").get<int>()}; }

Json nfd_json(const std::vector<NfDescriptor>& nfs) {
  Json arr = Json::array();
  for (const auto& nf : nfs) {
    Json p = nf.profile;
    p["site"] = nf.site;
    arr.push_back(std::move(p));
  }
  return arr;
}

std::vector<NfDescriptor> nfd_from(const Json& arr) {
  std::vector<NfDescriptor> out;
  for (const auto& j : arr) out.push_back(NfDescriptor{j.get<NfProfile>(), j.at("site").get<std::string>()});
  return out;
}

}  // namespace

Json ResourceDescriptors::to_json() const {
  return Json{{"scenario", std::string(nsaas::to_string(scenario))},
              {"placement", placement},
              {"cn", {{"nsst", ref_json(cn.nsst)}, {"nfs", nfd_json(cn.nfs)}, {"shared_refs", cn.shared_refs}}},
              {"ran", {{"nsst", ref_json(ran.nsst)}, {"nfs", nfd_json(ran.nfs)}, {"shared_refs", ran.shared_refs}}},
              {"tn",
               {{"nsst", ref_json(tn.nsst)},
                {"vlan", tn.vlan},
                {"route_policy", tn.route_policy},
                {"priority", tn.priority},
                {"src", tn.src},
                {"dst", tn.dst},
                {"routes", tn.routes}}}};
}

ResourceDescriptors ResourceDescriptors::from_json(const Json& j) {
  ResourceDescriptors d;
  d.scenario = parse_scenario(j.at("scenario").get<std::string>());
  d.placement = j.at("placement").get<std::string>();
  auto dom = [](const Json& x) {
    return DomainDescriptor{ref_from(x.at("nsst")), nfd_from(x.at("nfs")),
                            x.at("shared_refs").get<std::vector<std::string>>()};
  };
  d.cn = dom(j.at("cn"));
  d.ran = dom(j.at("ran"));
  const auto& tn = j.at("tn");
  d.tn.nsst = ref_from(tn.at("nsst"));
  d.tn.vlan = tn.at("vlan").get<int>();
  d.tn.route_policy = tn.at("route_policy").get<std::string>();
  d.tn.priority = tn.at("priority").get<int>();
  d.tn.src = tn.at("src").get<std::string>();
  d.tn.dst = tn.at("dst").get<std::string>();
  d.tn.routes = tn.at("routes").get<std::vector<std::string>>();
  return d;
}

Json Nst::to_json() const {
  Json subs = Json::object();
  for (const auto& [dom, ref] : subnets) subs[std::string(nsaas::to_string(dom))] = ref_json(ref);
  return Json{{"kind", "NST"},
              {"id", id},
              {"scenario", std::string(nsaas::to_string(scenario))},
              {"subnets", std::move(subs)},
              {"bindings", bindings},
              {"descriptors", descriptors.to_json()}};
}

Nst Nst::from_json(const Json& j) {
  Nst n;
  n.id = j.at("id").get<std::string>();
  n.scenario = parse_scenario(j.at("scenario").get<std::string>());
  for (const auto& [k, v] : j.at("subnets").items()) n.subnets[parse_domain(k)] = ref_from(v);
  n.bindings = j.value("bindings", Json::object());
  n.descriptors = ResourceDescriptors::from_json(j.at("descriptors"));
  return n;
}

// ---------------------------------------------------------------------------

Json Nssi::to_json() const {
  return Json{{"domain", std::string(nsaas::to_string(domain))},
              {"state", std::string(nsaas::to_string(state))},
              {"resource_ids", resource_ids},
              {"endpoints", endpoints}};
}

Nssi Nssi::from_json(const Json& j) {
  Nssi n;
  n.domain = parse_domain(j.at("domain").get<std::string>());
  n.state = parse_nssi_state(j.at("state").get<std::string>());
  n.resource_ids = j.at("resource_ids").get<std::vector<std::string>>();
  n.endpoints = j.at("endpoints").get<std::map<std::string, std::string>>();
  return n;
}

Nssi* Nsi::nssi(Domain d) {
  for (auto& n : nssis) {
    if (n.domain == d) return &n;
  }
  return nullptr;
}

const Nssi* Nsi::nssi(Domain d) const { return const_cast<Nsi*>(this)->nssi(d); }

Json Nsi::to_json() const {
  Json subs = Json::array();
  for (const auto& n : nssis) subs.push_back(n.to_json());
  Json j{{"id", id},
         {"snssai", snssai},
         {"tenant", tenant},
         {"scenario", std::string(nsaas::to_string(scenario))},
         {"state", std::string(nsaas::to_string(state))},
         {"nst", ref_json(nst)},
         {"nssis", std::move(subs)},
         {"sla_targets", sla_targets},
         {"request_digest", request_digest},
         {"vlan", vlan},
         {"created_at", created_at},
         {"activated_at", nullptr}};
  if (activated_at) j["activated_at"] = *activated_at;
  return j;
}

Nsi Nsi::from_json(const Json& j) {
  Nsi n;
  n.id = j.at("id").get<std::string>();
  n.snssai = j.at("snssai").get<SNssai>();
  n.tenant = j.at("tenant").get<std::string>();
  n.scenario = parse_scenario(j.at("scenario").get<std::string>());
  n.state = parse_nsi_state(j.at("state").get<std::string>());
  n.nst = ref_from(j.at("nst"));
  for (const auto& s : j.at("nssis")) n.nssis.push_back(Nssi::from_json(s));
  n.sla_targets = j.at("sla_targets").get<std::vector<SlaTarget>>();
  n.request_digest = j.at("request_digest").get<std::string>();
  n.vlan = j.at("vlan").get<int>();
  n.created_at = j.at("created_at").get<double>();
  if (!j.at("activated_at").is_null()) n.activated_at = j.at("activated_at").get<double>();
  return n;
}

bool is_legal_transition(NsiState from, NsiState to) {
  using S = NsiState;
  switch (from) {
    case S::kRequested: return to == S::kDeploying || to == S::kDegraded || to == S::kTerminated;
    case S::kDeploying: return to == S::kActive || to == S::kDegraded;
    case S::kActive: return to == S::kReconfiguring || to == S::kTerminated || to == S::kDegraded;
    case S::kReconfiguring: return to == S::kActive || to == S::kDegraded;
    case S::kDegraded: return to == S::kTerminated;
    case S::kTerminated: return false;
  }
  return false;
}

// ---------------------------------------------------------------------------

void to_json(Json& j, const ClassificationRules& r) {
  j = Json{{"urllc_max_delay_ms", r.urllc_max_delay_ms},
           {"mmtc_min_ue_density", r.mmtc_min_ue_density},
           {"mmtc_min_delay_ms", r.mmtc_min_delay_ms}};
}

void from_json(const Json& j, ClassificationRules& r) {
  r.urllc_max_delay_ms = j.at("urllc_max_delay_ms").get<double>();
  r.mmtc_min_ue_density = j.at("mmtc_min_ue_density").get<double>();
  r.mmtc_min_delay_ms = j.at("mmtc_min_delay_ms").get<double>();
}

Scenario classify_slice_type(const SliceRequest& req, const ClassificationRules& rules) {
  switch (req.nst_type) {
    case NstType::kEMBB: return Scenario::kSharedEMBB;
    case NstType::kURLLC: return Scenario::kURLLC;
    case NstType::kMMTC: return Scenario::kMMTC;
    case NstType::kNon3gpp: return Scenario::kNon3gpp;
    case NstType::kCustom: break;
  }

  std::optional<double> pdb_ms;
  std::optional<double> density;
  bool non3gpp = false;
  if (req.attributes) {
    if (req.attributes->ssq && req.attributes->ssq->packet_delay_budget_s) {
      pdb_ms = *req.attributes->ssq->packet_delay_budget_s * 1000.0;
    }
    density = req.attributes->ue_density;
    non3gpp = req.attributes->non_3gpp_access.value_or(false);
  }

  std::vector<Scenario> fired;
  if (non3gpp) fired.push_back(Scenario::kNon3gpp);
  if (pdb_ms && *pdb_ms < rules.urllc_max_delay_ms) fired.push_back(Scenario::kURLLC);
  if (density && pdb_ms && *density > rules.mmtc_min_ue_density && *pdb_ms >= rules.mmtc_min_delay_ms) {
    fired.push_back(Scenario::kMMTC);
  }

  if (fired.empty()) return Scenario::kSharedEMBB;
  if (fired.size() > 1) {
    Json names = Json::array();
    for (auto s : fired) names.push_back(std::string(to_string(s)));
    throw Error(Errc::kUnclassifiable, "custom request matches contradictory scenario rules", {{"fired", names}});
  }
  return fired.front();
}

}  // namespace nsaas
