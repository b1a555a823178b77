#include "nsaas/onboard.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

namespace {

double var_or(const Nsst& n, const char* key, double fallback) {
  auto it = n.variables.find(key);
  return it == n.variables.end() || !it->is_number() ? fallback : it->get<double>();
}

std::string str_var_or(const Nsst& n, const char* key, const std::string& fallback) {
  auto it = n.variables.find(key);
  return it == n.variables.end() || !it->is_string() ? fallback : it->get<std::string>();
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

bool feasible(const Nsst& nsst, const NormalizedRequirements& norm) {
  const double min_delay = var_or(nsst, "min_delay_budget_ms", 0.0);
  const double max_density = var_or(nsst, "max_ue_density", INFINITY);
  return norm.delay_budget_ms >= min_delay && norm.ue_density_per_km2 <= max_density;
}

// ---------------------------------------------------------------------------

NormalizedRequirements Onboarder::normalize_requirements(const SliceRequest& req) const {
  req.validate();
  const Scenario scenario = classify_slice_type(req, config_.classification);
  const auto& defaults = config_.scenario_defaults.at(scenario);

  NormalizedRequirements n = defaults;
  n.request_name = req.name;
  n.tenant = req.tenant;
  n.nst_type = req.nst_type;
  n.explicit_nf_overrides = req.resources;
  n.non_3gpp_access = false;
  n.defaulted = {attr::kAvailability, attr::kDataNetwork, attr::kDelayBudget,
                 attr::kErrorRate,    attr::kBurstVolume, attr::kUeDensity};

  if (const auto& a = req.attributes) {
    if (a->availability) {
      n.availability_pct = *a->availability * 100.0;
      n.defaulted.erase(attr::kAvailability);
    }
    if (a->data_network) {
      n.data_network = *a->data_network;
      n.defaulted.erase(attr::kDataNetwork);
    }
    if (a->ssq) {
      if (a->ssq->packet_delay_budget_s) {
        n.delay_budget_ms = *a->ssq->packet_delay_budget_s * 1000.0;
        n.defaulted.erase(attr::kDelayBudget);
      }
      if (a->ssq->packet_error_rate) {
        n.error_rate = *a->ssq->packet_error_rate;
        n.defaulted.erase(attr::kErrorRate);
      }
      if (a->ssq->max_data_burst_volume_mb) {
        n.burst_volume_mb = *a->ssq->max_data_burst_volume_mb;
        n.defaulted.erase(attr::kBurstVolume);
      }
    }
    if (a->ue_density) {
      n.ue_density_per_km2 = *a->ue_density;
      n.defaulted.erase(attr::kUeDensity);
    }
    n.non_3gpp_access = a->non_3gpp_access.value_or(false);
  }
  return n;
}

SliceRequest denormalize(const NormalizedRequirements& n) {
  SliceRequest r;
  r.name = n.request_name;
  r.tenant = n.tenant;
  r.nst_type = n.nst_type;
  r.resources = n.explicit_nf_overrides;

  auto given = [&](const char* key) { return n.defaulted.count(key) == 0; };
  SliceAttributes a;
  bool any = false;
  if (given(attr::kAvailability)) a.availability = n.availability_pct / 100.0, any = true;
  if (given(attr::kDataNetwork)) a.data_network = n.data_network, any = true;
  Ssq ssq;
  bool any_ssq = false;
  if (given(attr::kDelayBudget)) ssq.packet_delay_budget_s = n.delay_budget_ms / 1000.0, any_ssq = true;
  if (given(attr::kErrorRate)) ssq.packet_error_rate = n.error_rate, any_ssq = true;
  if (given(attr::kBurstVolume)) ssq.max_data_burst_volume_mb = n.burst_volume_mb, any_ssq = true;
  if (any_ssq) a.ssq = ssq, any = true;
  if (given(attr::kUeDensity)) a.ue_density = n.ue_density_per_km2, any = true;
  if (n.non_3gpp_access) a.non_3gpp_access = true, any = true;
  if (any) r.attributes = a;
  return r;
}

// ---------------------------------------------------------------------------

TemplateSelection Onboarder::match_template(const NormalizedRequirements& norm, Scenario scenario) const {
  TemplateSelection sel;
  Json failures = Json::array();
  for (Domain d : kAllDomains) {
    const auto candidates = catalog_.lookup_templates(d, scenario);
    const Nsst* best = nullptr;
    for (const auto& c : candidates) {
      if (!feasible(c, norm)) continue;
      if (best == nullptr) {
        best = &c;
        continue;
      }
      const auto key = [](const Nsst& n) {
        return std::make_tuple(n.footprint(), -static_cast<long>(n.shared_refs.size()), n.id);
      };
      if (key(c) < key(*best)) best = &c;
    }
    if (best == nullptr) {
      failures.push_back({{"domain", std::string(to_string(d))}, {"candidates", candidates.size()}});
      continue;
    }
    sel.per_domain.emplace(d, *best);
  }
  if (!failures.empty()) {
    throw Error(Errc::kNoMatch, "no catalog template satisfies the normalized requirements",
                {{"scenario", std::string(to_string(scenario))},
                 {"delay_budget_ms", norm.delay_budget_ms},
                 {"ue_density_per_km2", norm.ue_density_per_km2},
                 {"domains", failures}});
  }
  return sel;
}

ResourceDescriptors Onboarder::translate_resources(const TemplateSelection& selection,
                                                   const NormalizedRequirements& norm, Scenario scenario) const {
  if (selection.per_domain.size() != kAllDomains.size()) {
    throw Error(Errc::kValidation, "template selection must cover CN, RAN and TN");
  }
  const auto& cn = selection.per_domain.at(Domain::kCN);
  const auto& ran = selection.per_domain.at(Domain::kRAN);
  const auto& tn = selection.per_domain.at(Domain::kTN);

  ResourceDescriptors d;
  d.scenario = scenario;
  d.placement = str_var_or(cn, "placement", "central");

  d.cn.nsst = {cn.id, cn.version};
  for (const auto& nf : cn.nfs) d.cn.nfs.push_back({nf, d.placement});
  d.cn.shared_refs = cn.shared_refs;

  d.ran.nsst = {ran.id, ran.version};
  for (const auto& nf : ran.nfs) d.ran.nfs.push_back({nf, d.placement});
  d.ran.shared_refs = ran.shared_refs;

  d.tn.nsst = {tn.id, tn.version};
  d.tn.vlan = static_cast<int>(var_or(tn, "vlan", 0));
  d.tn.route_policy = str_var_or(tn, "route_policy", "shortest");
  d.tn.priority = static_cast<int>(var_or(tn, "priority", 30000));
  d.tn.src = config_.topology.ran_endpoint;
  d.tn.dst = config_.topology.cn_endpoint;
  d.tn.routes = {"backhaul"};

  if (const auto& ov = norm.explicit_nf_overrides) {
    Json conflicts = Json::array();
    for (const auto& req_nf : ov->core) {
      const auto role = lower(req_nf.name);
      auto it = std::find_if(d.cn.nfs.begin(), d.cn.nfs.end(), [&](const NfDescriptor& x) { return x.profile.name == role; });
      if (it != d.cn.nfs.end()) {
        if (req_nf.replicas) it->profile.replicas = *req_nf.replicas;
        continue;
      }
      conflicts.push_back({{"domain", "CN"},
                           {"nf", req_nf.name},
                           {"policy", str_var_or(cn, "sharing_policy", "dedicated")},
                           {"shared", contains(cn.shared_refs, role)}});
    }
    for (const auto& req_nf : ov->ran) {
      const auto role = lower(req_nf.type.value_or(req_nf.name));
      auto it = std::find_if(d.ran.nfs.begin(), d.ran.nfs.end(), [&](const NfDescriptor& x) {
        return x.profile.name == role || x.profile.name == lower(req_nf.name);
      });
      if (it == d.ran.nfs.end()) {
        conflicts.push_back({{"domain", "RAN"}, {"nf", req_nf.name}, {"policy", str_var_or(ran, "access", "gnb")}});
        continue;
      }
      if (req_nf.replicas) it->profile.replicas = *req_nf.replicas;
    }
    if (!conflicts.empty()) {
      throw Error(Errc::kOverrideConflict, "explicit NF overrides contradict the template sharing policy",
                  {{"conflicts", conflicts}});
    }
    if (!ov->tn_routes.empty()) d.tn.routes = ov->tn_routes;
  }
  return d;
}

RenderedNst Onboarder::render_and_validate(const ResourceDescriptors& d, const NormalizedRequirements& norm,
                                           const std::string& request_digest, double now) {
  Json violations = Json::array();
  auto violate = [&](const char* code, std::string message) {
    violations.push_back({{"code", code}, {"message", std::move(message)}});
  };

  // Subnet references must resolve to catalog NSSTs; bound variables must exist in them.
  std::map<Domain, Nsst> subnets;
  for (auto [dom, ref] : {std::pair{Domain::kCN, d.cn.nsst}, std::pair{Domain::kRAN, d.ran.nsst},
                          std::pair{Domain::kTN, d.tn.nsst}}) {
    auto n = catalog_.nsst(ref.id, ref.version);
    if (!n || n->domain != dom) {
      violate("subnet_reference", std::string(to_string(dom)) + " subnet references unknown NSST " + ref.id);
    } else {
      subnets.emplace(dom, *n);
    }
  }

  double vcpu = 0;
  double ram = 0;
  for (const auto* nfs : {&d.cn.nfs, &d.ran.nfs}) {
    for (const auto& nf : *nfs) {
      if (nf.profile.replicas < 1) violate("schema", nf.profile.name + ": replicas must be >= 1");
      if (nf.profile.cpu_request > nf.profile.cpu_limit || nf.profile.ram_request_mb > nf.profile.ram_limit_mb) {
        violate("schema", nf.profile.name + ": request exceeds limit");
      }
      if (config_.topology.sites.count(nf.site) == 0) {
        violate("placement", nf.profile.name + ": placement site '" + nf.site + "' not in topology");
      }
      vcpu += nf.profile.replicas * nf.profile.cpu_request;
      ram += nf.profile.replicas * nf.profile.ram_request_mb;
    }
  }
  if (config_.topology.sites.count(d.placement) == 0) {
    violate("placement", "placement site '" + d.placement + "' not in topology");
  }
  if (vcpu > config_.quotas.max_vcpu_per_slice + 1e-9) violate("quota", "vCPU request exceeds per-slice ceiling");
  if (ram > config_.quotas.max_ram_mb_per_slice + 1e-9) violate("quota", "RAM request exceeds per-slice ceiling");
  if (!config_.vlans.legal(d.tn.vlan)) violate("vlan", "vlan out of configured range");
  if (d.tn.route_policy != "shortest" && d.tn.route_policy != "resilient") {
    violate("schema", "unknown route policy '" + d.tn.route_policy + "'");
  }

  Json bindings = Json::object();
  for (const auto& [dom, n] : subnets) {
    Json b = n.variables;
    if (b.contains("min_delay_budget_ms")) b["latency_budget_ms"] = norm.delay_budget_ms;
    if (b.contains("max_ue_density")) b["ue_density"] = norm.ue_density_per_km2;
    b["data_network"] = norm.data_network;
    bindings[std::string(to_string(dom))] = std::move(b);
  }

  if (!violations.empty()) {
    throw Error(Errc::kValidation, violations.front().at("message").get<std::string>(), {{"violations", violations}});
  }

  Nst nst;
  nst.scenario = d.scenario;
  nst.subnets = {{Domain::kCN, d.cn.nsst}, {Domain::kRAN, d.ran.nsst}, {Domain::kTN, d.tn.nsst}};
  nst.bindings = std::move(bindings);
  nst.descriptors = d;
  Json body = nst.to_json();
  body.erase("id");
  nst.id = "nst-" + sha256_hex(canonical(body)).substr(0, 12);

  const auto [id, version] = catalog_.register_nst(nst, now);
  nst.version = version;

  RenderedNst out;
  out.nst = nst;
  out.digest = digest_of(nst.to_json());
  const std::string tag = id + "@v" + std::to_string(version);
  auto target = [&](const char* attr_name, double value, Direction dir) {
    if (norm.defaulted.count(attr_name) == 0) out.sla_targets.push_back({attr_name, value, dir, request_digest, tag});
  };
  target(attr::kAvailability, norm.availability_pct, Direction::kAtLeast);
  target(attr::kDelayBudget, norm.delay_budget_ms, Direction::kAtMost);
  target(attr::kErrorRate, norm.error_rate, Direction::kAtMost);
  target(attr::kBurstVolume, norm.burst_volume_mb, Direction::kAtLeast);
  target(attr::kUeDensity, norm.ue_density_per_km2, Direction::kAtLeast);
  return out;
}

OnboardResult Onboarder::onboard(const SliceRequest& req, double now) {
  OnboardResult r;
  r.request_digest = req.digest();
  r.requirements = normalize_requirements(req);
  r.scenario = classify_slice_type(req, config_.classification);
  r.selection = match_template(r.requirements, r.scenario);
  r.descriptors = translate_resources(r.selection, r.requirements, r.scenario);
  r.rendered = render_and_validate(r.descriptors, r.requirements, r.request_digest, now);
  return r;
}

}  // namespace nsaas
