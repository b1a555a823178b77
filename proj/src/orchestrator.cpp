#include "nsaas/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "nsaas/error.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// Allocators

SNssai SnssaiAllocator::allocate(const std::string& tenant, Scenario scenario) {
  (void)tenant;
  const auto sst = sst_of(scenario);
  const std::uint32_t limit = std::min<std::uint32_t>(pool_size_, kSdLimit - 1);
  auto& next = next_sd_[sst];
  if (next == 0) next = 1;
  for (std::uint32_t tries = 0; tries < limit; ++tries) {
    const std::uint32_t sd = next;
    next = next >= limit ? 1 : next + 1;
    SNssai s{sst, sd};
    if (in_use_.insert(s).second) return s;
  }
  throw Error(Errc::kPoolExhausted, "S-NSSAI pool exhausted for SST " + std::to_string(sst),
              {{"sst", sst}, {"pool_size", pool_size_}});
}

int VlanAllocator::allocate(Scenario scenario, const std::string& nsi) {
  for (const auto& [vlan, holder] : exclusive_) {
    if (holder == nsi) return vlan;
  }
  for (const auto& [vlan, users] : shared_) {
    if (users.count(nsi)) return vlan;
  }
  auto pref = policy_.preferred.find(scenario);
  if (pref == policy_.preferred.end()) {
    throw Error(Errc::kUnknownScenario, "no VLAN policy for scenario", {{"scenario", std::string(to_string(scenario))}});
  }
  const int preferred = pref->second;
  const bool exclusive = policy_.exclusive.count(scenario) && policy_.exclusive.at(scenario);
  auto free = [&](int v) { return !exclusive_.count(v) && (!shared_.count(v) || shared_.at(v).empty()); };

  if (!exclusive) {
    if (exclusive_.count(preferred)) {
      throw Error(Errc::kPoolExhausted, "shared VLAN held exclusively", {{"vlan", preferred}});
    }
    shared_[preferred].insert(nsi);
    return preferred;
  }
  if (free(preferred)) {
    exclusive_[preferred] = nsi;
    return preferred;
  }
  for (int v = policy_.pool_first; v <= policy_.pool_last; ++v) {
    if (free(v) && policy_.legal(v)) {
      exclusive_[v] = nsi;
      return v;
    }
  }
  throw Error(Errc::kPoolExhausted, "VLAN pool exhausted",
              {{"pool_first", policy_.pool_first}, {"pool_last", policy_.pool_last}});
}

void VlanAllocator::release(const std::string& nsi) {
  for (auto it = exclusive_.begin(); it != exclusive_.end();) {
    it = it->second == nsi ? exclusive_.erase(it) : std::next(it);
  }
  for (auto it = shared_.begin(); it != shared_.end();) {
    it->second.erase(nsi);
    it = it->second.empty() ? shared_.erase(it) : std::next(it);
  }
}

std::optional<std::string> VlanAllocator::owner_of(int vlan) const {
  auto it = exclusive_.find(vlan);
  if (it == exclusive_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> VlanAllocator::users_of(int vlan) const {
  if (auto o = owner_of(vlan)) return {*o};
  auto it = shared_.find(vlan);
  return it == shared_.end() ? std::set<std::string>{} : it->second;
}

// ---------------------------------------------------------------------------
// Plan

namespace {

const std::vector<std::pair<std::string, std::string>>& cn_role_substeps() {
  static const std::vector<std::pair<std::string, std::string>> roles{
      {"2.2", "amf"}, {"2.3", "smf"}, {"2.4", "upf"}, {"2.5", "nrf"},
      {"2.6", "ausf"}, {"2.7", "udr"}, {"2.8", "pcf"}, {"2.9", "nssf"}};
  return roles;
}

int domain_rank(const std::string& d) {
  if (d == "CN") return 0;
  if (d == "RAN") return 1;
  if (d == "TN") return 2;
  return 3;
}

// Orders "2.3" < "2.10".
bool substep_less(const std::string& a, const std::string& b) {
  int a1 = 0, a2 = 0, b1 = 0, b2 = 0;
  std::sscanf(a.c_str(), "%d.%d", &a1, &a2);
  std::sscanf(b.c_str(), "%d.%d", &b1, &b2);
  return std::tie(a1, a2) < std::tie(b1, b2);
}

}  // namespace

std::size_t DeploymentPlan::count_step(int step) const {
  return std::count_if(substeps.begin(), substeps.end(), [&](const Substep& s) { return s.step == step; });
}

double DeploymentPlan::expected_total() const {
  double t = 0;
  for (const auto& s : substeps) t += s.expected_s();
  return t;
}

void DeploymentPlan::validate() const {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < substeps.size(); ++i) {
    if (!index.emplace(substeps[i].id, i).second) {
      throw Error(Errc::kValidation, "duplicate substep " + substeps[i].id);
    }
  }
  // Kahn's algorithm over the dependency edges.
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& s : substeps) {
    indegree[s.id];
    for (const auto& d : s.depends_on) {
      if (!index.count(d)) throw Error(Errc::kValidation, "substep " + s.id + " depends on unknown " + d);
      out[d].push_back(s.id);
      ++indegree[s.id];
    }
  }
  std::vector<std::string> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& n : out[id]) {
      if (--indegree[n] == 0) ready.push_back(n);
    }
  }
  if (visited != substeps.size()) throw Error(Errc::kValidation, "deployment plan has a dependency cycle");

  int rank = 0;
  for (const auto& s : substeps) {
    const int r = domain_rank(s.domain);
    if (r < rank) throw Error(Errc::kValidation, "substep " + s.id + " breaks CN -> RAN -> TN order");
    rank = r;
  }
}

Json DeploymentPlan::to_json() const {
  Json steps = Json::array();
  for (const auto& s : substeps) {
    Json j{{"id", s.id},         {"step", s.step},   {"domain", s.domain},           {"kind", s.kind},
           {"target", s.target}, {"actions", s.actions}, {"expected_s", s.expected_s()}, {"reuse", s.reuse},
           {"depends_on", s.depends_on}};
    if (s.rule) j["rule"] = *s.rule;
    steps.push_back(std::move(j));
  }
  return {{"nsi", nsi_id}, {"scenario", std::string(to_string(scenario))}, {"substeps", steps},
          {"expected_total_s", expected_total()}};
}

double DeploymentReport::total() const {
  double t = 0;
  for (const auto& s : substeps) t += s.duration();
  return t;
}

double DeploymentReport::domain_total(const std::string& domain) const {
  double t = 0;
  for (const auto& s : substeps) {
    if (s.domain == domain) t += s.duration();
  }
  return t;
}

double DeploymentReport::step_total(int step) const {
  double t = 0;
  for (const auto& s : substeps) {
    if (s.step == step) t += s.duration();
  }
  return t;
}

Json DeploymentReport::to_json() const {
  Json subs = Json::array();
  for (const auto& s : substeps) {
    subs.push_back({{"id", s.id},
                    {"step", s.step},
                    {"domain", s.domain},
                    {"kind", s.kind},
                    {"start", s.start},
                    {"end", s.end},
                    {"actions", s.actions},
                    {"reuse", s.reuse}});
  }
  return {{"nsi", nsi_id},
          {"scenario", std::string(to_string(scenario))},
          {"substeps", subs},
          {"total_s", total()},
          {"domains",
           {{"CN", domain_total("CN")}, {"RAN", domain_total("RAN")}, {"TN", domain_total("TN")},
            {"E2E", domain_total("E2E")}}},
          {"complete", complete}};
}

std::vector<StepEfficiency> step_efficiency(const DeploymentReport& report) {
  auto eff = [](int actions, double duration) { return actions / std::max(duration, kEfficiencyEpsilon); };
  std::vector<StepEfficiency> out;
  std::map<int, StepEfficiency> steps;
  int total_actions = 0;
  double total_time = 0;
  for (const auto& s : report.substeps) {
    out.push_back({s.id, s.actions, s.duration(), eff(s.actions, s.duration()), s.reuse});
    auto& g = steps[s.step];
    g.group = std::to_string(s.step);
    g.actions += s.actions;
    g.duration += s.duration();
    total_actions += s.actions;
    total_time += s.duration();
  }
  for (auto& [_, g] : steps) {
    g.efficiency = eff(g.actions, g.duration);
    g.reuse = g.duration == 0;
    out.push_back(g);
  }
  out.push_back({"total", total_actions, total_time, eff(total_actions, total_time), false});
  return out;
}

DeploymentPlan build_deployment_plan(const Nst& nst, Scenario scenario, const Config& config,
                                     const SdnController& sdn, int vlan, const std::string& nsi_id) {
  auto timing_it = config.latency.scenarios.find(scenario);
  if (timing_it == config.latency.scenarios.end()) {
    throw Error(Errc::kUnknownScenario, "no latency table for scenario " + std::string(to_string(scenario)));
  }
  const auto& timing = timing_it->second;
  const auto& d = nst.descriptors;

  DeploymentPlan plan;
  plan.nsi_id = nsi_id;
  plan.scenario = scenario;
  auto add = [&](Substep s) {
    s.timing = timing.at(s.id);
    if (!plan.substeps.empty()) s.depends_on = {plan.substeps.back().id};
    plan.substeps.push_back(std::move(s));
    return &plan.substeps.back();
  };
  auto mk = [](std::string id, int step, std::string domain, std::string kind, std::string target, int actions = 1) {
    Substep s;
    s.id = std::move(id);
    s.step = step;
    s.domain = std::move(domain);
    s.kind = std::move(kind);
    s.target = std::move(target);
    s.actions = actions;
    return s;
  };

  std::map<std::string, const NfDescriptor*> dedicated;
  for (const auto& nf : d.cn.nfs) dedicated[nf.profile.name] = &nf;
  for (const auto& [role, _] : dedicated) {
    const bool mapped = std::any_of(cn_role_substeps().begin(), cn_role_substeps().end(),
                                    [&](const auto& p) { return p.second == role; });
    if (!mapped) throw Error(Errc::kValidation, "no deployment substep for CN function '" + role + "'");
  }

  add(mk("1.1", 1, "CN", "allocate", "snssai"));
  if (dedicated.empty()) {
    add(mk("1.2", 1, "CN", "patch_shared", "shared-cn"));
  } else {
    add(mk("1.2", 1, "CN", "pull_images", "cn-bundle", static_cast<int>(dedicated.size())));
  }

  add(mk("2.1", 2, "CN", "namespace", "ns"));
  for (const auto& [id, role] : cn_role_substeps()) {
    auto it = dedicated.find(role);
    if (it != dedicated.end()) {
      auto* s = add(mk(id, 2, "CN", "deploy", role, it->second->profile.replicas));
      s->profile = it->second->profile;
      s->site = it->second->site;
    } else {
      add(mk(id, 2, "CN", "bind_shared", role));
    }
  }
  add(mk("2.10", 2, "CN", "publish", "endpoints"));

  add(mk("3.1", 3, "RAN", "inject_endpoint", "amf"));
  if (d.ran.nfs.empty()) throw Error(Errc::kValidation, "RAN subnet has no access workload");
  const auto& ran_nf = d.ran.nfs.front();
  auto* ran = add(mk("3.2", 3, "RAN", "deploy", ran_nf.profile.name, ran_nf.profile.replicas));
  ran->profile = ran_nf.profile;
  ran->site = ran_nf.site;
  add(mk("3.3", 3, "RAN", scenario == Scenario::kNon3gpp ? "ipsec_tunnel" : "ng_setup", "amf"));
  add(mk("3.4", 3, "RAN", "commit", "ran"));

  const auto rules = sdn.plan_routes(d.tn.src, d.tn.dst, vlan, d.tn.route_policy, d.tn.priority);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    Substep s = mk("4." + std::to_string(i + 1), 4, "TN", "route_install", rules[i].match_key());
    s.rule = rules[i];
    s.timing = timing.tn_rule;
    if (!plan.substeps.empty()) s.depends_on = {plan.substeps.back().id};
    plan.substeps.push_back(std::move(s));
  }

  add(mk("5.1", 5, "E2E", "verify", "slice"));
  add(mk("6.1", 6, "E2E", "activate", "slice"));

  for (auto& s : plan.substeps) s.reuse = s.timing.total() == 0;
  plan.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// Orchestrator

Orchestrator::Orchestrator(const Config& config, DataStore& store, VirtualClock& clock, Platform& platform,
                           SdnController& sdn, EventLog& log)
    : config_(config),
      store_(store),
      clock_(clock),
      platform_(platform),
      sdn_(sdn),
      log_(log),
      snssai_(config.snssai_pool_size),
      vlans_(config.vlans) {}

void Orchestrator::emit(const std::string& kind, const Instance& inst, Json payload, const std::string& substep) {
  payload["nsi"] = inst.nsi.id;
  if (!substep.empty()) payload["substep"] = substep;
  log_.append(clock_.now(), kind, std::move(payload));
}

void Orchestrator::commit(Instance& inst) {
  const auto key = "nsi/" + inst.nsi.id;
  auto& inv = store_.inventory();
  inv.commit_state(key, inst.nsi.to_json(), inv.seq(key));
}

void Orchestrator::set_state(Instance& inst, NsiState to) {
  if (inst.nsi.state == to) return;
  if (!is_legal_transition(inst.nsi.state, to)) {
    throw Error(Errc::kInvalidState,
                "illegal transition " + std::string(to_string(inst.nsi.state)) + " -> " + std::string(to_string(to)),
                {{"nsi", inst.nsi.id}});
  }
  const auto from = inst.nsi.state;
  inst.nsi.state = to;
  emit("nsi_state", inst, {{"from", std::string(to_string(from))}, {"to", std::string(to_string(to))}});
  commit(inst);
}

std::string Orchestrator::begin_create(const OnboardResult& onb, std::optional<double> start_at) {
  if (auto existing = find_by_digest(onb.request_digest)) {
    const auto& inst = instances_.at(*existing);
    if (inst.nsi.state != NsiState::kTerminated) return *existing;
  }

  char buf[32];
  std::snprintf(buf, sizeof(buf), "nsi-%04llu", static_cast<unsigned long long>(next_id_++));
  const std::string id = buf;

  Instance inst;
  inst.nst = onb.rendered.nst;
  inst.nsi.id = id;
  inst.nsi.tenant = onb.requirements.tenant;
  inst.nsi.scenario = onb.scenario;
  inst.nsi.nst = {inst.nst.id, inst.nst.version};
  inst.nsi.sla_targets = onb.rendered.sla_targets;
  inst.nsi.request_digest = onb.request_digest;
  inst.nsi.created_at = clock_.now();
  for (Domain d : kAllDomains) inst.nsi.nssis.push_back(Nssi{d, NssiState::kPending, {}, {}});

  inst.nsi.snssai = snssai_.allocate(inst.nsi.tenant, onb.scenario);
  try {
    inst.nsi.vlan = vlans_.allocate(onb.scenario, id);
    inst.plan = build_deployment_plan(inst.nst, onb.scenario, config_, sdn_, inst.nsi.vlan, id);
  } catch (...) {
    snssai_.release(inst.nsi.snssai);
    vlans_.release(id);
    throw;
  }
  inst.report.nsi_id = id;
  inst.report.scenario = onb.scenario;
  inst.report.started_at = clock_.now();

  auto& ref = instances_[id] = std::move(inst);
  by_digest_[onb.request_digest] = id;
  commit(ref);
  emit("nsi_requested", ref, {{"snssai", ref.nsi.snssai.str()}, {"vlan", ref.nsi.vlan}});
  set_state(ref, NsiState::kDeploying);
  clock_.schedule(start_at.value_or(clock_.now()), [this, id] {
    instances_.at(id).report.started_at = clock_.now();
    run_substep(id, 0);
  });
  return id;
}

void Orchestrator::run_substep(const std::string& nsi_id, std::size_t index) {
  auto& inst = instances_.at(nsi_id);
  if (inst.nsi.state != NsiState::kDeploying) return;
  if (index >= inst.plan.size()) return;
  const Substep& s = inst.plan.substeps[index];

  inst.report.substeps.push_back({s.id, s.step, s.domain, s.kind, clock_.now(), clock_.now(), s.actions, s.reuse});
  emit("substep_start", inst, {{"domain", s.domain}, {"kind", s.kind}, {"target", s.target}}, s.id);
  if (auto* n = inst.nsi.nssi(s.domain == "RAN" ? Domain::kRAN : s.domain == "TN" ? Domain::kTN : Domain::kCN);
      n != nullptr && n->state == NssiState::kPending && s.domain != "E2E") {
    n->state = NssiState::kDeploying;
  }

  auto done = [this, nsi_id, index](bool ok) {
    finish_substep(nsi_id, index, ok, ok ? std::string() : "workload failed readiness");
  };
  try {
    if (s.kind == "namespace") {
      platform_.create_namespace(nsi_id);
      clock_.schedule(clock_.now() + s.timing.total(), [done] { done(true); });
    } else if (s.kind == "deploy") {
      const auto r = platform_.apply_release(nsi_id, *s.profile, s.site, s.timing, done);
      auto* n = inst.nsi.nssi(s.domain == "RAN" ? Domain::kRAN : Domain::kCN);
      if (std::find(n->resource_ids.begin(), n->resource_ids.end(), r.workload_id) == n->resource_ids.end()) {
        n->resource_ids.push_back(r.workload_id);
      }
    } else if (s.kind == "bind_shared") {
      platform_.bind_shared(nsi_id, s.target, s.timing.total(), done);
    } else {
      clock_.schedule(clock_.now() + s.timing.total(), [done] { done(true); });
    }
  } catch (const Error& e) {
    fail(inst, s, std::string(e.reason()) + ": " + e.what());
  }
}

void Orchestrator::finish_substep(const std::string& nsi_id, std::size_t index, bool ok, const std::string& reason) {
  auto& inst = instances_.at(nsi_id);
  if (inst.nsi.state != NsiState::kDeploying) return;
  const Substep& s = inst.plan.substeps[index];
  auto& rec = inst.report.substeps.back();
  rec.end = clock_.now();
  if (!ok) {
    fail(inst, s, reason);
    return;
  }

  try {
    auto* cn = inst.nsi.nssi(Domain::kCN);
    auto* ran = inst.nsi.nssi(Domain::kRAN);
    auto* tn = inst.nsi.nssi(Domain::kTN);
    if (s.kind == "publish") {
      const auto amf = amf_workload(nsi_id);
      const auto* w = platform_.workload(amf);
      if (w == nullptr || !platform_.ready_at(amf, clock_.now())) {
        throw Error(Errc::kNoAmfAvailable, "no ready AMF to publish", {{"workload", amf}});
      }
      cn->endpoints["amf"] = w->endpoint;
      if (const auto* upf = platform_.workload(Platform::workload_id(nsi_id, "upf"))) {
        cn->endpoints["upf"] = upf->endpoint;
      }
      cn->state = NssiState::kReady;
      emit("amf_endpoint_published", inst, {{"endpoint", w->endpoint}}, s.id);
      commit(inst);
    } else if (s.kind == "inject_endpoint") {
      ran->endpoints["amf"] = cn->endpoints.at("amf");
      emit("ran_config_injected", inst, {{"amf", ran->endpoints["amf"]}}, s.id);
    } else if (s.kind == "ng_setup" || s.kind == "ipsec_tunnel") {
      emit("ran_attached", inst, {{"amf", ran->endpoints["amf"]}, {"procedure", s.kind}}, s.id);
    } else if (s.kind == "commit") {
      ran->state = NssiState::kReady;
      commit(inst);
    } else if (s.kind == "route_install") {
      sdn_.install_rule(*s.rule, nsi_id, clock_.now());
      if (std::find(tn->resource_ids.begin(), tn->resource_ids.end(), s.target) == tn->resource_ids.end()) {
        tn->resource_ids.push_back(s.target);
      }
      emit("flow_rule", inst, {{"rule", *s.rule}}, s.id);
      if (s.id == "4." + std::to_string(inst.plan.count_step(4))) {
        tn->state = NssiState::kReady;
        commit(inst);
      }
    } else if (s.kind == "verify") {
      for (const auto& n : inst.nsi.nssis) {
        for (const auto& rid : n.resource_ids) {
          if (n.domain != Domain::kTN && !platform_.ready_at(rid, clock_.now())) {
            throw Error(Errc::kDomainDeployFailure, "verification found " + rid + " not ready");
          }
        }
      }
    } else if (s.kind == "activate") {
      inst.nsi.activated_at = clock_.now();
      inst.report.finished_at = clock_.now();
      inst.report.complete = true;
      set_state(inst, NsiState::kActive);
    }
  } catch (const Error& e) {
    fail(inst, s, std::string(e.reason()) + ": " + e.what());
    return;
  }
  emit("substep_end", inst, {{"domain", s.domain}, {"kind", s.kind}, {"duration", rec.duration()}}, s.id);
  run_substep(nsi_id, index + 1);
}

void Orchestrator::fail(Instance& inst, const Substep& s, const std::string& reason) {
  inst.failure = DeployFailure{s.domain, s.id, reason};
  if (!inst.report.substeps.empty() && inst.report.substeps.back().id == s.id) {
    inst.report.substeps.back().end = clock_.now();
  }
  const Domain d = s.domain == "RAN" ? Domain::kRAN : s.domain == "TN" ? Domain::kTN : Domain::kCN;
  inst.nsi.nssi(d)->state = NssiState::kFailed;
  emit("deploy_failed", inst, {{"domain", s.domain}, {"reason", reason}}, s.id);
  set_state(inst, NsiState::kDegraded);
}

Nsi Orchestrator::create_nsi(const OnboardResult& onb) {
  const auto id = begin_create(onb);
  run_until_settled();
  const auto& inst = instances_.at(id);
  if (inst.nsi.state == NsiState::kDegraded) {
    const auto& f = *inst.failure;
    throw Error(Errc::kDomainDeployFailure, "deployment failed in " + f.domain + " at substep " + f.substep,
                {{"nsi", id}, {"domain", f.domain}, {"substep", f.substep}, {"cause", f.reason}});
  }
  return inst.nsi;
}

bool Orchestrator::settled() const {
  return std::none_of(instances_.begin(), instances_.end(), [](const auto& kv) {
    return kv.second.nsi.state == NsiState::kDeploying || kv.second.nsi.state == NsiState::kReconfiguring;
  });
}

void Orchestrator::run_until_settled() {
  while (!settled() && clock_.step()) {
  }
}

// ---------------------------------------------------------------------------

std::string Orchestrator::amf_workload(const std::string& nsi_id) const {
  const auto dedicated = Platform::workload_id(nsi_id, "amf");
  if (platform_.workload(dedicated) != nullptr) return dedicated;
  auto it = instances_.find(nsi_id);
  if (it != instances_.end()) {
    for (const auto& nf : it->second.nst.descriptors.cn.nfs) {
      if (nf.profile.name == "amf") return dedicated;
    }
  }
  return Platform::workload_id("shared", "amf");
}

std::size_t Orchestrator::shared_refcount(const std::string& role) const {
  std::size_t n = 0;
  for (const auto& [_, inst] : instances_) {
    const auto st = inst.nsi.state;
    if (st == NsiState::kTerminated) continue;
    const auto& refs = inst.nst.descriptors.cn.shared_refs;
    if (std::find(refs.begin(), refs.end(), role) != refs.end()) ++n;
  }
  return n;
}

void Orchestrator::begin_modify(const std::string& nsi_id, const NfProfile& new_amf) {
  auto it = instances_.find(nsi_id);
  if (it == instances_.end() || it->second.nsi.state == NsiState::kTerminated) {
    throw Error(Errc::kNotFound, "no live NSI " + nsi_id, {{"nsi", nsi_id}});
  }
  auto& inst = it->second;
  if (inst.nsi.state == NsiState::kReconfiguring) {
    throw Error(Errc::kConcurrentModification, "NSI " + nsi_id + " is already being reconfigured", {{"nsi", nsi_id}});
  }
  if (inst.nsi.state != NsiState::kActive) {
    throw Error(Errc::kInvalidState, "NSI " + nsi_id + " is not Active",
                {{"nsi", nsi_id}, {"state", std::string(to_string(inst.nsi.state))}});
  }

  const auto amf = amf_workload(nsi_id);
  const auto* w = platform_.workload(amf);
  if (w == nullptr) throw Error(Errc::kNoAmfAvailable, "NSI " + nsi_id + " has no AMF workload", {{"nsi", nsi_id}});
  const auto owner = w->owner;
  const auto site = w->site;

  ReconfigRecord rec;
  rec.nsi_id = nsi_id;
  rec.amf_workload = amf;
  rec.started_at = clock_.now();
  rec.amf_down_at = clock_.now();
  rec.udr_digest_before = platform_.udr_digest();
  inst.reconfig = rec;
  set_state(inst, NsiState::kReconfiguring);
  emit("reconfig_start", inst, {{"amf", amf}}, "2.2");

  const auto& rt = config_.latency.reconfig;
  const double t0 = clock_.now();
  platform_.delete_workload(amf, rt.amf_delete_s, [this, nsi_id, owner, site, new_amf, t0](bool) {
    auto& inst = instances_.at(nsi_id);
    if (inst.nsi.state != NsiState::kReconfiguring) return;
    const auto& rt = config_.latency.reconfig;
    try {
      platform_.apply_release(owner, new_amf, site, rt.amf_create, [this, nsi_id, t0](bool ok) {
        auto& inst = instances_.at(nsi_id);
        if (inst.nsi.state != NsiState::kReconfiguring) return;
        inst.reconfig->substeps.push_back({"2.2", 2, "CN", "replace", t0, clock_.now(), 2, false});
        if (!ok) {
          inst.failure = DeployFailure{"CN", "2.2", "replacement AMF failed readiness"};
          emit("deploy_failed", inst, {{"domain", "CN"}, {"reason", inst.failure->reason}}, "2.2");
          set_state(inst, NsiState::kDegraded);
          return;
        }
        inst.reconfig->amf_ready_at = clock_.now();
        emit("amf_ready", inst, {{"amf", inst.reconfig->amf_workload}}, "2.2");

        std::vector<std::pair<std::string, SubstepTiming>> rest(config_.latency.reconfig.replay.begin(),
                                                                config_.latency.reconfig.replay.end());
        std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return substep_less(a.first, b.first); });
        replay_step(nsi_id, std::move(rest));
      });
    } catch (const Error& e) {
      inst.failure = DeployFailure{"CN", "2.2", std::string(e.reason()) + ": " + e.what()};
      set_state(inst, NsiState::kDegraded);
    }
  });
}

void Orchestrator::replay_step(const std::string& nsi_id, std::vector<std::pair<std::string, SubstepTiming>> rest) {
  auto& inst = instances_.at(nsi_id);
  if (inst.nsi.state != NsiState::kReconfiguring) return;
  if (rest.empty()) {
    inst.reconfig->finished_at = clock_.now();
    inst.reconfig->udr_digest_after = platform_.udr_digest();
    if (const auto* w = platform_.workload(inst.reconfig->amf_workload)) {
      inst.nsi.nssi(Domain::kCN)->endpoints["amf"] = w->endpoint;
    }
    emit("reconfig_end", inst, {{"outage_s", inst.reconfig->outage_s()}});
    set_state(inst, NsiState::kActive);
    return;
  }
  const auto [id, timing] = rest.front();
  rest.erase(rest.begin());
  const double start = clock_.now();
  emit("substep_start", inst, {{"domain", "CN"}, {"kind", "replay"}}, id);
  clock_.schedule(start + timing.total(), [this, nsi_id, id = id, start, rest = std::move(rest)]() mutable {
    auto& inst = instances_.at(nsi_id);
    if (inst.nsi.state != NsiState::kReconfiguring) return;
    inst.reconfig->substeps.push_back({id, 2, "CN", "replay", start, clock_.now(), 1, false});
    emit("substep_end", inst, {{"domain", "CN"}, {"kind", "replay"}}, id);
    replay_step(nsi_id, std::move(rest));
  });
}

Nsi Orchestrator::modify_nsi(const std::string& nsi_id, const NfProfile& new_amf) {
  begin_modify(nsi_id, new_amf);
  run_until_settled();
  return instances_.at(nsi_id).nsi;
}

Nsi Orchestrator::decommission_nsi(const std::string& nsi_id) {
  auto it = instances_.find(nsi_id);
  if (it == instances_.end()) throw Error(Errc::kNotFound, "no NSI " + nsi_id, {{"nsi", nsi_id}});
  auto& inst = it->second;
  if (inst.nsi.state == NsiState::kTerminated) return inst.nsi;

  if (inst.nsi.state == NsiState::kDeploying || inst.nsi.state == NsiState::kReconfiguring) {
    inst.failure = DeployFailure{"E2E", "", "decommissioned while in progress"};
    set_state(inst, NsiState::kDegraded);
  }
  platform_.delete_owner(nsi_id);
  platform_.delete_namespace(nsi_id);
  const auto removed = sdn_.release_owner(nsi_id, clock_.now());
  vlans_.release(nsi_id);
  snssai_.release(inst.nsi.snssai);
  for (auto& n : inst.nsi.nssis) {
    n.state = NssiState::kRemoved;
    n.resource_ids.clear();
    n.endpoints.clear();
  }
  emit("nsi_decommissioned", inst, {{"rules_removed", removed}});
  set_state(inst, NsiState::kTerminated);
  return inst.nsi;
}

// ---------------------------------------------------------------------------

std::optional<Nsi> Orchestrator::get(const std::string& nsi_id) const {
  auto it = instances_.find(nsi_id);
  if (it == instances_.end()) return std::nullopt;
  return it->second.nsi;
}

std::vector<Nsi> Orchestrator::list() const {
  std::vector<Nsi> out;
  for (const auto& [_, inst] : instances_) out.push_back(inst.nsi);
  return out;
}

std::optional<std::string> Orchestrator::find_by_digest(const std::string& request_digest) const {
  auto it = by_digest_.find(request_digest);
  if (it == by_digest_.end()) return std::nullopt;
  return it->second;
}

const DeploymentPlan* Orchestrator::plan(const std::string& nsi_id) const {
  auto it = instances_.find(nsi_id);
  return it == instances_.end() ? nullptr : &it->second.plan;
}

const DeploymentReport* Orchestrator::report(const std::string& nsi_id) const {
  auto it = instances_.find(nsi_id);
  return it == instances_.end() ? nullptr : &it->second.report;
}

const ReconfigRecord* Orchestrator::reconfig(const std::string& nsi_id) const {
  auto it = instances_.find(nsi_id);
  return it == instances_.end() || !it->second.reconfig ? nullptr : &*it->second.reconfig;
}

std::optional<DeployFailure> Orchestrator::failure(const std::string& nsi_id) const {
  auto it = instances_.find(nsi_id);
  return it == instances_.end() ? std::nullopt : it->second.failure;
}

}  // namespace nsaas
