#include "nsaas/infra_sim.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// VirtualClock

std::uint64_t VirtualClock::schedule(double at, Callback cb) {
  const auto seq = next_seq_++;
  queue_.push({std::max(at, now_), seq, std::move(cb)});
  return seq;
}

bool VirtualClock::step() {
  if (queue_.empty()) return false;
  Event ev = queue_.top();
  queue_.pop();
  now_ = std::max(now_, ev.at);
  if (ev.cb) ev.cb();
  return true;
}

std::size_t VirtualClock::advance(double until) {
  std::size_t fired = 0;
  while (!queue_.empty() && queue_.top().at <= until) {
    step();
    ++fired;
  }
  now_ = std::max(now_, until);
  return fired;
}

std::size_t VirtualClock::run_all() {
  std::size_t fired = 0;
  while (step()) ++fired;
  return fired;
}

std::optional<double> VirtualClock::next_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().at;
}

// ---------------------------------------------------------------------------
// EventLog

void EventLog::append(double t, const std::string& kind, Json fields) {
  fields["virtual_time"] = t;
  fields["seq"] = events_.size();
  fields["kind"] = kind;
  events_.push_back(std::move(fields));
}

std::vector<Json> EventLog::of_kind(const std::string& kind) const {
  std::vector<Json> out;
  for (const auto& e : events_) {
    if (e.at("kind") == kind) out.push_back(e);
  }
  return out;
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) out += canonical(e) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Platform

std::string_view to_string(WorkloadPhase p) {
  switch (p) {
    case WorkloadPhase::kPulling: return "Pulling";
    case WorkloadPhase::kApplying: return "Applying";
    case WorkloadPhase::kProbing: return "Probing";
    case WorkloadPhase::kReady: return "Ready";
    case WorkloadPhase::kDraining: return "Draining";
    case WorkloadPhase::kTerminating: return "Terminating";
    case WorkloadPhase::kDeleted: return "Deleted";
    case WorkloadPhase::kFailed: return "Failed";
  }
  return "?";
}

namespace {

bool live(const Workload& w) { return w.phase != WorkloadPhase::kDeleted && w.phase != WorkloadPhase::kFailed; }

bool same_immutable(const NfProfile& a, const NfProfile& b) {
  NfProfile x = a;
  x.replicas = b.replicas;
  return x == b;
}

}  // namespace

Platform::Platform(VirtualClock& clock, const Config& config, EventLog* log)
    : clock_(clock), config_(config), log_(log) {}

void Platform::bootstrap_shared() {
  create_namespace("shared");
  for (const auto& p : config_.shared_platform) {
    const auto id = workload_id("shared", p.name);
    if (workloads_.count(id) && live(workloads_.at(id))) continue;
    Workload w;
    w.id = id;
    w.owner = "shared";
    w.site = config_.shared_site;
    w.profile = p;
    w.spec_digest = digest_of(Json{{"profile", p}, {"site", w.site}});
    w.endpoint = p.name + ".shared.svc";
    workloads_[id] = w;
    auto& ref = workloads_[id];
    open_segment(ref);
    set_phase(ref, WorkloadPhase::kReady);
    set_ready(ref, true);
  }
}

void Platform::create_namespace(const std::string& ns) {
  if (namespaces_.insert(ns).second && log_) log_->append(clock_.now(), "namespace_created", {{"namespace", ns}});
}

void Platform::delete_namespace(const std::string& ns) {
  if (namespaces_.erase(ns) && log_) log_->append(clock_.now(), "namespace_deleted", {{"namespace", ns}});
}

void Platform::set_phase(Workload& w, WorkloadPhase p) {
  w.phase = p;
  if (log_) {
    log_->append(clock_.now(), "workload_phase",
                 {{"workload", w.id}, {"phase", std::string(to_string(p))}, {"generation", w.generation}});
  }
}

void Platform::set_ready(Workload& w, bool ready) {
  if (!w.readiness.empty() && w.readiness.back().second == ready) return;
  w.readiness.emplace_back(clock_.now(), ready);
}

void Platform::open_segment(const Workload& w) {
  UsageSegment s;
  s.workload = w.id;
  s.owner = w.owner;
  s.start = clock_.now();
  s.cpu = w.profile.cpu_usage * w.profile.replicas;
  s.ram_mb = w.profile.ram_usage_mb * w.profile.replicas;
  s.cpu_request = w.profile.cpu_request * w.profile.replicas;
  s.ram_request_mb = w.profile.ram_request_mb * w.profile.replicas;
  segments_.push_back(s);
}

void Platform::close_segment(const std::string& id) {
  for (auto& s : segments_) {
    if (s.workload == id && s.end == kForever) s.end = clock_.now();
  }
}

std::pair<double, double> Platform::requested_at_site(const std::string& site) const {
  double cpu = 0;
  double ram = 0;
  for (const auto& [_, w] : workloads_) {
    if (w.site != site || !live(w) || w.phase == WorkloadPhase::kTerminating) continue;
    cpu += w.profile.cpu_request * w.profile.replicas;
    ram += w.profile.ram_request_mb * w.profile.replicas;
  }
  return {cpu, ram};
}

void Platform::check_quota(const std::string& site, double extra_cpu, double extra_ram, const std::string& id) const {
  auto it = config_.topology.sites.find(site);
  if (it == config_.topology.sites.end()) {
    throw Error(Errc::kValidation, "unknown site '" + site + "'", {{"site", site}, {"workload", id}});
  }
  const auto [cpu, ram] = requested_at_site(site);
  if (cpu + extra_cpu > it->second.vcpu + 1e-9 || ram + extra_ram > it->second.ram_mb + 1e-9) {
    throw Error(Errc::kQuotaExceeded, "site '" + site + "' cannot host " + id,
                {{"site", site},
                 {"workload", id},
                 {"requested_vcpu", cpu + extra_cpu},
                 {"capacity_vcpu", it->second.vcpu},
                 {"requested_ram_mb", ram + extra_ram},
                 {"capacity_ram_mb", it->second.ram_mb}});
  }
}

ApplyResult Platform::apply_release(const std::string& owner, const NfProfile& profile, const std::string& site,
                                    const SubstepTiming& timing, Done done) {
  const auto id = workload_id(owner, profile.name);
  const auto digest = digest_of(Json{{"profile", profile}, {"site", site}});
  const double now = clock_.now();
  ApplyResult result{id, true, false, now};

  auto it = workloads_.find(id);
  if (it != workloads_.end() && live(it->second) && it->second.phase != WorkloadPhase::kTerminating) {
    Workload& w = it->second;
    if (w.spec_digest == digest) {
      result.changed = false;
      if (w.phase == WorkloadPhase::kReady || w.phase == WorkloadPhase::kDraining) {
        if (done) clock_.schedule(now, [done] { done(true); });
      } else {
        result.ready_at = pending_ready_[id];
        if (done) waiters_[id].push_back(std::move(done));
      }
      return result;
    }
    if (same_immutable(w.profile, profile) && w.site == site && w.phase == WorkloadPhase::kReady) {
      const int delta = profile.replicas - w.profile.replicas;
      check_quota(site, std::max(0, delta) * profile.cpu_request, std::max(0, delta) * profile.ram_request_mb, id);
      close_segment(id);
      w.profile = profile;
      w.spec_digest = digest;
      open_segment(w);
      if (log_) log_->append(now, "workload_scaled", {{"workload", id}, {"replicas", profile.replicas}});
      result.ready_at = now + timing.apply_s;
      if (done) clock_.schedule(result.ready_at, [done] { done(true); });
      return result;
    }
    // Immutable change: the running pod is replaced.
    result.recreated = true;
    set_ready(w, false);
    close_segment(id);
    w.phase = WorkloadPhase::kDeleted;
  }

  check_quota(site, profile.cpu_request * profile.replicas, profile.ram_request_mb * profile.replicas, id);

  Workload w;
  w.id = id;
  w.owner = owner;
  w.site = site;
  w.profile = profile;
  w.spec_digest = digest;
  w.endpoint = profile.name + "." + owner + ".svc";
  if (it != workloads_.end()) {
    w.generation = it->second.generation + 1;
    w.readiness = it->second.readiness;
  }
  const auto gen = w.generation;
  workloads_[id] = std::move(w);
  Workload& ref = workloads_[id];
  open_segment(ref);
  set_phase(ref, WorkloadPhase::kPulling);

  const double t_apply = now + timing.pull_s;
  const double t_probe = t_apply + timing.apply_s;
  const double t_ready = t_probe + timing.probe_s;
  result.ready_at = t_ready;
  pending_ready_[id] = t_ready;
  if (done) waiters_[id].push_back(std::move(done));

  const bool fail = take_failure(owner, profile.name);
  auto guard = [this, id, gen](auto fn) {
    return [this, id, gen, fn] {
      auto found = workloads_.find(id);
      if (found == workloads_.end() || found->second.generation != gen || !live(found->second)) return;
      fn(found->second);
    };
  };
  clock_.schedule(t_apply, guard([this](Workload& x) { set_phase(x, WorkloadPhase::kApplying); }));
  clock_.schedule(t_probe, guard([this](Workload& x) { set_phase(x, WorkloadPhase::kProbing); }));
  clock_.schedule(t_ready, guard([this, fail](Workload& x) {
                    if (fail) {
                      set_phase(x, WorkloadPhase::kFailed);
                      close_segment(x.id);
                    } else {
                      set_phase(x, WorkloadPhase::kReady);
                      set_ready(x, true);
                    }
                    auto waiters = std::move(waiters_[x.id]);
                    waiters_.erase(x.id);
                    for (auto& cb : waiters) cb(!fail);
                  }));
  return result;
}

void Platform::delete_workload(const std::string& id, double delay, Done done) {
  auto it = workloads_.find(id);
  if (it == workloads_.end() || !live(it->second)) {
    if (done) clock_.schedule(clock_.now(), [done] { done(true); });
    return;
  }
  Workload& w = it->second;
  set_ready(w, false);
  ++w.generation;
  const auto gen = w.generation;
  set_phase(w, WorkloadPhase::kTerminating);
  clock_.schedule(clock_.now() + delay, [this, id, gen, done] {
    auto found = workloads_.find(id);
    if (found != workloads_.end() && found->second.generation == gen) {
      close_segment(id);
      set_phase(found->second, WorkloadPhase::kDeleted);
    }
    if (done) done(true);
  });
}

void Platform::delete_owner(const std::string& owner) {
  for (auto& [id, w] : workloads_) {
    if (w.owner != owner || !live(w)) continue;
    set_ready(w, false);
    ++w.generation;
    close_segment(id);
    set_phase(w, WorkloadPhase::kDeleted);
  }
}

void Platform::start_drain(const std::string& id) {
  auto it = workloads_.find(id);
  if (it == workloads_.end() || it->second.phase != WorkloadPhase::kReady) {
    throw Error(Errc::kInvalidState, "workload " + id + " is not ready", {{"workload", id}});
  }
  set_phase(it->second, WorkloadPhase::kDraining);
}

void Platform::inject_failure(const std::string& owner, const std::string& role) { failures_.insert({owner, role}); }

bool Platform::take_failure(const std::string& owner, const std::string& role) {
  return failures_.erase({owner, role}) > 0 || failures_.erase({"*", role}) > 0;
}

void Platform::bind_shared(const std::string& owner, const std::string& role, double delay, Done done) {
  const bool fail = take_failure(owner, role);
  if (log_) log_->append(clock_.now(), "shared_bind", {{"owner", owner}, {"nf", role}});
  clock_.schedule(clock_.now() + delay, [done, fail] {
    if (done) done(!fail);
  });
}

int Platform::autoscale_tick(const std::string& id, double utilization) {
  auto it = workloads_.find(id);
  if (it == workloads_.end() || !live(it->second)) throw Error(Errc::kNotFound, "no workload " + id);
  Workload& w = it->second;
  const auto& cfg = config_.autoscaler;
  w.utilization_window.push_back(utilization);
  if (static_cast<int>(w.utilization_window.size()) > cfg.window) {
    w.utilization_window.erase(w.utilization_window.begin());
  }
  if (static_cast<int>(w.utilization_window.size()) < cfg.window) return w.profile.replicas;

  const double mean = std::accumulate(w.utilization_window.begin(), w.utilization_window.end(), 0.0) /
                      static_cast<double>(w.utilization_window.size());
  int target = w.profile.replicas;
  if (mean > cfg.scale_up) target = std::min(cfg.max_replicas, target + 1);
  if (mean < cfg.scale_down) target = std::max(cfg.min_replicas, target - 1);
  if (target != w.profile.replicas) {
    if (log_) {
      log_->append(clock_.now(), "autoscale",
                   {{"workload", id}, {"before", w.profile.replicas}, {"after", target}, {"window_mean", mean}});
    }
    close_segment(id);
    w.profile.replicas = target;
    w.spec_digest = digest_of(Json{{"profile", w.profile}, {"site", w.site}});
    open_segment(w);
    w.utilization_window.clear();
  }
  return w.profile.replicas;
}

const Workload* Platform::workload(const std::string& id) const {
  auto it = workloads_.find(id);
  return it == workloads_.end() ? nullptr : &it->second;
}

std::vector<const Workload*> Platform::workloads_of(const std::string& owner) const {
  std::vector<const Workload*> out;
  for (const auto& [_, w] : workloads_) {
    if (w.owner == owner) out.push_back(&w);
  }
  return out;
}

std::vector<std::string> Platform::workload_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : workloads_) out.push_back(id);
  return out;
}

bool Platform::ready_at(const std::string& id, double t) const { return ready_since(id, t).has_value(); }

std::optional<double> Platform::ready_since(const std::string& id, double t) const {
  auto it = workloads_.find(id);
  if (it == workloads_.end()) return std::nullopt;
  const std::pair<double, bool>* last = nullptr;
  for (const auto& tr : it->second.readiness) {
    if (tr.first > t) break;
    last = &tr;
  }
  if (last == nullptr || !last->second) return std::nullopt;
  return last->first;
}

std::pair<double, double> Platform::usage_at(double t, const std::string& owner) const {
  double cpu = 0;
  double ram = 0;
  for (const auto& s : segments_) {
    if (!owner.empty() && s.owner != owner) continue;
    if (s.start <= t && t < s.end) {
      cpu += s.cpu;
      ram += s.ram_mb;
    }
  }
  return {cpu, ram};
}

std::string Platform::udr_digest() const {
  Json j = Json::object();
  for (const auto& [k, v] : udr_) j[k] = v;
  return digest_of(j);
}

// ---------------------------------------------------------------------------
// SdnController

void to_json(Json& j, const FlowRule& r) {
  j = {{"switch", r.sw},       {"vlan", r.vlan},         {"in_port", r.in_port},
       {"out_port", r.out_port}, {"priority", r.priority}, {"direction", r.direction}};
}

SdnController::SdnController(const TopologyConfig& topo, EventLog* log) : topo_(topo), log_(log) {
  for (const auto& l : topo_.links) {
    adj_[l.a].insert(l.b);
    adj_[l.b].insert(l.a);
  }
}

std::vector<std::string> SdnController::shortest(const std::string& src, const std::string& dst) const {
  if (!adj_.count(src) || !adj_.count(dst)) {
    throw Error(Errc::kNoPath, "unknown endpoint " + (adj_.count(src) ? dst : src), {{"src", src}, {"dst", dst}});
  }
  std::map<std::string, int> dist{{dst, 0}};
  std::deque<std::string> frontier{dst};
  while (!frontier.empty()) {
    const auto cur = frontier.front();
    frontier.pop_front();
    for (const auto& n : adj_.at(cur)) {
      if (dist.emplace(n, dist[cur] + 1).second) frontier.push_back(n);
    }
  }
  if (!dist.count(src)) throw Error(Errc::kNoPath, "no path from " + src + " to " + dst, {{"src", src}, {"dst", dst}});

  std::vector<std::string> path{src};
  std::string cur = src;
  while (cur != dst) {
    for (const auto& n : adj_.at(cur)) {  // std::set: lexicographic order
      auto d = dist.find(n);
      if (d != dist.end() && d->second == dist.at(cur) - 1) {
        cur = n;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

std::vector<std::string> SdnController::compute_path(const std::string& src, const std::string& dst,
                                                     const std::string& policy) const {
  if (policy == "shortest") return shortest(src, dst);
  if (policy != "resilient") throw Error(Errc::kValidation, "unknown route policy '" + policy + "'");

  std::vector<std::string> hops{src};
  hops.insert(hops.end(), topo_.detour.begin(), topo_.detour.end());
  hops.push_back(dst);
  std::vector<std::string> path{src};
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const auto seg = shortest(hops[i], hops[i + 1]);
    path.insert(path.end(), seg.begin() + 1, seg.end());
  }
  std::set<std::string> seen(path.begin(), path.end());
  if (seen.size() != path.size()) {
    throw Error(Errc::kNoPath, "detour produces a loop", {{"src", src}, {"dst", dst}, {"path", path}});
  }
  return path;
}

std::vector<FlowRule> SdnController::plan_routes(const std::string& src, const std::string& dst, int vlan,
                                                 const std::string& policy, int priority) const {
  const auto path = compute_path(src, dst, policy);
  const std::set<std::string> switches(topo_.switches.begin(), topo_.switches.end());
  std::vector<FlowRule> rules;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    if (switches.count(path[i])) rules.push_back({path[i], vlan, path[i - 1], path[i + 1], priority, "uplink"});
  }
  for (std::size_t i = path.size() - 2; i >= 1; --i) {
    if (switches.count(path[i])) rules.push_back({path[i], vlan, path[i + 1], path[i - 1], priority, "downlink"});
  }
  return rules;
}

void SdnController::install_rule(const FlowRule& rule, const std::string& owner, double t) {
  const auto key = rule.match_key();
  auto it = rules_.find(key);
  if (it != rules_.end()) {
    if (!(it->second.rule == rule)) {
      throw Error(Errc::kRuleConflict, "flow rule conflicts on " + key,
                  {{"match", key}, {"installed", it->second.rule}, {"requested", rule}, {"owner", owner}});
    }
    it->second.owners.insert(owner);
    return;
  }
  rules_[key] = {rule, {owner}};
  if (log_) log_->append(t, "flow_installed", {{"rule", rule}, {"owner", owner}});
}

std::size_t SdnController::release_owner(const std::string& owner, double t) {
  std::size_t removed = 0;
  for (auto it = rules_.begin(); it != rules_.end();) {
    it->second.owners.erase(owner);
    if (it->second.owners.empty()) {
      if (log_) log_->append(t, "flow_removed", {{"rule", it->second.rule}, {"owner", owner}});
      it = rules_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::size_t SdnController::refcount(const FlowRule& rule) const {
  auto it = rules_.find(rule.match_key());
  return it == rules_.end() || !(it->second.rule == rule) ? 0 : it->second.owners.size();
}

std::vector<FlowRule> SdnController::rules() const {
  std::vector<FlowRule> out;
  for (const auto& [_, e] : rules_) out.push_back(e.rule);
  return out;
}

std::vector<FlowRule> SdnController::rules_of(const std::string& owner) const {
  std::vector<FlowRule> out;
  for (const auto& [_, e] : rules_) {
    if (e.owners.count(owner)) out.push_back(e.rule);
  }
  return out;
}

std::size_t SdnController::switch_hops(const std::vector<std::string>& path, const TopologyConfig& topo) {
  return std::count_if(path.begin(), path.end(), [&](const std::string& n) {
    return std::find(topo.switches.begin(), topo.switches.end(), n) != topo.switches.end();
  });
}

}  // namespace nsaas
