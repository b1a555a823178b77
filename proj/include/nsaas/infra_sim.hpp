#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string_view>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsaas/config.hpp"
#include "nsaas/slice_model.hpp"

namespace nsaas {

inline constexpr double kForever = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Virtual time. Events fire in (time, sequence) order; sequence numbers are handed out at
// scheduling time so simultaneous events keep their submission order.

class VirtualClock {
 public:
  using Callback = std::function<void()>;

  double now() const { return now_; }

  // `at` earlier than now() is clamped to now().
  std::uint64_t schedule(double at, Callback cb);
  std::uint64_t schedule_in(double delay, Callback cb) { return schedule(now_ + delay, std::move(cb)); }

  // Runs every event with time <= until (including ones scheduled meanwhile) and leaves
  // now() == until. Returns the number of events fired.
  std::size_t advance(double until);
  // Fires the earliest pending event. False when idle.
  bool step();
  std::size_t run_all();

  bool idle() const { return queue_.empty(); }
  std::optional<double> next_time() const;
  std::size_t pending() const { return queue_.size(); }

 private:
  struct Event {
    double at;
    std::uint64_t seq;
    Callback cb;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  double now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

// ---------------------------------------------------------------------------
// Structured event log, exported as JSONL.

class EventLog {
 public:
  void append(double t, const std::string& kind, Json fields = Json::object());
  const std::vector<Json>& events() const { return events_; }
  std::vector<Json> of_kind(const std::string& kind) const;
  std::string to_jsonl() const;
  void clear() { events_.clear(); }

 private:
  std::vector<Json> events_;
};

// ---------------------------------------------------------------------------
// Container platform.

enum class WorkloadPhase { kPulling, kApplying, kProbing, kReady, kDraining, kTerminating, kDeleted, kFailed };
std::string_view to_string(WorkloadPhase p);

struct UsageSegment {
  std::string workload;
  std::string owner;
  double start = 0;
  double end = kForever;
  double cpu = 0;
  double ram_mb = 0;
  double cpu_request = 0;
  double ram_request_mb = 0;
};

struct Workload {
  std::string id;     // "<owner>/<name>"
  std::string owner;  // NSI id, or "shared" for platform workloads
  std::string site;
  NfProfile profile;
  std::string spec_digest;
  WorkloadPhase phase = WorkloadPhase::kPulling;
  std::uint64_t generation = 0;
  std::string endpoint;
  std::vector<std::pair<double, bool>> readiness;  // (time, ready) transitions
  std::vector<double> utilization_window;
};

struct ApplyResult {
  std::string workload_id;
  bool changed = false;    // false when the spec was already applied and ready
  bool recreated = false;  // immutable field changed: the old pod is replaced
  double ready_at = 0;     // virtual time readiness is expected
};

class Platform {
 public:
  using Done = std::function<void(bool ok)>;

  Platform(VirtualClock& clock, const Config& config, EventLog* log = nullptr);

  // Pre-deploys the shared control plane; ready immediately.
  void bootstrap_shared();

  void create_namespace(const std::string& ns);
  bool has_namespace(const std::string& ns) const { return namespaces_.count(ns) > 0; }
  void delete_namespace(const std::string& ns);

  // Declarative apply. Phases pull -> apply -> probe are scheduled on the virtual clock and
  // `done` fires when the workload is Ready (or Failed). Re-applying an identical spec to a
  // Ready workload changes nothing and completes immediately. Throws QuotaExceeded when the
  // site cannot host the extra requested resources.
  ApplyResult apply_release(const std::string& owner, const NfProfile& profile, const std::string& site,
                            const SubstepTiming& timing, Done done = {});

  // Marks the workload not-ready now and removes it after `delay`.
  void delete_workload(const std::string& id, double delay, Done done = {});
  // Removes every workload of an owner immediately.
  void delete_owner(const std::string& owner);

  // Keeps serving but flags the workload as draining.
  void start_drain(const std::string& id);

  // Binds `owner` to an already running shared NF; completes after `delay`.
  void bind_shared(const std::string& owner, const std::string& role, double delay, Done done);

  // The next apply or bind for `role` under `owner` ends in failure; owner "*" matches any.
  void inject_failure(const std::string& owner, const std::string& role);

  // Adds a utilization sample and applies the threshold policy on the window mean.
  // Returns the replica count after the decision.
  int autoscale_tick(const std::string& id, double utilization);

  const Workload* workload(const std::string& id) const;
  std::vector<const Workload*> workloads_of(const std::string& owner) const;
  std::vector<std::string> workload_ids() const;

  bool ready_at(const std::string& id, double t) const;
  // Time the workload last became ready, if it is ready at t.
  std::optional<double> ready_since(const std::string& id, double t) const;

  // Summed usage of live workloads at time t; empty owner means all owners.
  std::pair<double, double> usage_at(double t, const std::string& owner = {}) const;
  std::pair<double, double> requested_at_site(const std::string& site) const;
  const std::vector<UsageSegment>& usage_segments() const { return segments_; }

  // Shared subscriber store (UDR); untouched by workload churn.
  void udr_put(const std::string& key, Json value) { udr_[key] = std::move(value); }
  const std::map<std::string, Json>& udr() const { return udr_; }
  std::string udr_digest() const;

  static std::string workload_id(const std::string& owner, const std::string& name) { return owner + "/" + name; }

 private:
  void set_phase(Workload& w, WorkloadPhase p);
  void set_ready(Workload& w, bool ready);
  void open_segment(const Workload& w);
  void close_segment(const std::string& id);
  void check_quota(const std::string& site, double extra_cpu, double extra_ram, const std::string& id) const;
  bool take_failure(const std::string& owner, const std::string& role);

  VirtualClock& clock_;
  const Config& config_;
  EventLog* log_;
  std::map<std::string, Workload> workloads_;
  std::set<std::string> namespaces_;
  std::set<std::pair<std::string, std::string>> failures_;
  std::vector<UsageSegment> segments_;
  std::map<std::string, Json> udr_;
  std::map<std::string, std::vector<Done>> waiters_;
  std::map<std::string, double> pending_ready_;
};

// ---------------------------------------------------------------------------
// SDN transport.

struct FlowRule {
  std::string sw;
  int vlan = 0;
  std::string in_port;   // neighbour the packet arrives from
  std::string out_port;  // neighbour it leaves towards
  int priority = 0;
  std::string direction;  // "uplink" | "downlink"

  std::string match_key() const { return sw + "|" + std::to_string(vlan) + "|" + in_port; }
  bool operator==(const FlowRule&) const = default;
};

void to_json(Json& j, const FlowRule& r);

class SdnController {
 public:
  explicit SdnController(const TopologyConfig& topo, EventLog* log = nullptr);

  // Node sequence from src to dst (hosts included). "shortest" is a deterministic BFS path
  // preferring lexicographically smaller neighbours; "resilient" is routed through the
  // configured detour waypoints. Throws NoPath.
  std::vector<std::string> compute_path(const std::string& src, const std::string& dst,
                                        const std::string& policy) const;

  // One rule per switch per direction along the path.
  std::vector<FlowRule> plan_routes(const std::string& src, const std::string& dst, int vlan,
                                    const std::string& policy, int priority) const;

  // Reference-counted by owner. Identical rules are shared; a rule with the same match but a
  // different action throws RuleConflict.
  void install_rule(const FlowRule& rule, const std::string& owner, double t = 0);
  // Drops the owner's references; rules with no remaining owner are removed.
  std::size_t release_owner(const std::string& owner, double t = 0);

  std::size_t rule_count() const { return rules_.size(); }
  std::size_t refcount(const FlowRule& rule) const;
  std::vector<FlowRule> rules() const;
  std::vector<FlowRule> rules_of(const std::string& owner) const;

  static std::size_t switch_hops(const std::vector<std::string>& path, const TopologyConfig& topo);

 private:
  std::vector<std::string> shortest(const std::string& src, const std::string& dst) const;

  const TopologyConfig& topo_;
  EventLog* log_;
  std::map<std::string, std::set<std::string>> adj_;
  struct Entry {
    FlowRule rule;
    std::set<std::string> owners;
  };
  std::map<std::string, Entry> rules_;  // by match key
};

}  // namespace nsaas
