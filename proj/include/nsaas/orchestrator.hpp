#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nsaas/catalog.hpp"
#include "nsaas/config.hpp"
#include "nsaas/infra_sim.hpp"
#include "nsaas/onboard.hpp"
#include "nsaas/slice_model.hpp"

namespace nsaas {

inline constexpr double kEfficiencyEpsilon = 1e-3;

// ---------------------------------------------------------------------------
// Identifier pools.

class SnssaiAllocator {
 public:
  explicit SnssaiAllocator(std::uint32_t pool_size = kSdLimit - 1) : pool_size_(pool_size) {}

  // SD values are sequential per SST starting at 1. Throws PoolExhausted.
  SNssai allocate(const std::string& tenant, Scenario scenario);
  void release(const SNssai& s) { in_use_.erase(s); }
  std::size_t in_use() const { return in_use_.size(); }

 private:
  std::uint32_t pool_size_;
  std::map<std::uint8_t, std::uint32_t> next_sd_;
  std::set<SNssai> in_use_;
};

class VlanAllocator {
 public:
  explicit VlanAllocator(const VlanPolicy& policy) : policy_(policy) {}

  // Preferred VLAN of the scenario; exclusive scenarios fall back to the pool when the preferred
  // id is held by another slice. Throws PoolExhausted.
  int allocate(Scenario scenario, const std::string& nsi);
  void release(const std::string& nsi);
  std::optional<std::string> owner_of(int vlan) const;  // exclusive holders only
  std::set<std::string> users_of(int vlan) const;

 private:
  const VlanPolicy& policy_;
  std::map<int, std::string> exclusive_;
  std::map<int, std::set<std::string>> shared_;
};

// ---------------------------------------------------------------------------
// Deployment plan.

struct Substep {
  std::string id;      // "2.7"
  int step = 0;        // 1..6
  std::string domain;  // CN | RAN | TN | E2E
  std::string kind;    // allocate | pull_images | patch_shared | namespace | deploy | bind_shared | publish |
                       // inject_endpoint | ng_setup | ipsec_tunnel | commit | route_install | verify | activate
  std::string target;  // NF role, rule match key, ...
  int actions = 1;
  SubstepTiming timing;
  bool reuse = false;
  std::vector<std::string> depends_on;
  std::optional<NfProfile> profile;
  std::string site;
  std::optional<FlowRule> rule;

  double expected_s() const { return timing.total(); }
};

struct DeploymentPlan {
  std::string nsi_id;
  Scenario scenario = Scenario::kSharedEMBB;
  std::vector<Substep> substeps;

  std::size_t size() const { return substeps.size(); }
  std::size_t count_step(int step) const;
  double expected_total() const;
  // Throws Validation when the dependency graph has a cycle or the domain order is broken.
  void validate() const;
  Json to_json() const;
};

struct SubstepRecord {
  std::string id;
  int step = 0;
  std::string domain;
  std::string kind;
  double start = 0;
  double end = 0;
  int actions = 0;
  bool reuse = false;

  double duration() const { return end - start; }
};

struct StepEfficiency {
  std::string group;  // substep id, step number, or "total"
  int actions = 0;
  double duration = 0;
  double efficiency = 0;
  bool reuse = false;
};

struct DeploymentReport {
  std::string nsi_id;
  Scenario scenario = Scenario::kSharedEMBB;
  std::vector<SubstepRecord> substeps;
  double started_at = 0;
  double finished_at = 0;
  bool complete = false;

  double total() const;
  double domain_total(const std::string& domain) const;  // CN | RAN | TN | E2E
  double step_total(int step) const;
  Json to_json() const;
};

// Per-substep, per-step and whole-plan actions per second, with an epsilon guard.
std::vector<StepEfficiency> step_efficiency(const DeploymentReport& report);

// Instantiates the substep catalog for the NST. TN rules come from the SDN path for `vlan`.
DeploymentPlan build_deployment_plan(const Nst& nst, Scenario scenario, const Config& config,
                                     const SdnController& sdn, int vlan, const std::string& nsi_id = {});

// ---------------------------------------------------------------------------

struct ReconfigRecord {
  std::string nsi_id;
  std::string amf_workload;
  double started_at = 0;
  double amf_down_at = 0;
  std::optional<double> amf_ready_at;
  std::optional<double> finished_at;
  std::string udr_digest_before;
  std::string udr_digest_after;
  std::vector<SubstepRecord> substeps;

  double outage_s() const { return amf_ready_at ? *amf_ready_at - amf_down_at : 0.0; }
};

struct DeployFailure {
  std::string domain;
  std::string substep;
  std::string reason;
};

class Orchestrator {
 public:
  Orchestrator(const Config& config, DataStore& store, VirtualClock& clock, Platform& platform, SdnController& sdn,
               EventLog& log);

  SNssai allocate_snssai(const std::string& tenant, Scenario scenario) { return snssai_.allocate(tenant, scenario); }

  // Registers the NSI now and schedules its creation chain at `start_at` (default: now).
  // An identical request that already has a live NSI returns that NSI instead.
  std::string begin_create(const OnboardResult& onboarded, std::optional<double> start_at = std::nullopt);
  // begin_create + run the clock until the NSI settles. Throws DomainDeployFailure when the
  // NSI ends Degraded.
  Nsi create_nsi(const OnboardResult& onboarded);

  // AMF replace-and-redeploy followed by replay of 2.3..2.10.
  void begin_modify(const std::string& nsi_id, const NfProfile& new_amf);
  Nsi modify_nsi(const std::string& nsi_id, const NfProfile& new_amf);

  // Idempotent; unknown ids throw NotFound.
  Nsi decommission_nsi(const std::string& nsi_id);

  // Runs the clock until no NSI is Deploying/Reconfiguring.
  void run_until_settled();
  bool settled() const;

  std::optional<Nsi> get(const std::string& nsi_id) const;
  std::vector<Nsi> list() const;
  std::optional<std::string> find_by_digest(const std::string& request_digest) const;
  const DeploymentPlan* plan(const std::string& nsi_id) const;
  const DeploymentReport* report(const std::string& nsi_id) const;
  const ReconfigRecord* reconfig(const std::string& nsi_id) const;
  std::optional<DeployFailure> failure(const std::string& nsi_id) const;

  // Workload id of the AMF serving the slice (dedicated or shared).
  std::string amf_workload(const std::string& nsi_id) const;
  // Number of Active/Deploying NSIs bound to a shared NF role.
  std::size_t shared_refcount(const std::string& role) const;

  const VlanAllocator& vlans() const { return vlans_; }

 private:
  struct Instance {
    Nsi nsi;
    Nst nst;
    DeploymentPlan plan;
    DeploymentReport report;
    std::optional<ReconfigRecord> reconfig;
    std::optional<DeployFailure> failure;
  };

  void run_substep(const std::string& nsi_id, std::size_t index);
  void finish_substep(const std::string& nsi_id, std::size_t index, bool ok, const std::string& reason = {});
  void fail(Instance& inst, const Substep& s, const std::string& reason);
  void set_state(Instance& inst, NsiState to);
  void commit(Instance& inst);
  void emit(const std::string& kind, const Instance& inst, Json payload = Json::object(), const std::string& substep = {});
  void replay_step(const std::string& nsi_id, std::vector<std::pair<std::string, SubstepTiming>> rest);

  const Config& config_;
  DataStore& store_;
  VirtualClock& clock_;
  Platform& platform_;
  SdnController& sdn_;
  EventLog& log_;
  SnssaiAllocator snssai_;
  VlanAllocator vlans_;
  std::map<std::string, Instance> instances_;
  std::map<std::string, std::string> by_digest_;
  std::uint64_t next_id_ = 1;
};

}  // namespace nsaas
