#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsaas/slice_model.hpp"
#include "nsaas/types.hpp"

namespace nsaas {

// One deployment substep's virtual-time cost. Workload substeps use all three phases;
// control actions only use apply_s.
struct SubstepTiming {
  double pull_s = 0;
  double apply_s = 0;
  double probe_s = 0;

  double total() const { return pull_s + apply_s + probe_s; }
};

struct ScenarioTiming {
  std::map<std::string, SubstepTiming> substeps;  // keyed by substep id ("1.1", "2.7", ...)
  SubstepTiming tn_rule;                           // cost of one flow-rule install

  SubstepTiming at(const std::string& id) const;  // missing ids cost nothing
};

// Orchestrated AMF replace-and-redeploy.
struct ReconfigTiming {
  double amf_delete_s = 2.0;
  SubstepTiming amf_create{0.0, 4.0, 3.0};
  std::map<std::string, SubstepTiming> replay;  // 2.3 .. 2.10
  NfProfile new_amf_profile;
};

// Unorchestrated restart: the old AMF drains, dies, and a cold replacement must re-attach.
struct BareRestartTiming {
  double drain_s = 13.0;
  SubstepTiming restart{12.0, 4.0, 3.0};
  double ng_resetup_s = 5.0;

  double outage_s() const { return restart.total() + ng_resetup_s; }
};

struct LatencyTable {
  std::map<Scenario, ScenarioTiming> scenarios;
  ReconfigTiming reconfig;
  BareRestartTiming bare_restart;
  double onboard_processing_s = 0.5;
  double jitter = 0.0;  // relative, seeded; 0 keeps runs exactly on the table
};

struct Link {
  std::string a;
  std::string b;
  double latency_ms = 0.2;
};

struct SiteCapacity {
  double vcpu = 0;
  double ram_mb = 0;
};

struct TopologyConfig {
  std::vector<std::string> switches;
  std::vector<std::string> hosts;
  std::vector<Link> links;
  std::vector<std::string> detour;  // waypoints forced by the resilient policy
  std::string ran_endpoint = "ran-gw";
  std::string cn_endpoint = "cn-gw";
  std::map<std::string, SiteCapacity> sites;
};

struct VlanPolicy {
  std::map<Scenario, int> preferred;
  std::map<Scenario, bool> exclusive;
  int pool_first = 105;
  int pool_last = 199;

  bool legal(int vlan) const;
};

struct QuotaPolicy {
  double max_vcpu_per_slice = 4.0;
  double max_ram_mb_per_slice = 8192.0;
};

struct AttachProfile {
  double cp_rtt_ms = 0;         // control-plane round trip
  int round_trips = 10;         // NAS/NGAP exchanges in a registration
  double processing_ms = 0;
  double queue_ms_per_ue = 0;   // shared control-plane queueing
  double backoff_mean_ms = 0;   // exponential random-access backoff
  double tunnel_ms = 0;         // IPsec/N3IWF setup

  double deterministic_ms(int concurrent_ues) const {
    return cp_rtt_ms * round_trips + processing_ms + queue_ms_per_ue * concurrent_ues + tunnel_ms;
  }
};

struct AttachModelConfig {
  std::map<Scenario, AttachProfile> profiles;
  double jitter = 0.03;              // relative gaussian sigma on the deterministic part
  double recovery_penalty_ms = 900;  // extra latency when an AMF has just become ready
  double recovery_decay_per_s = 0.04;
  double registration_timeout_ms = 5000;
  double drain_peak_ms = 4000;       // latency reached at the end of an unorchestrated drain
};

struct AutoscalerConfig {
  double scale_up = 0.80;
  double scale_down = 0.20;
  int min_replicas = 1;
  int max_replicas = 10;
  int window = 3;  // samples
};

struct TelemetryConfig {
  double sampling_period_s = 0.5;
  double usage_jitter = 0.02;
  double outlier_sigma = 3.0;
};

struct Config {
  ClassificationRules classification;
  std::map<Scenario, NormalizedRequirements> scenario_defaults;
  TopologyConfig topology;
  VlanPolicy vlans;
  QuotaPolicy quotas;
  LatencyTable latency;
  std::vector<NfProfile> shared_platform;  // pre-deployed shared CN + platform workloads
  std::string shared_site = "central";
  AttachModelConfig attach;
  AutoscalerConfig autoscaler;
  TelemetryConfig telemetry;
  int admission_cap = 7;
  std::uint32_t snssai_pool_size = kSdLimit - 1;
  std::uint64_t seed = 42;
  std::vector<Nsst> catalog_seed;
  std::string price_table_csv;  // CSV text of the instance price table

  static Config defaults();

  // Reads a JSON config. Sections given as strings are resolved as paths relative to the
  // file: "topology", "latency_table", "catalog_seed" (JSON) and "price_table" (CSV).
  static Config load(const std::filesystem::path& path);
  static Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::string digest() const;
};

// Writes the defaults as the split file set shipped under data/.
void write_default_config_files(const std::filesystem::path& dir);

// NASP_CONFIG overrides `fallback` when set.
std::optional<std::filesystem::path> config_path_from_env(std::optional<std::filesystem::path> fallback);

}  // namespace nsaas
