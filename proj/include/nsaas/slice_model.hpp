#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsaas/types.hpp"

namespace nsaas {

using Json = nlohmann::json;

inline constexpr std::uint32_t kSdLimit = 1u << 24;

struct SNssai {
  std::uint8_t sst = 0;
  std::uint32_t sd = 0;  // 24-bit differentiator

  auto operator<=>(const SNssai&) const = default;
  std::string str() const;  // "sst-sdhex", e.g. "2-000001"
};

void to_json(Json& j, const SNssai& s);
void from_json(const Json& j, SNssai& s);

// ---------------------------------------------------------------------------
// Tenant request, in the shape of the northbound JSON document.

struct Ssq {
  std::optional<double> packet_delay_budget_s;
  std::optional<double> packet_error_rate;
  std::optional<double> max_data_burst_volume_mb;
};

struct SliceAttributes {
  std::optional<double> availability;  // fraction in [0, 1]
  std::optional<std::string> data_network;
  std::optional<Ssq> ssq;
  std::optional<double> ue_density;  // devices per km^2
  std::optional<bool> non_3gpp_access;
};

struct NfRequest {
  std::string name;
  std::optional<std::string> type;
  std::optional<int> replicas;

  bool operator==(const NfRequest&) const = default;
};

struct ResourceRequest {
  std::vector<NfRequest> core;
  std::vector<NfRequest> ran;
  std::vector<std::string> tn_routes;

  bool operator==(const ResourceRequest&) const = default;
};

struct SliceRequest {
  std::string name;
  std::string tenant = "default";
  NstType nst_type = NstType::kEMBB;
  std::optional<SliceAttributes> attributes;
  std::optional<ResourceRequest> resources;

  // Parses the northbound document; throws Error(kSchema) with a JSON-pointer field path.
  static SliceRequest from_json(const Json& j);
  Json to_json() const;

  // Enforces value-range invariants; throws Error(kSchema) naming the offending field.
  void validate() const;

  // Idempotency key: digest of the canonical serialization.
  std::string digest() const;
};

// ---------------------------------------------------------------------------
// Canonical, unit-normalized requirements (ms, MB, percent).

struct NormalizedRequirements {
  std::string request_name;
  std::string tenant;
  NstType nst_type = NstType::kEMBB;

  double delay_budget_ms = 0;
  double error_rate = 0;
  double burst_volume_mb = 0;
  double availability_pct = 0;
  double ue_density_per_km2 = 0;
  std::string data_network;
  bool non_3gpp_access = false;
  std::optional<ResourceRequest> explicit_nf_overrides;

  // Attribute keys filled from scenario defaults rather than supplied by the tenant.
  std::set<std::string> defaulted;

  Json to_json() const;
};

// Attribute keys used by `defaulted` and by SLA targets.
namespace attr {
inline constexpr const char* kAvailability = "availability";
inline constexpr const char* kDataNetwork = "data_network";
inline constexpr const char* kDelayBudget = "packet_delay_budget";
inline constexpr const char* kErrorRate = "packet_error_rate";
inline constexpr const char* kBurstVolume = "max_data_burst_volume";
inline constexpr const char* kUeDensity = "ue_density";
}  // namespace attr

enum class Direction { kAtMost, kAtLeast };

struct SlaTarget {
  std::string attribute;
  double target = 0;
  Direction direction = Direction::kAtMost;
  std::string source_request;
  std::string version_tag;

  bool operator==(const SlaTarget&) const = default;
};

void to_json(Json& j, const SlaTarget& t);
void from_json(const Json& j, SlaTarget& t);

// ---------------------------------------------------------------------------
// Design-time templates.

struct NfProfile {
  std::string name;  // role: amf, smf, upf, gnb, n3iwf, udr, ...
  int replicas = 1;
  double cpu_request = 0;  // vCPU
  double cpu_limit = 0;
  double ram_request_mb = 0;
  double ram_limit_mb = 0;
  double cpu_usage = 0;  // steady-state usage per replica
  double ram_usage_mb = 0;
  std::string image;

  bool operator==(const NfProfile&) const = default;
};

void to_json(Json& j, const NfProfile& p);
void from_json(const Json& j, NfProfile& p);

struct Nsst {
  std::string id;
  Domain domain = Domain::kCN;
  int version = 0;  // assigned by the catalog
  std::vector<Scenario> scenarios;
  // Exposed variables with defaults: min_delay_budget_ms, max_ue_density, sharing_policy,
  // placement, vlan, route_policy, priority.
  Json variables = Json::object();
  std::vector<NfProfile> nfs;               // dedicated workloads
  std::vector<std::string> shared_refs;     // platform NFs this subnet binds to
  std::vector<std::string> artifacts;       // manifest-bundle ids

  double footprint() const;  // vCPU + GB of requested resources
  bool reuses_shared() const { return !shared_refs.empty(); }
  bool serves(Scenario s) const;

  Json to_json() const;  // excludes `version`; the catalog owns it
  static Nsst from_json(const Json& j);
};

struct NsstRef {
  std::string id;
  int version = 0;

  bool operator==(const NsstRef&) const = default;
};

// Concrete per-domain descriptors produced by resource translation.
struct NfDescriptor {
  NfProfile profile;
  std::string site;
  bool operator==(const NfDescriptor&) const = default;
};

struct DomainDescriptor {
  NsstRef nsst;
  std::vector<NfDescriptor> nfs;
  std::vector<std::string> shared_refs;
  bool operator==(const DomainDescriptor&) const = default;
};

struct TransportDescriptor {
  NsstRef nsst;
  int vlan = 0;
  std::string route_policy;  // "shortest" | "resilient"
  int priority = 0;
  std::string src;
  std::string dst;
  std::vector<std::string> routes;
  bool operator==(const TransportDescriptor&) const = default;
};

struct ResourceDescriptors {
  Scenario scenario = Scenario::kSharedEMBB;
  std::string placement;  // edge | metro | central
  DomainDescriptor cn;
  DomainDescriptor ran;
  TransportDescriptor tn;

  Json to_json() const;
  static ResourceDescriptors from_json(const Json& j);
};

struct Nst {
  std::string id;
  int version = 0;
  Scenario scenario = Scenario::kSharedEMBB;
  std::map<Domain, NsstRef> subnets;
  Json bindings = Json::object();
  ResourceDescriptors descriptors;

  Json to_json() const;  // canonical document (version excluded)
  static Nst from_json(const Json& j);
};

// ---------------------------------------------------------------------------
// Runtime instances.

struct Nssi {
  Domain domain = Domain::kCN;
  NssiState state = NssiState::kPending;
  std::vector<std::string> resource_ids;
  std::map<std::string, std::string> endpoints;

  Json to_json() const;
  static Nssi from_json(const Json& j);
};

struct Nsi {
  std::string id;
  SNssai snssai;
  std::string tenant;
  Scenario scenario = Scenario::kSharedEMBB;
  NsiState state = NsiState::kRequested;
  NsstRef nst;
  std::vector<Nssi> nssis;
  std::vector<SlaTarget> sla_targets;
  std::string request_digest;
  int vlan = 0;
  double created_at = 0;
  std::optional<double> activated_at;

  Nssi* nssi(Domain d);
  const Nssi* nssi(Domain d) const;

  Json to_json() const;
  static Nsi from_json(const Json& j);
};

// Legal lifecycle transitions; Degraded is reachable from any in-progress state.
bool is_legal_transition(NsiState from, NsiState to);

// ---------------------------------------------------------------------------
// Scenario classification.

struct ClassificationRules {
  double urllc_max_delay_ms = 10.0;         // PDB strictly below -> URLLC
  double mmtc_min_ue_density = 50000.0;     // density strictly above ...
  double mmtc_min_delay_ms = 100.0;         // ... with PDB at or above -> mMTC
};

void to_json(Json& j, const ClassificationRules& r);
void from_json(const Json& j, ClassificationRules& r);

// Explicit nst_type wins; custom requests go through the rule table. Throws
// Error(kUnclassifiable) when more than one specific rule fires.
Scenario classify_slice_type(const SliceRequest& req, const ClassificationRules& rules = {});

}  // namespace nsaas
