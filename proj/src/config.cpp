#include "nsaas/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

using nlohmann::json;

SubstepTiming ScenarioTiming::at(const std::string& id) const {
  auto it = substeps.find(id);
  return it == substeps.end() ? SubstepTiming{} : it->second;
}

bool VlanPolicy::legal(int vlan) const {
  for (const auto& [_, v] : preferred) {
    if (v == vlan) return true;
  }
  return vlan >= pool_first && vlan <= pool_last;
}

// ---------------------------------------------------------------------------
// Defaults

namespace {

SubstepTiming control(double s) { return {0.0, s, 0.0}; }
SubstepTiming pull(double s) { return {s, 0.0, 0.0}; }
SubstepTiming workload(double pull_s, double apply_s, double probe_s) { return {pull_s, apply_s, probe_s}; }

NfProfile nf(std::string name, int replicas, double cpu_req, double cpu_lim, double ram_req, double ram_lim,
             double cpu_use, double ram_use, std::string image) {
  NfProfile p;
  p.name = std::move(name);
  p.replicas = replicas;
  p.cpu_request = cpu_req;
  p.cpu_limit = cpu_lim;
  p.ram_request_mb = ram_req;
  p.ram_limit_mb = ram_lim;
  p.cpu_usage = cpu_use;
  p.ram_usage_mb = ram_use;
  p.image = std::move(image);
  return p;
}

NfProfile amf_profile() { return nf("amf", 1, 0.20, 0.40, 120, 256, 0.20, 120, "free5gc/amf:v3.3.0"); }
NfProfile smf_profile() { return nf("smf", 1, 0.15, 0.30, 100, 200, 0.15, 100, "free5gc/smf:v3.3.0"); }
NfProfile upf_profile() { return nf("upf", 1, 0.30, 0.60, 180, 360, 0.30, 180, "free5gc/upf:v3.3.0"); }
NfProfile gnb_profile(int replicas) {
  return nf("gnb", replicas, 0.15, 0.30, 100, 200, 0.15, 100, "my5g/ueransim-gnb:v1.0");
}

std::map<Scenario, ScenarioTiming> default_timings() {
  std::map<Scenario, ScenarioTiming> t;

  // Radio access steps shared by the gNB-based scenarios.
  const std::map<std::string, SubstepTiming> ran_gnb{
      {"3.1", control(0.8)}, {"3.2", workload(2.0, 1.0, 2.2)}, {"3.3", control(2.0)}, {"3.4", control(1.0)}};
  const std::map<std::string, SubstepTiming> closing{{"5.1", control(3.8)}, {"6.1", control(3.0)}};

  auto& urllc = t[Scenario::kURLLC];
  urllc.substeps = {{"1.1", control(0.4)},           {"1.2", pull(13.6)},
                    {"2.1", control(1.0)},           {"2.2", workload(0.0, 1.2, 1.8)},
                    {"2.3", workload(0.0, 1.0, 1.6)}, {"2.4", workload(0.0, 1.0, 1.6)},
                    {"2.5", control(1.8)},           {"2.6", control(1.8)},
                    {"2.7", control(2.4)},           {"2.8", control(1.8)},
                    {"2.9", control(2.2)},           {"2.10", control(2.0)}};
  urllc.substeps.insert(ran_gnb.begin(), ran_gnb.end());
  urllc.substeps.insert(closing.begin(), closing.end());
  urllc.tn_rule = control(0.25);

  auto& mmtc = t[Scenario::kMMTC];
  mmtc.substeps = {{"1.1", control(0.4)},           {"1.2", pull(6.0)},
                   {"2.1", control(1.0)},           {"2.4", workload(0.0, 1.0, 1.6)},
                   {"2.5", control(1.8)},           {"2.6", control(1.8)},
                   {"2.7", workload(0.0, 1.4, 2.2)}, {"2.8", control(1.8)},
                   {"2.9", control(2.2)},           {"2.10", control(2.0)}};
  mmtc.substeps.insert(ran_gnb.begin(), ran_gnb.end());
  mmtc.substeps.insert(closing.begin(), closing.end());
  mmtc.tn_rule = control(0.25);

  auto& shared = t[Scenario::kSharedEMBB];
  shared.substeps = {{"1.1", control(0.4)}, {"1.2", control(2.8)}};
  shared.substeps.insert(ran_gnb.begin(), ran_gnb.end());
  shared.substeps.insert(closing.begin(), closing.end());
  shared.tn_rule = control(0.25);

  auto& n3 = t[Scenario::kNon3gpp];
  n3.substeps = {{"1.1", control(0.4)}, {"1.2", pull(9.0)},  {"2.1", control(1.0)},
                 {"2.4", workload(0.0, 1.0, 1.6)},            {"2.5", control(1.8)},
                 {"2.6", control(1.8)}, {"2.7", control(2.4)}, {"2.8", control(1.8)},
                 {"2.9", control(2.2)}, {"2.10", control(2.0)}, {"3.1", control(0.8)},
                 {"3.2", workload(2.4, 2.0, 4.0)},             {"3.3", control(6.0)},
                 {"3.4", control(1.0)}};
  n3.substeps.insert(closing.begin(), closing.end());
  n3.tn_rule = control(0.25);
  return t;
}

std::vector<Nsst> default_catalog_seed() {
  auto mk = [](std::string id, Domain d, Scenario s, json vars, std::vector<NfProfile> nfs,
               std::vector<std::string> shared, std::string artifact) {
    Nsst n;
    n.id = std::move(id);
    n.domain = d;
    n.scenarios = {s};
    n.variables = std::move(vars);
    n.nfs = std::move(nfs);
    n.shared_refs = std::move(shared);
    n.artifacts = {std::move(artifact)};
    return n;
  };
  NfProfile upf_light = nf("upf", 1, 0.10, 0.20, 64, 128, 0.10, 64, "free5gc/upf-light:v3.3.0");
  NfProfile udr_scale = nf("udr", 1, 0.05, 0.10, 128, 256, 0.05, 128, "free5gc/udr:v3.3.0");
  NfProfile n3iwf = nf("n3iwf", 1, 0.20, 0.40, 150, 300, 0.20, 150, "free5gc/n3iwf:v3.3.0");

  return {
      mk("cn-urllc-dedicated", Domain::kCN, Scenario::kURLLC,
         {{"min_delay_budget_ms", 0.1}, {"max_ue_density", 100000}, {"sharing_policy", "dedicated"},
          {"placement", "edge"}},
         {amf_profile(), smf_profile(), upf_profile()}, {"ausf", "udr", "nrf", "pcf"}, "helm:cn-urllc-dedicated"),
      mk("cn-mmtc-light-upf", Domain::kCN, Scenario::kMMTC,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 1000000}, {"sharing_policy", "shared-control-plane"},
          {"placement", "edge"}},
         {upf_light, udr_scale}, {"amf", "smf", "nrf", "ausf", "pcf"}, "helm:cn-mmtc-light-upf"),
      mk("cn-embb-reuse", Domain::kCN, Scenario::kSharedEMBB,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 200000}, {"sharing_policy", "reuse"},
          {"placement", "central"}},
         {}, {"amf", "smf", "upf", "nrf", "ausf", "udr", "pcf"}, "helm:cn-embb-reuse"),
      mk("cn-non3gpp-n3iwf", Domain::kCN, Scenario::kNon3gpp,
         {{"min_delay_budget_ms", 20.0}, {"max_ue_density", 100000}, {"sharing_policy", "shared-control-plane"},
          {"placement", "metro"}},
         {upf_profile()}, {"amf", "smf", "nrf", "ausf", "udr", "pcf"}, "helm:cn-non3gpp"),

      mk("ran-urllc-edge-cudu", Domain::kRAN, Scenario::kURLLC,
         {{"min_delay_budget_ms", 0.1}, {"max_ue_density", 100000}, {"phy_timers", "low"}}, {gnb_profile(2)}, {},
         "helm:ran-urllc-cudu"),
      mk("ran-mmtc-ra-backoff", Domain::kRAN, Scenario::kMMTC,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 1000000}, {"ra_backoff", "extended"}}, {gnb_profile(1)},
         {}, "helm:ran-mmtc"),
      mk("ran-embb-std", Domain::kRAN, Scenario::kSharedEMBB,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 200000}, {"scheduler", "default"}}, {gnb_profile(1)}, {},
         "helm:ran-embb"),
      mk("ran-non3gpp-offload", Domain::kRAN, Scenario::kNon3gpp,
         {{"min_delay_budget_ms", 20.0}, {"max_ue_density", 100000}, {"access", "wifi-offload"}}, {n3iwf}, {},
         "helm:ran-non3gpp"),

      mk("tn-urllc-short", Domain::kTN, Scenario::kURLLC,
         {{"min_delay_budget_ms", 0.1}, {"max_ue_density", 1000000}, {"vlan", 101}, {"route_policy", "shortest"},
          {"priority", 40000}},
         {}, {}, "onos:path-intent-short"),
      mk("tn-mmtc-long", Domain::kTN, Scenario::kMMTC,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 1000000}, {"vlan", 102}, {"route_policy", "resilient"},
          {"priority", 30000}},
         {}, {}, "onos:path-intent-long"),
      mk("tn-embb-long", Domain::kTN, Scenario::kSharedEMBB,
         {{"min_delay_budget_ms", 10.0}, {"max_ue_density", 1000000}, {"vlan", 102}, {"route_policy", "resilient"},
          {"priority", 30000}},
         {}, {}, "onos:path-intent-long"),
      mk("tn-non3gpp-tunnel", Domain::kTN, Scenario::kNon3gpp,
         {{"min_delay_budget_ms", 20.0}, {"max_ue_density", 1000000}, {"vlan", 104}, {"route_policy", "shortest"},
          {"priority", 35000}, {"tunnel_endpoint", true}},
         {}, {}, "onos:path-intent-tunnel"),
  };
}

constexpr const char* kDefaultPriceTable =
    "type,size,vcpu,ram_gb,storage_gb,price_month\n"
    "Edge,medium,2,4,200,\"$70,88\"\n"
    "Edge,xlarge,4,16,200,\"$193,52\"\n"
    "Edge,2xlarge,8,64,200,\"$526,40\"\n"
    "Metropolitan,medium,2,4,200,\"$67,96\"\n"
    "Metropolitan,xlarge,4,16,200,\"$117,60\"\n"
    "Metropolitan,2xlarge,8,64,200,\"$181,84\"\n"
    "Central,medium,2,4,200,\"$46,37\"\n"
    "Central,xlarge,4,16,200,\"$76,74\"\n"
    "Central,2xlarge,8,64,200,\"$137,47\"\n";

NormalizedRequirements defaults_for(double delay_ms, double per, double burst, double avail, double density) {
  NormalizedRequirements n;
  n.delay_budget_ms = delay_ms;
  n.error_rate = per;
  n.burst_volume_mb = burst;
  n.availability_pct = avail;
  n.ue_density_per_km2 = density;
  n.data_network = "internet";
  return n;
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.scenario_defaults = {
      {Scenario::kURLLC, defaults_for(5.0, 1e-5, 0.001, 99.999, 10000)},
      {Scenario::kMMTC, defaults_for(500.0, 1e-3, 0.0001, 99.9, 100000)},
      {Scenario::kSharedEMBB, defaults_for(100.0, 1e-6, 0.01, 99.9, 1000)},
      {Scenario::kNon3gpp, defaults_for(100.0, 1e-6, 0.01, 99.9, 1000)},
  };

  auto& topo = c.topology;
  topo.switches = {"s1", "s2", "s3", "s4", "s5", "s6"};
  topo.hosts = {"ran-gw", "cn-gw"};
  topo.links = {{"ran-gw", "s1", 0.2}, {"s1", "s2", 0.2}, {"s2", "s3", 0.2}, {"s3", "s4", 0.2},
                {"s4", "cn-gw", 0.2},  {"s2", "s5", 0.3}, {"s5", "s6", 0.3}, {"s6", "s3", 0.3}};
  topo.detour = {"s5", "s6"};
  topo.sites = {{"edge", {16.0, 65536.0}}, {"metro", {16.0, 65536.0}}, {"central", {32.0, 131072.0}}};

  c.vlans.preferred = {{Scenario::kURLLC, 101}, {Scenario::kMMTC, 102}, {Scenario::kSharedEMBB, 102},
                       {Scenario::kNon3gpp, 104}};
  c.vlans.exclusive = {{Scenario::kURLLC, true}, {Scenario::kMMTC, false}, {Scenario::kSharedEMBB, false},
                       {Scenario::kNon3gpp, true}};

  c.latency.scenarios = default_timings();
  c.latency.reconfig.replay = {{"2.3", control(1.5)}, {"2.4", control(1.5)}, {"2.5", control(1.0)},
                               {"2.6", control(1.0)}, {"2.7", control(1.0)}, {"2.8", control(1.0)},
                               {"2.9", control(1.5)}, {"2.10", control(1.5)}};
  // Higher replica count with tightened CPU quota: immutable fields, so the pod is recreated.
  c.latency.reconfig.new_amf_profile = nf("amf", 2, 0.20, 0.30, 120, 256, 0.20, 120, "free5gc/amf:v3.3.0");

  for (const char* name : {"amf", "smf", "upf", "nrf", "ausf", "udr", "udm", "pcf", "nssf"}) {
    c.shared_platform.push_back(nf(name, 1, 0.10, 0.50, 128, 512, 0.005, 100, std::string("free5gc/") + name));
  }
  c.shared_platform.push_back(nf("platform", 1, 1.0, 4.0, 14000, 16000, 0.005, 13700, "platform/control"));

  c.attach.profiles = {
      {Scenario::kURLLC, AttachProfile{2.4, 10, 18.0, 0.0, 0.0, 0.0}},
      {Scenario::kMMTC, AttachProfile{2.4, 10, 206.69, 0.0, 100.0, 0.0}},
      {Scenario::kSharedEMBB, AttachProfile{12.0, 10, 480.0, 2.0, 0.0, 0.0}},
      {Scenario::kNon3gpp, AttachProfile{12.0, 10, 480.0, 2.0, 0.0, 1250.0}},
  };

  c.catalog_seed = default_catalog_seed();
  c.price_table_csv = kDefaultPriceTable;
  return c;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json timing_json(const SubstepTiming& t) {
  json j = json::object();
  if (t.pull_s != 0) j["pull_s"] = t.pull_s;
  if (t.apply_s != 0) j["apply_s"] = t.apply_s;
  if (t.probe_s != 0) j["probe_s"] = t.probe_s;
  return j;
}

SubstepTiming timing_from(const json& j) {
  return {j.value("pull_s", 0.0), j.value("apply_s", 0.0), j.value("probe_s", 0.0)};
}

json timing_map_json(const std::map<std::string, SubstepTiming>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = timing_json(v);
  return j;
}

std::map<std::string, SubstepTiming> timing_map_from(const json& j) {
  std::map<std::string, SubstepTiming> m;
  for (const auto& [k, v] : j.items()) m[k] = timing_from(v);
  return m;
}

json latency_json(const LatencyTable& t) {
  json sc = json::object();
  for (const auto& [s, st] : t.scenarios) {
    sc[std::string(to_string(s))] = {{"substeps", timing_map_json(st.substeps)}, {"tn_rule", timing_json(st.tn_rule)}};
  }
  return {{"scenarios", sc},
          {"reconfiguration",
           {{"amf_delete_s", t.reconfig.amf_delete_s},
            {"amf_create", timing_json(t.reconfig.amf_create)},
            {"replay", timing_map_json(t.reconfig.replay)},
            {"new_amf_profile", t.reconfig.new_amf_profile}}},
          {"bare_restart",
           {{"drain_s", t.bare_restart.drain_s},
            {"restart", timing_json(t.bare_restart.restart)},
            {"ng_resetup_s", t.bare_restart.ng_resetup_s}}},
          {"onboard_processing_s", t.onboard_processing_s},
          {"jitter", t.jitter}};
}

LatencyTable latency_from(const json& j) {
  LatencyTable t;
  for (const auto& [k, v] : j.at("scenarios").items()) {
    ScenarioTiming st;
    st.substeps = timing_map_from(v.at("substeps"));
    st.tn_rule = timing_from(v.at("tn_rule"));
    t.scenarios[parse_scenario(k)] = std::move(st);
  }
  const auto& r = j.at("reconfiguration");
  t.reconfig.amf_delete_s = r.at("amf_delete_s").get<double>();
  t.reconfig.amf_create = timing_from(r.at("amf_create"));
  t.reconfig.replay = timing_map_from(r.at("replay"));
  t.reconfig.new_amf_profile = r.at("new_amf_profile").get<NfProfile>();
  const auto& b = j.at("bare_restart");
  t.bare_restart.drain_s = b.at("drain_s").get<double>();
  t.bare_restart.restart = timing_from(b.at("restart"));
  t.bare_restart.ng_resetup_s = b.at("ng_resetup_s").get<double>();
  t.onboard_processing_s = j.value("onboard_processing_s", 0.5);
  t.jitter = j.value("jitter", 0.0);
  return t;
}

json topology_json(const TopologyConfig& t) {
  json links = json::array();
  for (const auto& l : t.links) links.push_back({{"a", l.a}, {"b", l.b}, {"latency_ms", l.latency_ms}});
  json sites = json::object();
  for (const auto& [k, v] : t.sites) sites[k] = {{"vcpu", v.vcpu}, {"ram_mb", v.ram_mb}};
  return {{"switches", t.switches}, {"hosts", t.hosts},           {"links", links},
          {"detour", t.detour},     {"ran_endpoint", t.ran_endpoint}, {"cn_endpoint", t.cn_endpoint},
          {"sites", sites}};
}

TopologyConfig topology_from(const json& j) {
  TopologyConfig t;
  t.switches = j.at("switches").get<std::vector<std::string>>();
  t.hosts = j.at("hosts").get<std::vector<std::string>>();
  for (const auto& l : j.at("links")) {
    t.links.push_back({l.at("a").get<std::string>(), l.at("b").get<std::string>(), l.value("latency_ms", 0.2)});
  }
  t.detour = j.value("detour", std::vector<std::string>{});
  t.ran_endpoint = j.value("ran_endpoint", std::string("ran-gw"));
  t.cn_endpoint = j.value("cn_endpoint", std::string("cn-gw"));
  for (const auto& [k, v] : j.at("sites").items()) {
    t.sites[k] = {v.at("vcpu").get<double>(), v.at("ram_mb").get<double>()};
  }
  return t;
}

template <typename V, typename F>
json scenario_map_json(const std::map<Scenario, V>& m, F&& f) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::string(to_string(k))] = f(v);
  return j;
}

template <typename V, typename F>
std::map<Scenario, V> scenario_map_from(const json& j, F&& f) {
  std::map<Scenario, V> m;
  for (const auto& [k, v] : j.items()) m[parse_scenario(k)] = f(v);
  return m;
}

json attach_profile_json(const AttachProfile& p) {
  return {{"cp_rtt_ms", p.cp_rtt_ms},         {"round_trips", p.round_trips},
          {"processing_ms", p.processing_ms}, {"queue_ms_per_ue", p.queue_ms_per_ue},
          {"backoff_mean_ms", p.backoff_mean_ms}, {"tunnel_ms", p.tunnel_ms}};
}

AttachProfile attach_profile_from(const json& j) {
  AttachProfile p;
  p.cp_rtt_ms = j.value("cp_rtt_ms", 0.0);
  p.round_trips = j.value("round_trips", 10);
  p.processing_ms = j.value("processing_ms", 0.0);
  p.queue_ms_per_ue = j.value("queue_ms_per_ue", 0.0);
  p.backoff_mean_ms = j.value("backoff_mean_ms", 0.0);
  p.tunnel_ms = j.value("tunnel_ms", 0.0);
  if (p.cp_rtt_ms < 0 || p.processing_ms < 0 || p.queue_ms_per_ue < 0 || p.backoff_mean_ms < 0 || p.tunnel_ms < 0) {
    throw Error(Errc::kConfig, "attach model components must be non-negative");
  }
  return p;
}

json defaults_json(const NormalizedRequirements& n) {
  return {{"delay_budget_ms", n.delay_budget_ms},     {"error_rate", n.error_rate},
          {"burst_volume_mb", n.burst_volume_mb},     {"availability_pct", n.availability_pct},
          {"ue_density_per_km2", n.ue_density_per_km2}, {"data_network", n.data_network}};
}

NormalizedRequirements defaults_from(const json& j) {
  return defaults_for(j.at("delay_budget_ms").get<double>(), j.at("error_rate").get<double>(),
                      j.at("burst_volume_mb").get<double>(), j.at("availability_pct").get<double>(),
                      j.at("ue_density_per_km2").get<double>());
}

json seed_json(const std::vector<Nsst>& seed) {
  json arr = json::array();
  for (const auto& n : seed) arr.push_back(n.to_json());
  return arr;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kConfig, "cannot read " + p.string(), {{"path", p.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_file(const std::filesystem::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw Error(Errc::kConfig, p.string() + ": " + e.what(), {{"path", p.string()}});
  }
}

}  // namespace

json Config::to_json() const {
  return {
      {"classification", classification},
      {"scenario_defaults", scenario_map_json(scenario_defaults, defaults_json)},
      {"topology", topology_json(topology)},
      {"vlans",
       {{"preferred", scenario_map_json(vlans.preferred, [](int v) { return json(v); })},
        {"exclusive", scenario_map_json(vlans.exclusive, [](bool v) { return json(v); })},
        {"pool_first", vlans.pool_first},
        {"pool_last", vlans.pool_last}}},
      {"quotas", {{"max_vcpu_per_slice", quotas.max_vcpu_per_slice}, {"max_ram_mb_per_slice", quotas.max_ram_mb_per_slice}}},
      {"latency_table", latency_json(latency)},
      {"shared_platform", shared_platform},
      {"shared_site", shared_site},
      {"attach",
       {{"profiles", scenario_map_json(attach.profiles, attach_profile_json)},
        {"jitter", attach.jitter},
        {"recovery_penalty_ms", attach.recovery_penalty_ms},
        {"recovery_decay_per_s", attach.recovery_decay_per_s},
        {"registration_timeout_ms", attach.registration_timeout_ms},
        {"drain_peak_ms", attach.drain_peak_ms}}},
      {"autoscaler",
       {{"scale_up", autoscaler.scale_up},
        {"scale_down", autoscaler.scale_down},
        {"min_replicas", autoscaler.min_replicas},
        {"max_replicas", autoscaler.max_replicas},
        {"window", autoscaler.window}}},
      {"telemetry",
       {{"sampling_period_s", telemetry.sampling_period_s},
        {"usage_jitter", telemetry.usage_jitter},
        {"outlier_sigma", telemetry.outlier_sigma}}},
      {"admission_cap", admission_cap},
      {"snssai_pool_size", snssai_pool_size},
      {"seed", seed},
      {"catalog_seed", seed_json(catalog_seed)},
      {"price_table", price_table_csv},
  };
}

Config Config::from_json(const json& j) {
  Config c = Config::defaults();
  try {
    if (j.contains("classification")) c.classification = j.at("classification").get<ClassificationRules>();
    if (j.contains("scenario_defaults")) {
      c.scenario_defaults = scenario_map_from<NormalizedRequirements>(j.at("scenario_defaults"), defaults_from);
    }
    if (j.contains("topology")) c.topology = topology_from(j.at("topology"));
    if (j.contains("vlans")) {
      const auto& v = j.at("vlans");
      c.vlans.preferred = scenario_map_from<int>(v.at("preferred"), [](const json& x) { return x.get<int>(); });
      c.vlans.exclusive = scenario_map_from<bool>(v.at("exclusive"), [](const json& x) { return x.get<bool>(); });
      c.vlans.pool_first = v.at("pool_first").get<int>();
      c.vlans.pool_last = v.at("pool_last").get<int>();
    }
    if (j.contains("quotas")) {
      c.quotas.max_vcpu_per_slice = j.at("quotas").at("max_vcpu_per_slice").get<double>();
      c.quotas.max_ram_mb_per_slice = j.at("quotas").at("max_ram_mb_per_slice").get<double>();
    }
    if (j.contains("latency_table")) c.latency = latency_from(j.at("latency_table"));
    if (j.contains("shared_platform")) c.shared_platform = j.at("shared_platform").get<std::vector<NfProfile>>();
    c.shared_site = j.value("shared_site", c.shared_site);
    if (j.contains("attach")) {
      const auto& a = j.at("attach");
      c.attach.profiles = scenario_map_from<AttachProfile>(a.at("profiles"), attach_profile_from);
      c.attach.jitter = a.value("jitter", c.attach.jitter);
      c.attach.recovery_penalty_ms = a.value("recovery_penalty_ms", c.attach.recovery_penalty_ms);
      c.attach.recovery_decay_per_s = a.value("recovery_decay_per_s", c.attach.recovery_decay_per_s);
      c.attach.registration_timeout_ms = a.value("registration_timeout_ms", c.attach.registration_timeout_ms);
      c.attach.drain_peak_ms = a.value("drain_peak_ms", c.attach.drain_peak_ms);
    }
    if (j.contains("autoscaler")) {
      const auto& a = j.at("autoscaler");
      c.autoscaler.scale_up = a.value("scale_up", c.autoscaler.scale_up);
      c.autoscaler.scale_down = a.value("scale_down", c.autoscaler.scale_down);
      c.autoscaler.min_replicas = a.value("min_replicas", c.autoscaler.min_replicas);
      c.autoscaler.max_replicas = a.value("max_replicas", c.autoscaler.max_replicas);
      c.autoscaler.window = a.value("window", c.autoscaler.window);
    }
    if (j.contains("telemetry")) {
      const auto& t = j.at("telemetry");
      c.telemetry.sampling_period_s = t.value("sampling_period_s", c.telemetry.sampling_period_s);
      c.telemetry.usage_jitter = t.value("usage_jitter", c.telemetry.usage_jitter);
      c.telemetry.outlier_sigma = t.value("outlier_sigma", c.telemetry.outlier_sigma);
    }
    c.admission_cap = j.value("admission_cap", c.admission_cap);
    c.snssai_pool_size = j.value("snssai_pool_size", c.snssai_pool_size);
    c.seed = j.value("seed", c.seed);
    if (j.contains("catalog_seed")) {
      c.catalog_seed.clear();
      for (const auto& n : j.at("catalog_seed")) c.catalog_seed.push_back(Nsst::from_json(n));
    }
    c.price_table_csv = j.value("price_table", c.price_table_csv);
  } catch (const json::exception& e) {
    throw Error(Errc::kConfig, std::string("invalid config: ") + e.what());
  }
  if (c.autoscaler.window <= 0 || c.autoscaler.min_replicas < 1) {
    throw Error(Errc::kConfig, "autoscaler window and min_replicas must be positive");
  }
  if (c.telemetry.sampling_period_s <= 0) throw Error(Errc::kConfig, "sampling period must be positive");
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  json j = parse_file(path);
  const auto base = path.parent_path();
  for (const char* key : {"topology", "latency_table", "catalog_seed"}) {
    if (j.contains(key) && j.at(key).is_string()) j[key] = parse_file(base / j.at(key).get<std::string>());
  }
  if (j.contains("price_table_file")) {
    j["price_table"] = read_file(base / j.at("price_table_file").get<std::string>());
    j.erase("price_table_file");
  }
  return from_json(j);
}

std::string Config::digest() const { return digest_of(to_json()); }

void write_default_config_files(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Config c = Config::defaults();
  json j = c.to_json();
  auto dump = [&](const char* file, const json& content) {
    std::ofstream(dir / file) << content.dump(2) << "\n";
  };
  dump("topology.json", j["topology"]);
  dump("latency_table.json", j["latency_table"]);
  dump("catalog_seed.json", j["catalog_seed"]);
  std::ofstream(dir / "price_table.csv") << c.price_table_csv;
  j["topology"] = "topology.json";
  j["latency_table"] = "latency_table.json";
  j["catalog_seed"] = "catalog_seed.json";
  j.erase("price_table");
  j["price_table_file"] = "price_table.csv";
  dump("config.json", j);
}

std::optional<std::filesystem::path> config_path_from_env(std::optional<std::filesystem::path> fallback) {
  if (const char* env = std::getenv("NASP_CONFIG"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return fallback;
}

}  // namespace nsaas
