#include "nsaas/engine.hpp"

#include <algorithm>
#include <cstdio>

#include "nsaas/error.hpp"

namespace nsaas {

namespace {

std::unique_ptr<DataStore> make_store(const std::optional<std::filesystem::path>& path) {
  if (path) return std::make_unique<DataStore>(*path);
  return std::make_unique<DataStore>();
}

}  // namespace

Engine::Engine(Config config, std::optional<std::filesystem::path> store_log)
    : config_(std::move(config)),
      store_(make_store(store_log)),
      platform_(clock_, config_, &log_),
      sdn_(config_.topology, &log_),
      onboarder_(config_, store_->catalog()),
      orch_(config_, *store_, clock_, platform_, sdn_, log_) {
  for (const auto& nsst : config_.catalog_seed) store_->catalog().register_nsst(nsst, 0);
  platform_.bootstrap_shared();
  for (int i = 1; i <= 3; ++i) {
    char imsi[32];
    std::snprintf(imsi, sizeof(imsi), "imsi-00101%010d", i);
    platform_.udr_put(imsi, {{"supi", imsi}, {"k", "465B5CE8B199B49FAA5F0A2EE238A6BC"}, {"sqn", i}});
  }
}

bool Engine::is_known(const SliceRequest& req) const {
  std::lock_guard lock(mu_);
  const auto id = orch_.find_by_digest(req.digest());
  if (!id) return false;
  const auto nsi = orch_.get(*id);
  return nsi && nsi->state != NsiState::kTerminated;
}

Nsi Engine::submit(const SliceRequest& req) {
  std::lock_guard lock(mu_);
  if (const auto id = orch_.find_by_digest(req.digest())) {
    const auto nsi = orch_.get(*id);
    if (nsi && nsi->state != NsiState::kTerminated) {
      if (nsi->state == NsiState::kDeploying || nsi->state == NsiState::kRequested) {
        throw Error(Errc::kDuplicateInFlight, "an identical request is still deploying as " + *id, {{"nsi_id", *id}});
      }
      return *nsi;
    }
  }
  const auto onb = onboarder_.onboard(req, clock_.now());
  return orch_.create_nsi(onb);
}

std::string Engine::submit_async(const SliceRequest& req) {
  std::lock_guard lock(mu_);
  if (const auto id = orch_.find_by_digest(req.digest())) {
    const auto nsi = orch_.get(*id);
    if (nsi && nsi->state != NsiState::kTerminated) {
      if (nsi->state == NsiState::kDeploying || nsi->state == NsiState::kRequested) {
        throw Error(Errc::kDuplicateInFlight, "an identical request is still deploying as " + *id, {{"nsi_id", *id}});
      }
      return *id;
    }
  }
  const auto onb = onboarder_.onboard(req, clock_.now());
  const double start = std::max(clock_.now(), onboard_free_at_) + config_.latency.onboard_processing_s;
  onboard_free_at_ = start;
  return orch_.begin_create(onb, start);
}

void Engine::advance(double until) {
  std::lock_guard lock(mu_);
  clock_.advance(until);
}

void Engine::run_until_settled() {
  std::lock_guard lock(mu_);
  orch_.run_until_settled();
}

double Engine::now() const {
  std::lock_guard lock(mu_);
  return clock_.now();
}

std::optional<Nsi> Engine::get(const std::string& nsi_id) const {
  std::lock_guard lock(mu_);
  return orch_.get(nsi_id);
}

std::vector<Nsi> Engine::list() const {
  std::lock_guard lock(mu_);
  return orch_.list();
}

Nsi Engine::reconfigure(const std::string& nsi_id, std::optional<NfProfile> new_amf) {
  std::lock_guard lock(mu_);
  return orch_.modify_nsi(nsi_id, new_amf.value_or(config_.latency.reconfig.new_amf_profile));
}

void Engine::begin_reconfigure(const std::string& nsi_id, std::optional<NfProfile> new_amf) {
  std::lock_guard lock(mu_);
  orch_.begin_modify(nsi_id, new_amf.value_or(config_.latency.reconfig.new_amf_profile));
}

Nsi Engine::decommission(const std::string& nsi_id) {
  std::lock_guard lock(mu_);
  return orch_.decommission_nsi(nsi_id);
}

std::string Engine::inventory_digest() const {
  std::lock_guard lock(mu_);
  return store_->inventory().digest();
}

std::string Engine::event_log_jsonl() const {
  std::lock_guard lock(mu_);
  return log_.to_jsonl();
}

Json Engine::metrics() const {
  std::lock_guard lock(mu_);
  Json by_state = Json::object();
  for (const auto& nsi : orch_.list()) {
    auto& slot = by_state[std::string(to_string(nsi.state))];
    slot = slot.is_number() ? slot.get<int>() + 1 : 1;
  }
  Json deployments = Json::array();
  for (const auto& nsi : orch_.list()) {
    const auto* rep = orch_.report(nsi.id);
    if (!rep || rep->substeps.empty()) continue;
    deployments.push_back({{"nsi_id", nsi.id},
                           {"scenario", std::string(to_string(nsi.scenario))},
                           {"total_s", rep->total()},
                           {"substeps", rep->substeps.size()}});
  }
  const auto [vcpu, ram] = platform_.usage_at(clock_.now());
  return {{"virtual_time_s", clock_.now()},
          {"nsi_count", orch_.list().size()},
          {"nsi_by_state", by_state},
          {"deployments", deployments},
          {"usage", {{"vcpu", vcpu}, {"ram_mb", ram}}},
          {"catalog_entries", store_->catalog().size()},
          {"inventory_digest", store_->inventory().digest()},
          {"events", log_.events().size()}};
}

Json Engine::slice_json(const std::string& nsi_id) const {
  std::lock_guard lock(mu_);
  const auto nsi = orch_.get(nsi_id);
  if (!nsi) throw Error(Errc::kNotFound, "no slice " + nsi_id, {{"nsi_id", nsi_id}});
  Json j = nsi->to_json();
  if (const auto* rep = orch_.report(nsi_id)) j["deployment"] = rep->to_json();
  if (const auto* rc = orch_.reconfig(nsi_id)) j["reconfiguration"] = {{"outage_s", rc->outage_s()}};
  if (const auto f = orch_.failure(nsi_id)) j["failure"] = {{"substep", f->substep}, {"reason", f->reason}};
  return j;
}

std::vector<AvailabilitySample> Engine::availability(const std::string& nsi_id, double from, double to,
                                                     double period) const {
  std::lock_guard lock(mu_);
  if (!orch_.get(nsi_id)) throw Error(Errc::kNotFound, "no slice " + nsi_id, {{"nsi_id", nsi_id}});
  return track_availability(platform_, orch_.amf_workload(nsi_id), from, to, period);
}

SliceRequest default_request(Scenario s, const std::string& name) {
  SliceRequest req;
  req.name = name;
  switch (s) {
    case Scenario::kURLLC: req.nst_type = NstType::kURLLC; break;
    case Scenario::kMMTC: req.nst_type = NstType::kMMTC; break;
    case Scenario::kSharedEMBB: req.nst_type = NstType::kEMBB; break;
    case Scenario::kNon3gpp: req.nst_type = NstType::kNon3gpp; break;
  }
  return req;
}

Json listing_one_request() {
  return Json::parse(R"({
    "name": "Custom 5G Network Slice",
    "NST": {
      "type": "custom",
      "Slice Attributes": {
        "availability": 1,
        "Supported Data Network": "internet",
        "SSQ": {
          "Packet Delay Budget": 0.00012,
          "Packet Error Rate": 0.0000001,
          "Maximum Data Burts Volume": 0.001},
        "UE density": 10000},
      "resource_description": {
        "core": {"nfs": [{"name": "amf"}, {"name": "smf"}, {"name": "upf"}]},
        "ran": {"nfs": [{"name": "ueransim", "type": "gnb", "replicas": 2}]},
        "tn": {"routes": [{"name": "backhaul"}]}
      }}})");
}

}  // namespace nsaas
