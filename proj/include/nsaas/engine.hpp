#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nsaas/assurance.hpp"
#include "nsaas/catalog.hpp"
#include "nsaas/config.hpp"
#include "nsaas/infra_sim.hpp"
#include "nsaas/onboard.hpp"
#include "nsaas/orchestrator.hpp"

namespace nsaas {

// Wires catalog/inventory, onboarding, orchestration and the simulator together. Every public
// method takes the engine lock, so one engine can be driven from several threads.
class Engine {
 public:
  explicit Engine(Config config = Config::defaults(), std::optional<std::filesystem::path> store_log = std::nullopt);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Onboards and deploys, running virtual time until the NSI settles. A request identical to
  // a live NSI returns that NSI (DuplicateInFlight while it is still deploying).
  Nsi submit(const SliceRequest& req);
  Nsi submit_json(const Json& body) { return submit(SliceRequest::from_json(body)); }
  // True when `req` maps onto an NSI that already exists and is not terminated.
  bool is_known(const SliceRequest& req) const;

  // Onboards now; deployment starts once the serialized onboarding stage releases the request.
  std::string submit_async(const SliceRequest& req);

  void advance(double until);
  void run_until_settled();
  double now() const;

  std::optional<Nsi> get(const std::string& nsi_id) const;
  std::vector<Nsi> list() const;

  Nsi reconfigure(const std::string& nsi_id, std::optional<NfProfile> new_amf = std::nullopt);
  void begin_reconfigure(const std::string& nsi_id, std::optional<NfProfile> new_amf = std::nullopt);
  Nsi decommission(const std::string& nsi_id);

  std::string inventory_digest() const;
  std::string event_log_jsonl() const;
  Json metrics() const;
  Json slice_json(const std::string& nsi_id) const;
  // Availability of the slice's AMF sampled over [from, to).
  std::vector<AvailabilitySample> availability(const std::string& nsi_id, double from, double to,
                                               double period) const;

  // Direct access for experiments and tests; callers must not race with other threads.
  const Config& config() const { return config_; }
  VirtualClock& clock() { return clock_; }
  Platform& platform() { return platform_; }
  const Platform& platform() const { return platform_; }
  SdnController& sdn() { return sdn_; }
  Orchestrator& orchestrator() { return orch_; }
  const Orchestrator& orchestrator() const { return orch_; }
  DataStore& store() { return *store_; }
  EventLog& events() { return log_; }
  Onboarder& onboarder() { return onboarder_; }

 private:
  Config config_;
  std::unique_ptr<DataStore> store_;
  VirtualClock clock_;
  EventLog log_;
  Platform platform_;
  SdnController sdn_;
  Onboarder onboarder_;
  Orchestrator orch_;
  double onboard_free_at_ = 0;
  mutable std::recursive_mutex mu_;
};

// Default tenant request for a scenario (type set explicitly, no attributes).
SliceRequest default_request(Scenario s, const std::string& name);

// The sample document used throughout the documentation.
Json listing_one_request();

}  // namespace nsaas
