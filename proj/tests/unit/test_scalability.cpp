#include <doctest.h>

#include <thread>

#include "nsaas/assurance.hpp"
#include "nsaas/engine.hpp"

using namespace nsaas;

TEST_CASE("ten slices with 250 UEs each stay consistent under concurrent drivers") {
  Engine e;
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) {
    const Scenario s = i % 2 ? Scenario::kSharedEMBB : Scenario::kURLLC;
    ids.push_back(e.submit(default_request(s, "scale-" + std::to_string(i))).id);
  }

  std::vector<AdmissionController> admission;
  for (int i = 0; i < 10; ++i) {
    admission.emplace_back(250);
    admission.back().add_slice(ids[i]);
  }
  std::vector<std::vector<double>> latencies(10);
  std::vector<std::thread> drivers;
  for (int i = 0; i < 10; ++i) {
    drivers.emplace_back([&, i] {
      AttachModel model(e.config().attach, 100 + i);
      const auto nsi = e.get(ids[i]);
      for (int u = 0; u < 250; ++u) {
        admission[i].admit("ue-" + std::to_string(u), e.now());
        latencies[i].push_back(model.median_ms(nsi->scenario, admission[i].count(ids[i])));
      }
      e.metrics();
    });
  }
  for (auto& t : drivers) t.join();

  for (int i = 0; i < 10; ++i) {
    CHECK(admission[i].count(ids[i]) == 250);
    CHECK(latencies[i].size() == 250);
    const auto nsi = e.get(ids[i]);
    REQUIRE(nsi);
    CHECK(nsi->state == NsiState::kActive);
  }
  CHECK(e.list().size() == 10);
  CHECK(e.metrics().at("nsi_by_state").at("Active") == 10);

  // Reconfigure and decommission from several threads at once.
  std::vector<std::thread> workers;
  for (int i = 0; i < 10; ++i) {
    workers.emplace_back([&, i] {
      if (i % 2) {
        e.decommission(ids[i]);
      } else {
        e.begin_reconfigure(ids[i]);
      }
    });
  }
  for (auto& t : workers) t.join();
  e.run_until_settled();
  for (int i = 0; i < 10; ++i) {
    CHECK(e.get(ids[i])->state == (i % 2 ? NsiState::kTerminated : NsiState::kActive));
  }
}
