#include <doctest.h>

#include "nsaas/engine.hpp"

using namespace nsaas;

TEST_CASE("engine deploys each scenario with the calibrated totals") {
  const std::pair<Scenario, double> cases[] = {
      {Scenario::kURLLC, 53.0}, {Scenario::kMMTC, 42.0}, {Scenario::kSharedEMBB, 22.0}, {Scenario::kNon3gpp, 50.0}};
  for (const auto& [s, total] : cases) {
    Engine e;
    const auto nsi = e.submit(default_request(s, "probe"));
    CHECK(nsi.state == NsiState::kActive);
    const auto* rep = e.orchestrator().report(nsi.id);
    REQUIRE(rep);
    CHECK(rep->total() == doctest::Approx(total));
  }
}
