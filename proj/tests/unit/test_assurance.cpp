#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nsaas/assurance.hpp"
#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"

using namespace nsaas;

namespace {

KpiRecord rec(double t, double v, std::optional<SNssai> s = SNssai{1, 1}, const std::string& metric = "latency_ms") {
  return {t, s, metric, v, "CN", "nsi-0001/amf"};
}

}  // namespace

TEST_CASE("telemetry without an S-NSSAI is rejected by enrichment") {
  TelemetryStream s;
  CHECK_THROWS_AS(s.ingest(rec(0, 1, std::nullopt)), Error);
  s.ingest(rec(0, 1));
  s.ingest(rec(0.5, 2, SNssai{2, 1}));
  CHECK(s.raw().size() == 2);
  CHECK(s.values(SNssai{1, 1}, "latency_ms") == std::vector<double>{1});
  CHECK(s.series(SNssai{2, 1}, "cpu_vcpu").empty());
}

TEST_CASE("aggregation drops a 10-sigma spike and matches the plain oracle on the rest") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(100.0, 2.0);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(n(rng));
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / v.size());
  auto spiked = v;
  spiked.push_back(mean + 10 * sd * 15);
  const auto a = aggregate(spiked, 3.0);
  CHECK(a.excluded >= 1);
  CHECK(a.mean == doctest::Approx(mean).epsilon(0.01));
  CHECK(a.stddev < 3.0);

  const auto flat = aggregate({5, 5, 5});
  CHECK(flat.mean == 5);
  CHECK(flat.stddev == 0);
  CHECK(flat.excluded == 0);
}

TEST_CASE("attach medians follow the profile arithmetic") {
  const auto cfg = Config::defaults();
  AttachModel m(cfg.attach, 1);
  for (Scenario s : kAllScenarios) {
    const auto& p = cfg.attach.profiles.at(s);
    const double oracle = p.cp_rtt_ms * p.round_trips + p.processing_ms + p.tunnel_ms + p.backoff_mean_ms * std::log(2.0);
    CHECK(m.median_ms(s) == doctest::Approx(oracle));
  }
  CHECK(m.median_ms(Scenario::kURLLC) < m.median_ms(Scenario::kMMTC));
  CHECK(m.median_ms(Scenario::kMMTC) < m.median_ms(Scenario::kSharedEMBB));
  CHECK(m.median_ms(Scenario::kSharedEMBB) < m.median_ms(Scenario::kNon3gpp));
  const double gap = m.median_ms(Scenario::kNon3gpp) - m.median_ms(Scenario::kSharedEMBB);
  CHECK(gap >= 1000.0);
  CHECK(gap <= 1500.0);
  CHECK(m.median_ms(Scenario::kSharedEMBB, 10) == doctest::Approx(m.median_ms(Scenario::kSharedEMBB) + 20.0));
}

TEST_CASE("sampled latencies: medians near the model, heavier mMTC tail") {
  const auto cfg = Config::defaults();
  AttachModel m(cfg.attach, 11);
  const auto urllc = m.samples(Scenario::kURLLC, 2000);
  const auto mmtc = m.samples(Scenario::kMMTC, 2000);
  CHECK(median(urllc) == doctest::Approx(m.median_ms(Scenario::kURLLC)).epsilon(0.02));
  CHECK(median(mmtc) == doctest::Approx(m.median_ms(Scenario::kMMTC)).epsilon(0.05));
  const double urllc_tail = percentile(urllc, 0.99) / median(urllc);
  const double mmtc_tail = percentile(mmtc, 0.99) / median(mmtc);
  CHECK(urllc_tail < 1.15);
  CHECK(mmtc_tail > urllc_tail);
  CHECK(mmtc_tail > 1.5);

  AttachModel a(cfg.attach, 99);
  AttachModel b(cfg.attach, 99);
  CHECK(a.samples(Scenario::kSharedEMBB, 50) == b.samples(Scenario::kSharedEMBB, 50));
}

TEST_CASE("percentile interpolates linearly") {
  CHECK(percentile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(percentile({10}, 0.9) == 10);
  CHECK(median({3, 1, 2}) == 2);
  CHECK(percentile({}, 0.5) == 0);
}

TEST_CASE("registrations time out while the serving AMF is replaced") {
  Engine e;
  const auto nsi = e.submit(default_request(Scenario::kURLLC, "attach"));
  AttachModel m(e.config().attach, 5);
  const auto amf = e.orchestrator().amf_workload(nsi.id);
  CHECK(m.attempt(Scenario::kURLLC, e.platform(), amf, e.now()) == doctest::Approx(m.median_ms(Scenario::kURLLC)));
  const double t0 = e.now() - 1.0;
  e.reconfigure(nsi.id);
  const auto* r = e.orchestrator().reconfig(nsi.id);
  REQUIRE(r);
  REQUIRE(r->amf_ready_at);
  const double mid = (r->amf_down_at + *r->amf_ready_at) / 2;
  CHECK_THROWS_AS(m.attempt(Scenario::kURLLC, e.platform(), amf, mid), Error);
  try {
    m.attempt(Scenario::kURLLC, e.platform(), amf, mid);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::kNoAmfAvailable);
  }
  const double just_back = m.attempt(Scenario::kURLLC, e.platform(), amf, *r->amf_ready_at);
  CHECK(just_back == doctest::Approx(m.median_ms(Scenario::kURLLC) + e.config().attach.recovery_penalty_ms));
  CHECK(m.attempt(Scenario::kURLLC, e.platform(), amf, t0) == doctest::Approx(m.median_ms(Scenario::kURLLC)));

  const auto series = e.availability(nsi.id, t0, e.now() + 5, 0.5);
  const auto runs = outage_runs(series, 0.5);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0] == doctest::Approx(9.0));
}

TEST_CASE("availability helpers") {
  const std::vector<AvailabilitySample> s{{0, 1}, {0.5, 0}, {1, 0}, {1.5, 1}, {2, 0}};
  CHECK(availability_fraction(s) == doctest::Approx(0.4));
  CHECK(outage_runs(s, 0.5) == std::vector<double>{1.0, 0.5});
  CHECK(availability_fraction({}) == 0);
}

TEST_CASE("admission counts agree with a replayed oracle including detaches") {
  AdmissionController ac(7);
  ac.add_slice("A");
  ac.add_slice("B");
  std::mt19937 rng(17);
  std::map<std::string, std::string> oracle_assign;
  std::map<std::string, int> oracle_count{{"A", 0}, {"B", 0}};
  for (int step = 0; step < 400; ++step) {
    const std::string ue = "ue-" + std::to_string(rng() % 20);
    if (oracle_assign.count(ue) && rng() % 2) {
      --oracle_count[oracle_assign[ue]];
      oracle_assign.erase(ue);
      ac.detach(ue, step);
    } else if (!oracle_assign.count(ue)) {
      std::string want;
      for (const char* s : {"A", "B"}) {
        if (oracle_count[s] < 7) {
          want = s;
          break;
        }
      }
      if (want.empty()) {
        CHECK_THROWS_AS(ac.admit(ue, step), Error);
        continue;
      }
      CHECK(ac.admit(ue, step) == want);
      ++oracle_count[want];
      oracle_assign[ue] = want;
    }
    CHECK(ac.count("A") == oracle_count["A"]);
    CHECK(ac.count("B") == oracle_count["B"]);
    CHECK(ac.count("A") <= 7);
  }
  CHECK(ac.peak("A") <= 7);
}

TEST_CASE("UEs 1-7 land on the primary slice, the rest on the secondary") {
  AdmissionController ac(7);
  ac.add_slice("A");
  ac.add_slice("B");
  for (int i = 1; i <= 12; ++i) {
    const auto s = ac.admit("ue-" + std::to_string(i), i);
    CHECK(s == (i <= 7 ? "A" : "B"));
  }
  CHECK(ac.peak("A") == 7);
  int transitions = 0;
  for (const auto& ev : ac.events()) transitions += ev.kind == "transition";
  CHECK(transitions == 1);
}

TEST_CASE("closed loop fires once per sustained episode") {
  AssuranceRule rule{"lat", "latency_ms", 100.0, Direction::kAtMost, 3, ActionKind::kScale, ""};
  std::mt19937 rng(23);
  std::vector<double> values;
  for (int i = 0; i < 300; ++i) values.push_back(rng() % 3 == 0 ? 150.0 : 50.0);
  for (int i = 0; i < 6; ++i) values.push_back(150.0);
  // Episode starts by direct scan: the third consecutive breach opens one, three clears close it.
  std::vector<std::size_t> starts;
  {
    int breach = 0, clear = 0;
    bool open = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 100.0) {
        clear = 0;
        if (++breach == 3 && !open) open = true, starts.push_back(i);
      } else {
        breach = 0;
        if (open && ++clear == 3) open = false, clear = 0;
      }
    }
  }
  const auto episodes = segment_episodes(values, rule);
  REQUIRE(episodes.size() == starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) CHECK(episodes[i].first == starts[i]);

  int calls = 0;
  ClosedLoop loop({rule}, [&](const AssuranceRule&, const KpiRecord&) {
    ++calls;
    return Json{{"ok", true}};
  });
  std::vector<KpiRecord> records;
  for (std::size_t i = 0; i < values.size(); ++i) records.push_back(rec(i * 0.5, values[i]));
  const auto actions = loop.run(records);
  REQUIRE(actions.size() == episodes.size());
  CHECK(calls == static_cast<int>(episodes.size()));
  for (std::size_t i = 0; i < actions.size(); ++i) {
    CHECK(actions[i].t == doctest::Approx(episodes[i].first * 0.5));
    CHECK(actions[i].before == 150.0);
    CHECK(actions[i].action == "scale");
    CHECK(actions[i].target == "nsi-0001/amf");
  }
  for (std::size_t i = 0; i + 1 < loop.actions().size(); ++i) {
    const auto idx = episodes[i].first + 1;
    CHECK(loop.actions()[i].after == std::optional<double>(values[idx]));
  }
  CHECK_THROWS_AS(loop.observe(rec(0, 1, std::nullopt)), Error);
}

TEST_CASE("closed loop state is per slice") {
  AssuranceRule rule{"avail", "availability", 0.95, Direction::kAtLeast, 2, ActionKind::kReplaceAmf, "amf"};
  ClosedLoop loop({rule});
  loop.observe(rec(0, 0.5, SNssai{1, 1}, "availability"));
  loop.observe(rec(0, 0.5, SNssai{1, 2}, "availability"));
  CHECK_FALSE(loop.observe(rec(0.5, 0.99, SNssai{1, 2}, "availability")));
  const auto fired = loop.observe(rec(0.5, 0.4, SNssai{1, 1}, "availability"));
  REQUIRE(fired);
  CHECK(fired->snssai == "1-000001");
  CHECK(fired->target == "amf");
  CHECK(loop.actions().size() == 1);
}
