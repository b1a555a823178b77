#include <doctest.h>

#include <random>

#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"
#include "nsaas/slice_model.hpp"

using namespace nsaas;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::kConfig;
}

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.details().value("field", std::string("<none>"));
  }
  return "<no error>";
}

SliceRequest custom(std::optional<double> pdb_s, std::optional<double> density, bool non3gpp = false) {
  SliceRequest r;
  r.name = "probe";
  r.nst_type = NstType::kCustom;
  SliceAttributes a;
  if (pdb_s) a.ssq = Ssq{pdb_s, std::nullopt, std::nullopt};
  a.ue_density = density;
  if (non3gpp) a.non_3gpp_access = true;
  r.attributes = a;
  return r;
}

}  // namespace

TEST_CASE("the documentation sample request parses into typed fields") {
  const auto req = SliceRequest::from_json(listing_one_request());
  CHECK(req.name == "Custom 5G Network Slice");
  CHECK(req.nst_type == NstType::kCustom);
  REQUIRE(req.attributes);
  CHECK(*req.attributes->availability == 1.0);
  CHECK(*req.attributes->data_network == "internet");
  CHECK(*req.attributes->ue_density == 10000.0);
  REQUIRE(req.attributes->ssq);
  CHECK(*req.attributes->ssq->packet_delay_budget_s == doctest::Approx(0.00012));
  CHECK(*req.attributes->ssq->packet_error_rate == doctest::Approx(1e-7));
  CHECK(*req.attributes->ssq->max_data_burst_volume_mb == doctest::Approx(0.001));
  REQUIRE(req.resources);
  CHECK(req.resources->core.size() == 3);
  REQUIRE(req.resources->ran.size() == 1);
  CHECK(req.resources->ran[0].type == std::optional<std::string>("gnb"));
  CHECK(req.resources->ran[0].replicas == std::optional<int>(2));
  CHECK(req.resources->tn_routes == std::vector<std::string>{"backhaul"});
}

TEST_CASE("schema errors carry a JSON-pointer field path") {
  Json j = listing_one_request();
  j.erase("NST");
  CHECK(code_of([&] { SliceRequest::from_json(j); }) == Errc::kSchema);
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST");

  j = listing_one_request();
  j["NST"]["Slice Attributes"]["availability"] = 1.5;
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/Slice Attributes/availability");

  j = listing_one_request();
  j["NST"]["Slice Attributes"]["SSQ"]["Packet Delay Budget"] = 0;
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/Slice Attributes/SSQ/Packet Delay Budget");

  j = listing_one_request();
  j["NST"]["Slice Attributes"]["SSQ"]["Packet Error Rate"] = 1.0;
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/Slice Attributes/SSQ/Packet Error Rate");

  j = listing_one_request();
  j["NST"]["Slice Attributes"]["UE density"] = "many";
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/Slice Attributes/UE density");

  j = listing_one_request();
  j["NST"]["resource_description"]["ran"]["nfs"][0]["replicas"] = 0;
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/resource_description/ran/nfs/0/replicas");

  j = listing_one_request();
  j["NST"]["type"] = "holographic";
  CHECK(code_of([&] { SliceRequest::from_json(j); }) == Errc::kSchema);

  j = listing_one_request();
  j["NST"].erase("Slice Attributes");
  CHECK(field_of([&] { SliceRequest::from_json(j); }) == "/NST/Slice Attributes");

  CHECK(code_of([] { SliceRequest::from_json(Json::array()); }) == Errc::kSchema);
}

TEST_CASE("request JSON round trip preserves content and digest") {
  const auto req = SliceRequest::from_json(listing_one_request());
  const auto again = SliceRequest::from_json(req.to_json());
  CHECK(again.to_json() == req.to_json());
  CHECK(again.digest() == req.digest());

  auto other = req;
  other.name = "another";
  CHECK(other.digest() != req.digest());
}

TEST_CASE("classification agrees with a brute-force rule oracle") {
  const ClassificationRules rules;
  const double pdbs_ms[] = {0.05, 1.0, 9.99, 10.0, 50.0, 99.9, 100.0, 500.0};
  const double densities[] = {0, 1000, 50000, 50001, 200000};
  for (double pdb : pdbs_ms) {
    for (double dens : densities) {
      for (bool n3 : {false, true}) {
        int fired = 0;
        Scenario expected = Scenario::kSharedEMBB;
        if (n3) ++fired, expected = Scenario::kNon3gpp;
        if (pdb < 10.0) ++fired, expected = Scenario::kURLLC;
        if (dens > 50000.0 && pdb >= 100.0) ++fired, expected = Scenario::kMMTC;
        const auto req = custom(pdb / 1000.0, dens, n3);
        CAPTURE(pdb);
        CAPTURE(dens);
        CAPTURE(n3);
        if (fired > 1) {
          CHECK(code_of([&] { classify_slice_type(req, rules); }) == Errc::kUnclassifiable);
        } else {
          CHECK(classify_slice_type(req, rules) == expected);
        }
      }
    }
  }
}

TEST_CASE("classification of the documented examples") {
  CHECK(classify_slice_type(SliceRequest::from_json(listing_one_request())) == Scenario::kURLLC);
  CHECK(classify_slice_type(custom(0.2, 100000)) == Scenario::kMMTC);
  CHECK(classify_slice_type(custom(0.05, std::nullopt, true)) == Scenario::kNon3gpp);
  CHECK(classify_slice_type(custom(0.05, std::nullopt)) == Scenario::kSharedEMBB);
  CHECK(code_of([] { classify_slice_type(custom(0.001, std::nullopt, true)); }) == Errc::kUnclassifiable);

  SliceRequest explicit_type = custom(0.001, std::nullopt);
  explicit_type.nst_type = NstType::kMMTC;
  CHECK(classify_slice_type(explicit_type) == Scenario::kMMTC);
}

TEST_CASE("lifecycle transitions") {
  using S = NsiState;
  CHECK(is_legal_transition(S::kRequested, S::kDeploying));
  CHECK(is_legal_transition(S::kDeploying, S::kActive));
  CHECK(is_legal_transition(S::kActive, S::kReconfiguring));
  CHECK(is_legal_transition(S::kReconfiguring, S::kActive));
  CHECK(is_legal_transition(S::kActive, S::kTerminated));
  for (S in_progress : {S::kRequested, S::kDeploying, S::kReconfiguring}) {
    CHECK(is_legal_transition(in_progress, S::kDegraded));
  }
  CHECK_FALSE(is_legal_transition(S::kDeploying, S::kTerminated));
  CHECK_FALSE(is_legal_transition(S::kActive, S::kDeploying));
  for (S to : {S::kRequested, S::kDeploying, S::kActive, S::kReconfiguring, S::kDegraded, S::kTerminated}) {
    CHECK_FALSE(is_legal_transition(S::kTerminated, to));
  }
}

TEST_CASE("enum spellings round trip and unknown spellings are rejected") {
  for (Scenario s : kAllScenarios) CHECK(parse_scenario(to_string(s)) == s);
  for (Domain d : kAllDomains) CHECK(parse_domain(to_string(d)) == d);
  CHECK(code_of([] { parse_scenario("eMBB-plus"); }) == Errc::kUnknownScenario);
  CHECK(code_of([] { parse_domain("XN"); }) == Errc::kSchema);
  CHECK(sst_of(Scenario::kURLLC) == 2);
  CHECK(sst_of(Scenario::kMMTC) == 3);
  CHECK(sst_of(Scenario::kSharedEMBB) == 1);
}

TEST_CASE("runtime records round trip through JSON") {
  Nsi nsi;
  nsi.id = "nsi-0042";
  nsi.snssai = {2, 0xabc};
  nsi.tenant = "acme";
  nsi.scenario = Scenario::kURLLC;
  nsi.state = NsiState::kActive;
  nsi.nst = {"nst-1", 3};
  nsi.vlan = 101;
  nsi.created_at = 1.5;
  nsi.activated_at = 54.5;
  nsi.sla_targets.push_back({attr::kDelayBudget, 0.12, Direction::kAtMost, "d", "nst-1@v3"});
  Nssi cn;
  cn.domain = Domain::kCN;
  cn.state = NssiState::kReady;
  cn.resource_ids = {"nsi-0042/amf"};
  cn.endpoints = {{"amf", "10.0.0.1:38412"}};
  nsi.nssis.push_back(cn);
  const auto back = Nsi::from_json(nsi.to_json());
  CHECK(back.to_json() == nsi.to_json());
  CHECK(back.snssai.str() == "2-000abc");
  REQUIRE(back.nssi(Domain::kCN));
  CHECK(back.nssi(Domain::kRAN) == nullptr);

  NfProfile p{"amf", 2, 0.2, 0.4, 120, 240, 0.18, 110, "img:1"};
  Json pj = p;
  CHECK(pj.get<NfProfile>() == p);
}
