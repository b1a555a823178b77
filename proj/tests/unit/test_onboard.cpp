#include <doctest.h>

#include <algorithm>
#include <limits>

#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"
#include "nsaas/onboard.hpp"

using namespace nsaas;

namespace {

struct Fixture {
  Config cfg = Config::defaults();
  Catalog catalog;
  Onboarder onboarder{cfg, catalog};
  Fixture() {
    for (const auto& n : cfg.catalog_seed) catalog.register_nsst(n);
  }
};

SliceRequest mmtc_request() {
  SliceRequest r;
  r.name = "meters";
  r.nst_type = NstType::kCustom;
  SliceAttributes a;
  a.ssq = Ssq{0.2, std::nullopt, std::nullopt};
  a.ue_density = 100000;
  r.attributes = a;
  return r;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kConfig;
}

}  // namespace

TEST_CASE("normalization converts units and records defaulted attributes") {
  Fixture f;
  const auto n = f.onboarder.normalize_requirements(SliceRequest::from_json(listing_one_request()));
  CHECK(n.delay_budget_ms == doctest::Approx(0.12));
  CHECK(n.error_rate == doctest::Approx(1e-7));
  CHECK(n.burst_volume_mb == doctest::Approx(0.001));
  CHECK(n.availability_pct == doctest::Approx(100.0));
  CHECK(n.ue_density_per_km2 == 10000.0);
  CHECK(n.data_network == "internet");
  CHECK(n.defaulted.empty());

  const auto d = f.onboarder.normalize_requirements(default_request(Scenario::kMMTC, "bare"));
  const auto& want = f.cfg.scenario_defaults.at(Scenario::kMMTC);
  CHECK(d.delay_budget_ms == want.delay_budget_ms);
  CHECK(d.ue_density_per_km2 == want.ue_density_per_km2);
  CHECK(d.availability_pct == want.availability_pct);
  CHECK(d.defaulted.size() == 6);
}

TEST_CASE("denormalize inverts normalize") {
  Fixture f;
  const SliceRequest reqs[] = {SliceRequest::from_json(listing_one_request()), mmtc_request(),
                               default_request(Scenario::kNon3gpp, "wifi")};
  for (const auto& req : reqs) {
    const auto back = denormalize(f.onboarder.normalize_requirements(req));
    CHECK(back.to_json() == req.to_json());
  }
}

TEST_CASE("template matching picks the minimal feasible footprint per domain") {
  Fixture f;
  // Extra candidates for the oracle: a lighter but infeasible CN, and a heavier feasible one.
  Nsst light;
  light.id = "cn-urllc-too-slow";
  light.domain = Domain::kCN;
  light.scenarios = {Scenario::kURLLC};
  light.variables = {{"min_delay_budget_ms", 50.0}, {"max_ue_density", 1e6}};
  f.catalog.register_nsst(light);
  Nsst heavy = light;
  heavy.id = "cn-urllc-heavy";
  heavy.variables = {{"min_delay_budget_ms", 0.0}, {"max_ue_density", 1e6}, {"placement", "edge"}};
  heavy.nfs.push_back({"amf", 4, 1.0, 1.0, 1024, 1024, 0.5, 512, "amf:1"});
  f.catalog.register_nsst(heavy);

  const auto norm = f.onboarder.normalize_requirements(SliceRequest::from_json(listing_one_request()));
  const auto sel = f.onboarder.match_template(norm, Scenario::kURLLC);
  for (Domain d : kAllDomains) {
    const auto candidates = f.catalog.lookup_templates(d, Scenario::kURLLC);
    const Nsst* best = nullptr;
    for (const auto& c : candidates) {
      const bool ok = norm.delay_budget_ms >= c.variables.value("min_delay_budget_ms", 0.0) &&
                      norm.ue_density_per_km2 <= c.variables.value("max_ue_density", std::numeric_limits<double>::infinity());
      if (ok && (!best || c.footprint() < best->footprint())) best = &c;
    }
    REQUIRE(best);
    CHECK(sel.per_domain.at(d).id == best->id);
  }
  CHECK(sel.per_domain.at(Domain::kCN).id == "cn-urllc-dedicated");
}

TEST_CASE("no feasible template yields NoMatch") {
  Fixture f;
  auto norm = f.onboarder.normalize_requirements(SliceRequest::from_json(listing_one_request()));
  norm.delay_budget_ms = 0.01;
  CHECK(code_of([&] { f.onboarder.match_template(norm, Scenario::kURLLC); }) == Errc::kNoMatch);
  norm.delay_budget_ms = 1.0;
  norm.ue_density_per_km2 = 1e9;
  CHECK(code_of([&] { f.onboarder.match_template(norm, Scenario::kURLLC); }) == Errc::kNoMatch);
}

TEST_CASE("URLLC translation: dedicated edge core, exclusive VLAN, shortest path") {
  Fixture f;
  const auto r = f.onboarder.onboard(SliceRequest::from_json(listing_one_request()));
  CHECK(r.scenario == Scenario::kURLLC);
  CHECK(r.descriptors.placement == "edge");
  std::vector<std::string> roles;
  for (const auto& nf : r.descriptors.cn.nfs) roles.push_back(nf.profile.name);
  CHECK(roles == std::vector<std::string>{"amf", "smf", "upf"});
  for (const auto& nf : r.descriptors.cn.nfs) CHECK(nf.site == "edge");
  CHECK(r.descriptors.tn.vlan == 101);
  CHECK(r.descriptors.tn.route_policy == "shortest");
  REQUIRE(r.descriptors.ran.nfs.size() == 1);
  CHECK(r.descriptors.ran.nfs[0].profile.name == "gnb");
  CHECK(r.descriptors.ran.nfs[0].profile.replicas == 2);
}

TEST_CASE("mMTC translation: shared control plane, light UPF, VLAN 102, resilient path") {
  Fixture f;
  const auto r = f.onboarder.onboard(mmtc_request());
  CHECK(r.scenario == Scenario::kMMTC);
  const auto& shared = r.descriptors.cn.shared_refs;
  CHECK(std::count(shared.begin(), shared.end(), "amf") == 1);
  CHECK(std::count(shared.begin(), shared.end(), "smf") == 1);
  bool has_upf = false;
  for (const auto& nf : r.descriptors.cn.nfs) {
    CHECK(nf.profile.name != "amf");
    CHECK(nf.profile.name != "smf");
    if (nf.profile.name == "upf") {
      has_upf = true;
      CHECK(nf.profile.cpu_request <= 0.1);
    }
  }
  CHECK(has_upf);
  CHECK(r.descriptors.tn.vlan == 102);
  CHECK(r.descriptors.tn.route_policy == "resilient");
}

TEST_CASE("SLA targets are created for supplied attributes only") {
  Fixture f;
  const auto r = f.onboarder.onboard(SliceRequest::from_json(listing_one_request()));
  REQUIRE(r.rendered.sla_targets.size() == 5);
  for (const auto& t : r.rendered.sla_targets) {
    CHECK(t.source_request == r.request_digest);
    CHECK(t.version_tag == r.rendered.nst.id + "@v" + std::to_string(r.rendered.nst.version));
    if (t.attribute == attr::kAvailability) {
      CHECK(t.target == doctest::Approx(100.0));
      CHECK(t.direction == Direction::kAtLeast);
    }
    if (t.attribute == attr::kDelayBudget) {
      CHECK(t.target == doctest::Approx(0.12));
      CHECK(t.direction == Direction::kAtMost);
    }
  }
  CHECK(f.onboarder.onboard(default_request(Scenario::kSharedEMBB, "plain")).rendered.sla_targets.empty());
}

TEST_CASE("policy violations are reported together") {
  Fixture f;
  auto r = f.onboarder.onboard(SliceRequest::from_json(listing_one_request()));
  auto d = r.descriptors;
  d.tn.vlan = 999;
  d.placement = "mars";
  try {
    f.onboarder.render_and_validate(d, r.requirements, r.request_digest);
    FAIL("expected Validation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kValidation);
    std::set<std::string> codes;
    for (const auto& v : e.details().at("violations")) codes.insert(v.at("code").get<std::string>());
    CHECK(codes.count("vlan") == 1);
    CHECK(codes.count("placement") == 1);
  }
  d = r.descriptors;
  d.cn.nfs[0].profile.replicas = 40;
  CHECK(code_of([&] { f.onboarder.render_and_validate(d, r.requirements, r.request_digest); }) == Errc::kValidation);
}

TEST_CASE("rendering is deterministic and committed once") {
  Fixture f;
  const auto a = f.onboarder.onboard(SliceRequest::from_json(listing_one_request()));
  const auto size = f.catalog.size();
  const auto b = f.onboarder.onboard(SliceRequest::from_json(listing_one_request()));
  CHECK(a.rendered.digest == b.rendered.digest);
  CHECK(a.rendered.nst.id == b.rendered.nst.id);
  CHECK(a.rendered.nst.version == b.rendered.nst.version);
  CHECK(f.catalog.size() == size);

  Fixture g;
  CHECK(g.onboarder.onboard(SliceRequest::from_json(listing_one_request())).rendered.digest == a.rendered.digest);
}

TEST_CASE("explicit NF overrides that contradict sharing are rejected") {
  Fixture f;
  auto req = mmtc_request();
  req.resources = ResourceRequest{{{"amf", std::nullopt, 2}}, {}, {}};
  try {
    f.onboarder.onboard(req);
    FAIL("expected OverrideConflict");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kOverrideConflict);
    CHECK(e.details().at("conflicts")[0].at("nf") == "amf");
  }
}
