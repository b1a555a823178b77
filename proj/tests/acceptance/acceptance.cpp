#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nsaas/assurance.hpp"
#include "nsaas/cost_model.hpp"
#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"
#include "nsaas/experiments.hpp"

using namespace nsaas;

namespace {

struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol + 1e-12; }

// Rows of a dataset, header line and column names removed.
std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

Outcome deployment_totals(const Config& cfg) {
  Outcome o;
  const auto r = run_experiment("deployment-times", cfg);
  const std::pair<const char*, double> targets[] = {
      {"Shared-eMBB", 22.0}, {"mMTC", 42.0}, {"non3gpp", 50.0}, {"URLLC", 53.0}};
  for (const auto& [name, want] : targets) {
    const double got = r.summary.at("total_s").at(name).get<double>();
    o.expect(within(got, want, 0.10 * want), std::string(name) + " total " + fmt(got, 1) + " s vs " + fmt(want, 0));
    o.note(std::string(name) + "=" + fmt(got, 1) + "s");
  }
  return o;
}

Outcome step_decomposition(const Config& cfg) {
  Outcome o;
  const auto s = run_experiment("step-breakdown", cfg).summary.at("URLLC");
  const auto substeps = s.at("substeps").get<int>();
  const double step2 = s.at("step2_share").get<double>();
  const double cn = s.at("cn_share").get<double>();
  o.expect(substeps == 26, "URLLC substeps " + std::to_string(substeps));
  o.expect(within(step2, 0.40, 0.05), "step 2 share " + fmt(step2));
  o.expect(cn >= 0.60 && cn <= 0.70, "CN share " + fmt(cn));

  // Cross-check the shares against the raw deployment report.
  Engine e(cfg);
  const auto nsi = e.submit(default_request(Scenario::kURLLC, "acceptance-steps"));
  const auto* rep = e.orchestrator().report(nsi.id);
  o.expect(rep && within(rep->step_total(2) / rep->total(), step2, 1e-6), "step 2 share disagrees with report");
  o.expect(rep && within(rep->domain_total("CN") / rep->total(), cn, 1e-6), "CN share disagrees with report");
  o.note("substeps=" + std::to_string(substeps) + " step2=" + fmt(100 * step2, 1) + "% CN=" + fmt(100 * cn, 1) + "%");
  return o;
}

Outcome attach_latency(const Config& cfg) {
  Outcome o;
  const auto s = run_experiment("attach-latency", cfg).summary;
  const auto& med = s.at("median_ms");
  const double urllc = med.at("URLLC").get<double>();
  const double mmtc = med.at("mMTC").get<double>();
  const double shared = med.at("Shared-eMBB").get<double>();
  const double n3 = med.at("non3gpp").get<double>();
  const double ratio = urllc / shared;
  o.expect(within(ratio, 0.07, 0.02), "URLLC/Shared median ratio " + fmt(ratio));
  o.expect(urllc < mmtc && mmtc < shared && shared < n3, "median ordering");
  o.expect(n3 - shared >= 1000.0 && n3 - shared <= 1500.0, "non-3GPP minus Shared " + fmt(n3 - shared, 1) + " ms");
  o.note("ratio=" + fmt(ratio) + " medians(ms) URLLC=" + fmt(urllc, 1) + " mMTC=" + fmt(mmtc, 1) + " Shared=" +
         fmt(shared, 1) + " non3gpp=" + fmt(n3, 1));
  return o;
}

Outcome reconfiguration(const Config& cfg) {
  Outcome o;
  const auto avail = run_experiment("reconfig-availability", cfg);
  const auto runs = avail.summary.at("outage_runs_s");
  o.expect(runs.size() == 1, "expected a single outage, got " + std::to_string(runs.size()));
  if (!runs.empty()) o.expect(within(runs[0].get<double>(), 9.0, 0.5), "outage " + fmt(runs[0].get<double>(), 2) + " s");
  o.expect(avail.summary.at("udr_unchanged").get<bool>(), "UDR digest changed");

  // Zeros form one block; every other sample is 1.
  int transitions = 0;
  int prev = 1;
  for (const auto& row : rows_of(avail.datasets[0].csv)) {
    const int up = std::stoi(row.at(1));
    o.expect(up == 0 || up == 1, "non-binary availability");
    transitions += up != prev;
    prev = up;
  }
  o.expect(transitions == 2, "availability changes " + std::to_string(transitions) + " times");

  const auto lat = run_experiment("reconfig-latency", cfg);
  const auto rows = rows_of(lat.datasets[0].csv);
  double peak = 0;
  std::size_t first_back = 0;
  bool seen_timeout = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][1] == "timeout") {
      seen_timeout = true;
      continue;
    }
    peak = std::max(peak, std::stod(rows[i][2]));
    if (seen_timeout && first_back == 0) first_back = i;
  }
  o.expect(peak <= 1500.0 + 1e-9, "orchestrated peak " + fmt(peak, 1) + " ms");
  o.expect(first_back > 0 && first_back + 2 < rows.size(), "no recovery after the outage");
  if (first_back > 0 && first_back + 2 < rows.size()) {
    const double settled = std::stod(rows[first_back + 2][2]);
    o.expect(within(settled, 600.0, 60.0), "two samples after recovery: " + fmt(settled, 1) + " ms");
  }

  int successes = 0;
  int window = 0;
  for (const auto& row : rows) {
    const double t = std::stod(row[0]);
    if (t >= 23.0 && t < 47.0) {
      ++window;
      successes += row[3] == "ok";
    }
  }
  o.expect(window > 0 && successes == 0,
           "no-orchestration registrations succeeded " + std::to_string(successes) + " times in 23-47 s");
  o.note("outage=" + (runs.empty() ? std::string("-") : fmt(runs[0].get<double>(), 1)) + "s peak=" + fmt(peak, 0) +
         "ms no-orchestration-successes[23,47)=" + std::to_string(successes));
  return o;
}

Outcome admission(const Config& cfg) {
  Outcome o;
  const auto r = run_experiment("slice-usage", cfg);
  const auto& assign = r.summary.at("assignment");
  for (int k = 1; k <= 12; ++k) {
    char ue[16];
    std::snprintf(ue, sizeof(ue), "ue-%02d", k);
    const auto want = k <= 7 ? "A" : "B";
    o.expect(assign.at(ue) == want, std::string(ue) + " on " + assign.at(ue).get<std::string>());
  }
  int peak = 0;
  for (const auto& row : rows_of(r.datasets[0].csv)) peak = std::max(peak, std::stoi(row.at(1)));
  o.expect(peak <= 7, "slice A reached " + std::to_string(peak));
  o.expect(r.summary.at("peak_a").get<int>() <= 7, "admission peak above cap");
  o.note("cap=7 peakA=" + std::to_string(peak));
  return o;
}

Outcome cost_regression(const Config& cfg) {
  Outcome o;
  const auto table = parse_price_table(cfg.price_table_csv);
  const auto edge = fit_cost_model(table, "Edge");
  const auto metro = fit_cost_model(table, "Metropolitan");
  const auto central = fit_cost_model(table, "Central");
  o.expect(within(edge.a, 39.42, 0.01) && within(edge.b, 3.65, 0.01) && within(edge.c, -22.56, 0.01),
           "Edge fit " + fmt(edge.a) + "," + fmt(edge.b) + "," + fmt(edge.c));
  o.expect(within(metro.a, 33.58, 0.01) && within(metro.b, -1.46, 0.01) && metro.c >= 6.62 && metro.c <= 6.65,
           "Metropolitan fit " + fmt(metro.a) + "," + fmt(metro.b) + "," + fmt(metro.c));
  for (const auto& row : table) {
    if (row.tier != "Central") continue;
    const double got = central.predict(row.vcpu, row.ram_gb);
    o.expect(std::abs(got - row.price) < 0.01, "Central " + row.size + " " + fmt(got, 4) + " vs " + fmt(row.price, 2));
  }
  const auto printed = printed_cost_models();
  const double v = tier_variation(printed.at("Edge"), printed.at("Central"), 4.8, 17.6);
  o.expect(within(v, 116.8, 0.5), "variation " + fmt(v, 2) + "%");
  o.expect(within(v, 112.0, 10.0), "variation vs 112% claim " + fmt(v, 2) + "%");
  o.note("variation=" + fmt(v, 2) + "% central_b(fit)=" + fmt(central.b, 6) + " printed=1");
  return o;
}

Outcome resource_trace(const Config& cfg) {
  Outcome o;
  const auto s = run_experiment("resource-usage", cfg).summary;
  const double vcpu = s.at("peak_vcpu").get<double>();
  const double ram = s.at("peak_ram_gb").get<double>();
  const double per_cpu = s.at("mean_slice_vcpu").get<double>();
  const double per_ram = s.at("mean_slice_ram_mb").get<double>();
  o.expect(within(vcpu, 4.8, 0.48), "peak vCPU " + fmt(vcpu, 2));
  o.expect(within(ram, 17.6, 1.76), "peak RAM " + fmt(ram, 2) + " GB");
  o.expect(within(per_cpu, 1.2, 0.3), "per-slice vCPU " + fmt(per_cpu, 2));
  o.expect(within(per_ram, 600.0, 150.0), "per-slice RAM " + fmt(per_ram, 0) + " MB");
  o.note("peak=" + fmt(vcpu, 2) + "vCPU/" + fmt(ram, 2) + "GB per-slice=" + fmt(per_cpu, 2) + "vCPU/" + fmt(per_ram, 0) +
         "MB");
  return o;
}

int domain_rank(const std::string& d) { return d == "CN" ? 0 : d == "RAN" ? 1 : d == "TN" ? 2 : 3; }

Outcome properties(const Config& cfg) {
  Outcome o;

  {
    Engine e(cfg);
    const auto req = SliceRequest::from_json(listing_one_request());
    const auto a = e.submit(req);
    const auto digest = e.inventory_digest();
    const auto b = e.submit(req);
    o.expect(a.id == b.id && e.list().size() == 1 && e.inventory_digest() == digest, "idempotent resubmission");
  }

  {
    Engine e(cfg);
    std::mt19937 rng(2024);
    int bad = 0;
    std::size_t seen = 0;
    for (int i = 0; i < 100; ++i) {
      const Scenario s = kAllScenarios[rng() % kAllScenarios.size()];
      const auto nsi = e.submit(default_request(s, "order-" + std::to_string(i)));
      int rank = 0;
      for (const auto& ev : e.events().events()) {
        if (ev.value("nsi", "") != nsi.id || ev.at("kind") != "substep_start") continue;
        ++seen;
        const int r = domain_rank(ev.at("domain").get<std::string>());
        if (r < rank) ++bad;
        rank = r;
      }
      e.decommission(nsi.id);
    }
    o.expect(seen >= 100 * 26, "too few substep events: " + std::to_string(seen));
    o.expect(bad == 0, "CN->RAN->TN ordering violated " + std::to_string(bad) + " times");
  }

  {
    Engine e(cfg);
    const auto nsi = e.submit(default_request(Scenario::kSharedEMBB, "shared-only"));
    int cn = 0;
    for (const auto* w : e.platform().workloads_of(nsi.id)) {
      for (const char* role : {"amf", "smf", "upf", "udr", "nrf", "ausf", "pcf", "udm", "nssf"}) cn += w->profile.name == role;
    }
    o.expect(cn == 0, "Shared slice created " + std::to_string(cn) + " CN workloads");
  }

  {
    Engine e(cfg);
    for (Scenario s : kAllScenarios) {
      for (int i = 0; i < 2; ++i) e.submit(default_request(s, "vlan-" + std::to_string(i)));
    }
    bool ok = true;
    for (const auto& nsi : e.list()) {
      if (nsi.vlan == 101) ok &= nsi.scenario == Scenario::kURLLC;
      if (nsi.vlan == 102) ok &= nsi.scenario == Scenario::kMMTC || nsi.scenario == Scenario::kSharedEMBB;
      if (nsi.vlan == 104) ok &= nsi.scenario == Scenario::kNon3gpp;
    }
    o.expect(ok, "VLAN exclusivity");
  }

  {
    VirtualClock clock;
    Platform p(clock, cfg);
    const NfProfile upf{"upf", 1, 0.1, 0.2, 64, 128, 0.08, 60, "upf:1"};
    p.apply_release("scale", upf, "edge", {0, 1, 0});
    clock.run_all();
    const auto id = Platform::workload_id("scale", "upf");
    const int w = cfg.autoscaler.window;
    for (int i = 0; i < w; ++i) p.autoscale_tick(id, 0.9);
    const int up = p.workload(id)->profile.replicas;
    for (int i = 0; i < w; ++i) p.autoscale_tick(id, 0.5);
    const int hold = p.workload(id)->profile.replicas;
    for (int round = 0; round < 4; ++round) {
      for (int i = 0; i < w; ++i) p.autoscale_tick(id, 0.1);
    }
    const int floor = p.workload(id)->profile.replicas;
    o.expect(up == 2 && hold == 2 && floor == cfg.autoscaler.min_replicas,
             "autoscaler up/hold/floor " + std::to_string(up) + "/" + std::to_string(hold) + "/" + std::to_string(floor));
  }

  {
    auto run = [&] {
      Engine e(cfg);
      for (Scenario s : kAllScenarios) e.submit(default_request(s, "det"));
      e.reconfigure(e.list().front().id);
      return e.event_log_jsonl();
    };
    o.expect(run() == run(), "event logs differ between identical runs");
  }

  {
    auto scale = std::async(std::launch::async, [&] {
      Engine e(cfg);
      std::vector<std::string> ids;
      for (int i = 0; i < 10; ++i) {
        ids.push_back(e.submit(default_request(i % 2 ? Scenario::kSharedEMBB : Scenario::kURLLC, "ue-" + std::to_string(i))).id);
      }
      std::vector<std::thread> threads;
      std::vector<int> admitted(10, 0);
      for (int i = 0; i < 10; ++i) {
        threads.emplace_back([&, i] {
          AdmissionController ac(250);
          ac.add_slice(ids[i]);
          AttachModel m(cfg.attach, 7 + i);
          const auto amf = e.orchestrator().amf_workload(ids[i]);
          for (int u = 0; u < 250; ++u) {
            ac.admit("ue-" + std::to_string(u), e.now());
            m.attempt(e.get(ids[i])->scenario, e.platform(), amf, e.now());
            e.metrics();
          }
          admitted[i] = ac.count(ids[i]);
        });
      }
      for (auto& t : threads) t.join();
      bool ok = e.list().size() == 10;
      for (int i = 0; i < 10; ++i) ok &= admitted[i] == 250 && e.get(ids[i])->state == NsiState::kActive;
      return ok;
    });
    const bool finished = scale.wait_for(std::chrono::seconds(30)) == std::future_status::ready;
    o.expect(finished, "scalability smoke did not finish (deadlock?)");
    if (finished) o.expect(scale.get(), "per-slice state inconsistent after 10 x 250 UEs");
  }

  o.note("idempotency, ordering(100), shared-CN, VLAN, autoscaler, determinism, 10x250");
  return o;
}

}  // namespace

int main() {
  const auto cfg = Config::defaults();
  const std::vector<std::pair<std::string, std::function<Outcome(const Config&)>>> criteria = {
      {"scenario deployment totals", deployment_totals},
      {"step decomposition", step_decomposition},
      {"attach latency reduction", attach_latency},
      {"reconfiguration traces", reconfiguration},
      {"admission control", admission},
      {"cost regression", cost_regression},
      {"resource trace", resource_trace},
      {"property suite", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(cfg);
    } catch (const std::exception& ex) {
      o.failures.push_back(std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 10.0) o.failures.push_back("took " + fmt(secs, 1) + " s");
    const bool ok = o.failures.empty();
    failed += !ok;
    std::string detail;
    for (const auto& n : (ok ? o.notes : o.failures)) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("criterion %zu (%s): %s [%.2fs] %s\n", i + 1, criteria[i].first.c_str(), ok ? "PASS" : "FAIL", secs,
                detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
