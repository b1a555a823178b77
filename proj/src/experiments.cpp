#include "nsaas/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "nsaas/assurance.hpp"
#include "nsaas/cost_model.hpp"
#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

namespace {

std::string num(double v, int prec) {
  if (std::fabs(v) < 0.5 * std::pow(10.0, -prec)) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

double round_to(double v, int prec) {
  const double k = std::pow(10.0, prec);
  return std::round(v * k) / k;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& experiment, std::string dataset, const std::string& units, const std::string& digest,
            const std::vector<std::string>& columns)
      : name_(std::move(dataset)) {
    out_ = "# experiment=" + experiment + " dataset=" + name_ + " units=" + units + " config_digest=" + digest + "\n";
    add(columns);
  }

  void add(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  Dataset done() { return {name_, std::move(out_)}; }

 private:
  std::string name_;
  std::string out_;
};

std::string scenario_name(Scenario s) { return std::string(to_string(s)); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// ---------------------------------------------------------------------------

ExperimentResult deployment_times(const Config& cfg) {
  ExperimentResult r{"deployment-times", {}, Json::object()};
  CsvWriter w(r.experiment, "deployment-times", "time:s(virtual);share:percent", cfg.digest(),
              {"scenario", "total_s", "cn_s", "ran_s", "tn_s", "e2e_s", "substeps", "step2_pct", "cn_pct"});
  for (Scenario s : kAllScenarios) {
    Engine e(cfg);
    const auto nsi = e.submit(default_request(s, "deployment-" + lower(scenario_name(s))));
    const auto& rep = *e.orchestrator().report(nsi.id);
    const double total = rep.total();
    w.add({scenario_name(s), num(total, 2), num(rep.domain_total("CN"), 2), num(rep.domain_total("RAN"), 2),
           num(rep.domain_total("TN"), 2), num(rep.domain_total("E2E"), 2), std::to_string(rep.substeps.size()),
           num(100.0 * rep.step_total(2) / total, 2), num(100.0 * rep.domain_total("CN") / total, 2)});
    r.summary["total_s"][scenario_name(s)] = round_to(total, 6);
    r.summary["substeps"][scenario_name(s)] = rep.substeps.size();
  }
  r.datasets.push_back(w.done());
  return r;
}

ExperimentResult step_breakdown(const Config& cfg) {
  ExperimentResult r{"step-breakdown", {}, Json::object()};
  CsvWriter sub(r.experiment, "step-breakdown.substeps", "time:s(virtual);efficiency:actions/s", cfg.digest(),
                {"scenario", "substep", "step", "domain", "kind", "start_s", "end_s", "duration_s", "actions", "reuse",
                 "efficiency_actions_per_s"});
  CsvWriter steps(r.experiment, "step-breakdown.steps", "time:s(virtual);efficiency:actions/s;share:percent",
                  cfg.digest(), {"scenario", "step", "duration_s", "actions", "efficiency_actions_per_s", "share_pct"});
  for (Scenario s : kAllScenarios) {
    Engine e(cfg);
    const auto nsi = e.submit(default_request(s, "breakdown-" + lower(scenario_name(s))));
    const auto& rep = *e.orchestrator().report(nsi.id);
    const double t0 = rep.started_at;
    std::map<std::string, StepEfficiency> eff;
    for (const auto& x : step_efficiency(rep)) eff[x.group] = x;
    for (const auto& rec : rep.substeps) {
      const auto& x = eff.at(rec.id);
      sub.add({scenario_name(s), rec.id, std::to_string(rec.step), rec.domain, rec.kind, num(rec.start - t0, 2),
               num(rec.end - t0, 2), num(rec.duration(), 2), std::to_string(rec.actions), rec.reuse ? "1" : "0",
               x.reuse ? "" : num(x.efficiency, 4)});
    }
    for (int step = 1; step <= 6; ++step) {
      const auto it = eff.find(std::to_string(step));
      if (it == eff.end()) continue;
      const auto& x = it->second;
      steps.add({scenario_name(s), std::to_string(step), num(x.duration, 2), std::to_string(x.actions),
                 x.reuse ? "" : num(x.efficiency, 4), num(100.0 * x.duration / rep.total(), 2)});
    }
    Json sj{{"substeps", rep.substeps.size()},
            {"total_s", round_to(rep.total(), 6)},
            {"step2_share", round_to(rep.step_total(2) / rep.total(), 6)},
            {"cn_share", round_to(rep.domain_total("CN") / rep.total(), 6)}};
    r.summary[scenario_name(s)] = sj;
  }
  r.datasets.push_back(sub.done());
  r.datasets.push_back(steps.done());
  return r;
}

ExperimentResult attach_latency(const Config& cfg) {
  constexpr std::size_t kSamples = 200;
  ExperimentResult r{"attach-latency", {}, Json::object()};
  CsvWriter samples(r.experiment, "attach-latency.samples", "latency:ms;time:s(virtual)", cfg.digest(),
                    {"scenario", "index", "t_s", "latency_ms"});
  CsvWriter stats(r.experiment, "attach-latency.summary", "latency:ms", cfg.digest(),
                  {"scenario", "samples", "median_ms", "mean_ms", "p95_ms", "p95_over_median", "model_median_ms"});

  Engine e(cfg);
  std::map<Scenario, std::string> amf;
  for (Scenario s : kAllScenarios) {
    const auto nsi = e.submit(default_request(s, "attach-" + lower(scenario_name(s))));
    amf[s] = e.orchestrator().amf_workload(nsi.id);
  }
  const double t0 = e.now();
  AttachModel model(cfg.attach, cfg.seed);
  std::map<Scenario, std::vector<double>> lat;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double t = t0 + 0.5 * static_cast<double>(i);
    e.advance(t);
    for (Scenario s : kAllScenarios) {
      const double v = model.attempt(s, e.platform(), amf[s], t, 0, true);
      lat[s].push_back(v);
      samples.add({scenario_name(s), std::to_string(i), num(t - t0, 1), num(v, 3)});
    }
  }
  for (Scenario s : kAllScenarios) {
    const auto& v = lat[s];
    double sum = 0;
    for (double x : v) sum += x;
    const double med = median(v);
    const double mean = sum / static_cast<double>(v.size());
    const double p95 = percentile(v, 0.95);
    stats.add({scenario_name(s), std::to_string(v.size()), num(med, 3), num(mean, 3), num(p95, 3), num(p95 / med, 4),
               num(model.median_ms(s), 3)});
    r.summary["median_ms"][scenario_name(s)] = round_to(med, 6);
    r.summary["mean_ms"][scenario_name(s)] = round_to(mean, 6);
  }
  const auto& m = r.summary["median_ms"];
  const auto& a = r.summary["mean_ms"];
  const std::string u = scenario_name(Scenario::kURLLC);
  const std::string sh = scenario_name(Scenario::kSharedEMBB);
  r.summary["urllc_over_shared_median"] = round_to(m[u].get<double>() / m[sh].get<double>(), 6);
  r.summary["urllc_over_shared_mean"] = round_to(a[u].get<double>() / a[sh].get<double>(), 6);
  r.summary["reduction_pct_median"] = round_to(100.0 * (1.0 - r.summary["urllc_over_shared_median"].get<double>()), 4);
  r.datasets.push_back(samples.done());
  r.datasets.push_back(stats.done());
  return r;
}

struct ReconfigRun {
  std::unique_ptr<Engine> engine;
  std::string nsi_id;
  std::string amf;
  double t0 = 0;
};

ReconfigRun shared_slice(const Config& cfg, const std::string& name) {
  ReconfigRun run;
  run.engine = std::make_unique<Engine>(cfg);
  const auto nsi = run.engine->submit(default_request(Scenario::kSharedEMBB, name));
  run.nsi_id = nsi.id;
  run.amf = run.engine->orchestrator().amf_workload(nsi.id);
  run.t0 = run.engine->now();
  return run;
}

ExperimentResult reconfig_availability(const Config& cfg) {
  constexpr double kHorizon = 60.0;
  constexpr double kOverloadAt = 9.0;
  ExperimentResult r{"reconfig-availability", {}, Json::object()};
  const double period = cfg.telemetry.sampling_period_s;
  auto run = shared_slice(cfg, "reconfig-availability");
  Engine& e = *run.engine;
  const auto snssai = e.get(run.nsi_id)->snssai;

  AssuranceRule rule{"amf-cpu-overload", "amf_cpu_utilization", cfg.autoscaler.scale_up, Direction::kAtMost, 3,
                     ActionKind::kReplaceAmf, run.amf};
  ClosedLoop loop({rule}, [&](const AssuranceRule&, const KpiRecord&) {
    e.begin_reconfigure(run.nsi_id);
    return Json{{"nsi_id", run.nsi_id}, {"operation", "modify_nsi"}};
  });

  std::map<long, double> util;
  const auto n = static_cast<long>(std::floor(kHorizon / period + 1e-9));
  for (long i = 0; i < n; ++i) {
    const double rel = i * period;
    const double t = run.t0 + rel;
    e.advance(t);
    if (!e.platform().ready_at(run.amf, t)) continue;
    const auto* rc = e.orchestrator().reconfig(run.nsi_id);
    double u = 0.45;
    if (rc && rc->amf_ready_at && t >= *rc->amf_ready_at) {
      u = 0.40;
    } else if (!rc && rel >= kOverloadAt) {
      u = 0.92;
    }
    util[i] = u;
    loop.observe({t, snssai, rule.metric, u, "CN", run.amf});
  }
  e.run_until_settled();

  const auto series = e.availability(run.nsi_id, run.t0, run.t0 + kHorizon, period);
  CsvWriter w(r.experiment, "reconfig-availability", "time:s(relative);availability:binary;utilization:fraction",
              cfg.digest(), {"t_s", "availability", "amf_cpu_utilization"});
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto it = util.find(static_cast<long>(i));
    w.add({num(series[i].t - run.t0, 1), std::to_string(series[i].up), it == util.end() ? "" : num(it->second, 3)});
  }
  CsvWriter acts(r.experiment, "reconfig-availability.actions", "time:s(relative)", cfg.digest(),
                 {"t_s", "rule", "action", "target", "snssai", "before", "after"});
  for (const auto& a : loop.actions()) {
    acts.add({num(a.t - run.t0, 1), a.rule, a.action, a.target, a.snssai, num(a.before, 3),
              a.after ? num(*a.after, 3) : ""});
  }
  const auto* rc = e.orchestrator().reconfig(run.nsi_id);
  Json runs = Json::array();
  for (double x : outage_runs(series, period)) runs.push_back(round_to(x, 6));
  r.summary = {{"outage_runs_s", runs},
               {"availability_fraction", round_to(availability_fraction(series), 6)},
               {"actions", loop.actions().size()},
               {"reconfig_start_s", rc ? round_to(rc->started_at - run.t0, 6) : -1.0},
               {"amf_ready_s", rc && rc->amf_ready_at ? round_to(*rc->amf_ready_at - run.t0, 6) : -1.0},
               {"reconfig_end_s", rc && rc->finished_at ? round_to(*rc->finished_at - run.t0, 6) : -1.0},
               {"udr_unchanged", rc && rc->udr_digest_before == rc->udr_digest_after}};
  r.datasets.push_back(w.done());
  r.datasets.push_back(acts.done());
  return r;
}

// Latency seen by a registration at time t, or nullopt when it times out.
using Probe = std::function<std::optional<double>(double)>;

std::vector<std::pair<double, std::optional<double>>> sample_trace(Engine& e, double t0, double horizon, double period,
                                                                   const std::map<long, std::function<void()>>& at,
                                                                   const Probe& probe) {
  std::vector<std::pair<double, std::optional<double>>> out;
  const auto n = static_cast<long>(std::floor(horizon / period + 1e-9));
  for (long i = 0; i < n; ++i) {
    const double t = t0 + i * period;
    e.advance(t);
    if (auto it = at.find(i); it != at.end()) it->second();
    out.emplace_back(i * period, probe(t));
  }
  return out;
}

ExperimentResult reconfig_latency(const Config& cfg) {
  constexpr double kHorizon = 60.0;
  constexpr double kTrigger = 10.0;
  ExperimentResult r{"reconfig-latency", {}, Json::object()};
  const double period = cfg.telemetry.sampling_period_s;
  const auto idx = [&](double rel) { return std::lround(rel / period); };
  AttachModel model(cfg.attach, cfg.seed);

  auto orch = shared_slice(cfg, "reconfig-latency-orchestrated");
  const auto orchestrated = sample_trace(
      *orch.engine, orch.t0, kHorizon, period, {{idx(kTrigger), [&] { orch.engine->begin_reconfigure(orch.nsi_id); }}},
      [&](double t) -> std::optional<double> {
        try {
          return model.attempt(Scenario::kSharedEMBB, orch.engine->platform(), orch.amf, t);
        } catch (const Error& err) {
          if (err.code() != Errc::kNoAmfAvailable) throw;
          return std::nullopt;
        }
      });

  // Without orchestration the AMF drains, is torn down and restarted from scratch.
  auto bare = shared_slice(cfg, "reconfig-latency-bare");
  const auto& br = cfg.latency.bare_restart;
  const double drain_at = bare.t0 + kTrigger;
  const double restart_at = drain_at + br.drain_s;
  Platform& bp = bare.engine->platform();
  const std::string owner = bare.amf.substr(0, bare.amf.find('/'));
  const NfProfile profile = bp.workload(bare.amf)->profile;
  bare.engine->clock().schedule(restart_at, [&, owner, profile] {
    bp.delete_workload(bare.amf, 0.0, [&, owner, profile](bool) {
      SubstepTiming timing = br.restart;
      timing.probe_s += br.ng_resetup_s;
      bp.apply_release(owner, profile, cfg.shared_site, timing);
    });
  });
  const auto unorchestrated = sample_trace(
      *bare.engine, bare.t0, kHorizon, period, {{idx(kTrigger), [&] { bp.start_drain(bare.amf); }}},
      [&](double t) -> std::optional<double> {
        const auto* w = bp.workload(bare.amf);
        try {
          const double v = model.attempt(Scenario::kSharedEMBB, bp, bare.amf, t);
          if (w && w->phase == WorkloadPhase::kDraining) {
            return model.drain_latency_ms(model.median_ms(Scenario::kSharedEMBB), t - drain_at, br.drain_s);
          }
          return v;
        } catch (const Error& err) {
          if (err.code() != Errc::kNoAmfAvailable) throw;
          return std::nullopt;
        }
      });

  CsvWriter w(r.experiment, "reconfig-latency", "time:s(relative);latency:ms;status:ok|timeout", cfg.digest(),
              {"t_s", "orchestrated_status", "orchestrated_ms", "no_orchestration_status", "no_orchestration_ms"});
  auto cell = [](const std::optional<double>& v) { return v ? num(*v, 3) : std::string(); };
  for (std::size_t i = 0; i < orchestrated.size(); ++i) {
    const auto& a = orchestrated[i].second;
    const auto& b = unorchestrated[i].second;
    w.add({num(orchestrated[i].first, 1), a ? "ok" : "timeout", cell(a), b ? "ok" : "timeout", cell(b)});
  }

  auto describe = [&](const std::vector<std::pair<double, std::optional<double>>>& tr) {
    double peak = 0;
    std::optional<double> first_fail, last_fail;
    std::size_t failures = 0;
    for (const auto& [t, v] : tr) {
      if (v) {
        peak = std::max(peak, *v);
      } else {
        ++failures;
        if (!first_fail) first_fail = t;
        last_fail = t;
      }
    }
    Json j{{"peak_ms", round_to(peak, 6)}, {"timeouts", failures}};
    if (first_fail) {
      j["timeout_from_s"] = round_to(*first_fail, 6);
      j["timeout_until_s"] = round_to(*last_fail + period, 6);
    }
    return j;
  };
  r.summary = {{"orchestrated", describe(orchestrated)},
               {"no_orchestration", describe(unorchestrated)},
               {"baseline_ms", round_to(model.median_ms(Scenario::kSharedEMBB), 6)}};
  r.datasets.push_back(w.done());
  return r;
}

ExperimentResult slice_usage(const Config& cfg) {
  constexpr int kUes = 12;
  constexpr double kFirstArrival = 9.0;
  constexpr double kInterArrival = 7.0;
  constexpr double kHorizon = 100.0;
  ExperimentResult r{"slice-usage", {}, Json::object()};
  Engine e(cfg);
  const auto a = e.submit(default_request(Scenario::kURLLC, "admission-slice-a"));
  const auto b = e.submit(default_request(Scenario::kURLLC, "admission-slice-b"));
  const double t0 = e.now();
  AdmissionController ac(cfg.admission_cap);
  ac.add_slice(a.id);
  ac.add_slice(b.id);
  AttachModel model(cfg.attach, cfg.seed);

  CsvWriter ev(r.experiment, "slice-usage.events", "time:s(relative);latency:ms", cfg.digest(),
               {"t_s", "ue", "slice", "kind", "attach_ms"});
  std::map<std::string, std::vector<std::pair<double, int>>> counts;
  for (int k = 0; k < kUes; ++k) {
    const double rel = kFirstArrival + kInterArrival * k;
    e.advance(t0 + rel);
    char ue[16];
    std::snprintf(ue, sizeof(ue), "ue-%02d", k + 1);
    const std::size_t before = ac.events().size();
    std::string slice;
    try {
      slice = ac.admit(ue, rel);
    } catch (const Error& err) {
      if (err.code() != Errc::kNoCapacity) throw;
      ev.add({num(rel, 1), ue, "", "reject", ""});
      continue;
    }
    const double ms = model.attempt(Scenario::kURLLC, e.platform(), e.orchestrator().amf_workload(slice), t0 + rel);
    for (std::size_t i = before; i < ac.events().size(); ++i) {
      const auto& x = ac.events()[i];
      ev.add({num(x.t, 1), x.ue, x.slice, x.kind, x.kind == "admit" ? num(ms, 3) : ""});
    }
  }

  CsvWriter w(r.experiment, "slice-usage", "time:s(relative);count:UEs", cfg.digest(), {"t_s", "slice_a_ues", "slice_b_ues"});
  int ca = 0, cb = 0, peak_a = 0;
  std::size_t next = 0;
  const auto& events = ac.events();
  for (int s = 0; s <= static_cast<int>(kHorizon); ++s) {
    while (next < events.size() && events[next].t <= s) {
      const auto& x = events[next++];
      const int d = x.kind == "admit" ? 1 : x.kind == "detach" ? -1 : 0;
      (x.slice == a.id ? ca : cb) += d;
    }
    peak_a = std::max(peak_a, ca);
    w.add({std::to_string(s), std::to_string(ca), std::to_string(cb)});
  }
  Json assignment = Json::object();
  for (int k = 1; k <= kUes; ++k) {
    char ue[16];
    std::snprintf(ue, sizeof(ue), "ue-%02d", k);
    const auto slice = ac.slice_of(ue);
    assignment[ue] = !slice ? "rejected" : *slice == a.id ? "A" : "B";
  }
  r.summary = {{"slice_a", a.id},           {"slice_b", b.id},           {"cap", ac.cap()},
               {"peak_a", ac.peak(a.id)},   {"peak_b", ac.peak(b.id)},   {"assignment", assignment},
               {"trace_peak_a", peak_a}};
  r.datasets.push_back(w.done());
  r.datasets.push_back(ev.done());
  return r;
}

struct BatchRun {
  std::unique_ptr<Engine> engine;
  std::vector<std::string> ids;
  std::vector<double> submitted;      // batch submission times
  std::vector<double> onboarded;      // last release from onboarding per batch
  std::vector<double> operative;      // all slices of the batch active
};

BatchRun batch_run(const Config& cfg, const std::vector<double>& batches, int per_batch, double horizon) {
  BatchRun run;
  run.engine = std::make_unique<Engine>(cfg);
  Engine& e = *run.engine;
  int n = 0;
  std::vector<std::vector<std::string>> groups;
  for (double at : batches) {
    e.advance(at);
    run.submitted.push_back(at);
    groups.emplace_back();
    for (int k = 0; k < per_batch; ++k) {
      const auto id = e.submit_async(default_request(Scenario::kURLLC, "tenant-slice-" + std::to_string(++n)));
      groups.back().push_back(id);
      run.ids.push_back(id);
    }
  }
  e.advance(horizon);
  for (const auto& g : groups) {
    double start = 0, done = 0;
    for (const auto& id : g) {
      const auto* rep = e.orchestrator().report(id);
      start = std::max(start, rep->started_at);
      const auto nsi = e.get(id);
      if (!nsi || !nsi->activated_at) throw Error(Errc::kDomainDeployFailure, "slice " + id + " did not activate");
      done = std::max(done, *nsi->activated_at);
    }
    run.onboarded.push_back(start);
    run.operative.push_back(done);
  }
  return run;
}

std::vector<UsagePoint> usage_trace(const Platform& p, double horizon, double period) {
  std::vector<UsagePoint> out;
  const auto n = static_cast<long>(std::floor(horizon / period + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double t = i * period;
    const auto [cpu, ram] = p.usage_at(t);
    out.push_back({t, cpu, ram / 1000.0});
  }
  return out;
}

ExperimentResult resource_usage(const Config& cfg) {
  constexpr double kHorizon = 90.0;
  ExperimentResult r{"resource-usage", {}, Json::object()};
  auto run = batch_run(cfg, {10.0}, 5, kHorizon);
  Engine& e = *run.engine;
  const double period = cfg.telemetry.sampling_period_s;
  const auto usage = usage_trace(e.platform(), kHorizon, period);
  const std::vector<CostMarker> markers{{run.submitted[0], "batch-submitted"},
                                        {run.onboarded[0], "instantiation-started"},
                                        {run.operative[0], "all-deployed"}};

  CsvWriter w(r.experiment, "resource-usage", "time:s(virtual);cpu:vCPU;ram:GB(1000 MB)", cfg.digest(),
              {"t_s", "vcpu", "ram_gb", "active_slices", "marker"});
  double peak_cpu = 0, peak_ram = 0;
  for (std::size_t i = 0; i < usage.size(); ++i) {
    const auto& u = usage[i];
    int active = 0;
    for (const auto& id : run.ids) {
      const auto nsi = e.get(id);
      if (nsi->activated_at && *nsi->activated_at <= u.t) ++active;
    }
    std::string label;
    const double next = i + 1 < usage.size() ? usage[i + 1].t : u.t + period;
    for (const auto& m : markers) {
      if (m.t >= u.t && m.t < next) label += (label.empty() ? "" : ";") + m.label;
    }
    peak_cpu = std::max(peak_cpu, u.vcpu);
    peak_ram = std::max(peak_ram, u.ram_gb);
    w.add({num(u.t, 1), num(u.vcpu, 4), num(u.ram_gb, 4), std::to_string(active), label});
  }

  CsvWriter per(r.experiment, "resource-usage.per-slice", "time:s(virtual);cpu:vCPU;ram:MB", cfg.digest(),
                {"nsi_id", "snssai", "active_from_s", "mean_vcpu", "mean_ram_mb", "samples", "outliers"});
  double sum_cpu = 0, sum_ram = 0;
  for (std::size_t k = 0; k < run.ids.size(); ++k) {
    const auto nsi = *e.get(run.ids[k]);
    TelemetryStream stream;
    collect_telemetry(e.platform(), {nsi}, *nsi.activated_at, kHorizon, cfg.telemetry, cfg.seed + k, stream);
    const auto c = stream.summary(nsi.snssai, "cpu_vcpu", cfg.telemetry.outlier_sigma);
    const auto m = stream.summary(nsi.snssai, "ram_mb", cfg.telemetry.outlier_sigma);
    sum_cpu += c.mean;
    sum_ram += m.mean;
    per.add({nsi.id, nsi.snssai.str(), num(*nsi.activated_at, 2), num(c.mean, 4), num(m.mean, 2),
             std::to_string(c.count), std::to_string(c.excluded)});
  }
  const double n = static_cast<double>(run.ids.size());
  Json mk = Json::array();
  for (const auto& m : markers) mk.push_back({{"t_s", round_to(m.t, 6)}, {"label", m.label}});
  r.summary = {{"peak_vcpu", round_to(peak_cpu, 6)},
               {"peak_ram_gb", round_to(peak_ram, 6)},
               {"mean_slice_vcpu", round_to(sum_cpu / n, 6)},
               {"mean_slice_ram_mb", round_to(sum_ram / n, 6)},
               {"markers", mk}};
  r.datasets.push_back(w.done());
  r.datasets.push_back(per.done());
  return r;
}

ExperimentResult cost_curves(const Config& cfg) {
  constexpr double kHorizon = 140.0;
  ExperimentResult r{"cost-curves", {}, Json::object()};
  auto run = batch_run(cfg, {10.0, 60.0}, 5, kHorizon);
  const auto usage = usage_trace(run.engine->platform(), kHorizon, cfg.telemetry.sampling_period_s);
  const auto printed = printed_cost_models();
  const std::vector<TierCostModel> models{printed.at("Edge"), printed.at("Metropolitan"), printed.at("Central")};
  std::vector<CostMarker> markers{{run.submitted[0], "batch1-submitted"},
                                  {run.operative[0], "batch1-operative"},
                                  {run.submitted[1], "batch2-submitted"},
                                  {run.operative[1], "all-operative"}};
  std::sort(markers.begin(), markers.end(), [](const auto& x, const auto& y) { return x.t < y.t; });
  const auto trace = cost_trace(models, usage, markers);
  Dataset curves{"cost-curves",
                 "# experiment=cost-curves dataset=cost-curves units=time:s(virtual);cpu:vCPU;ram:GB;cost:USD/month "
                 "config_digest=" + cfg.digest() + "\n" + trace.to_csv()};

  CsvWriter mw(r.experiment, "cost-curves.models", "a:USD/vCPU-month;b:USD/GB-month;c:USD/month", cfg.digest(),
               {"tier", "source", "a", "b", "c", "residual_norm"});
  const auto table = parse_price_table(cfg.price_table_csv);
  Json fitted = Json::object();
  for (const auto& m : models) {
    mw.add({m.tier, "printed", num(m.a, 4), num(m.b, 4), num(m.c, 4), ""});
  }
  for (const auto& m : models) {
    const auto f = fit_cost_model(table, m.tier);
    mw.add({f.tier, "fitted", num(f.a, 4), num(f.b, 4), num(f.c, 4), num(f.residual_norm, 6)});
    fitted[f.tier] = {round_to(f.a, 6), round_to(f.b, 6), round_to(f.c, 6)};
  }

  auto at = [&](double t) {
    UsagePoint best = usage.front();
    for (const auto& u : usage) {
      if (u.t <= t + 1e-9) best = u;
    }
    return best;
  };
  Json points = Json::array();
  for (std::size_t b = 0; b < run.operative.size(); ++b) {
    const auto u = at(run.operative[b]);
    points.push_back({{"slices", 5 * (b + 1)},
                      {"t_s", round_to(u.t, 6)},
                      {"vcpu", round_to(u.vcpu, 6)},
                      {"ram_gb", round_to(u.ram_gb, 6)},
                      {"edge_usd", round_to(models[0].predict(u.vcpu, u.ram_gb), 4)},
                      {"metro_usd", round_to(models[1].predict(u.vcpu, u.ram_gb), 4)},
                      {"central_usd", round_to(models[2].predict(u.vcpu, u.ram_gb), 4)},
                      {"edge_vs_central_pct", round_to(tier_variation(models[0], models[2], u.vcpu, u.ram_gb), 4)}});
  }
  Json mk = Json::array();
  for (const auto& m : markers) mk.push_back({{"t_s", round_to(m.t, 6)}, {"label", m.label}});
  r.summary = {{"operating_points", points}, {"fitted", fitted}, {"markers", mk}};
  r.datasets.push_back(std::move(curves));
  r.datasets.push_back(mw.done());
  return r;
}

using Runner = ExperimentResult (*)(const Config&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m{
      {"deployment-times", deployment_times}, {"step-breakdown", step_breakdown},
      {"attach-latency", attach_latency},     {"reconfig-availability", reconfig_availability},
      {"reconfig-latency", reconfig_latency}, {"slice-usage", slice_usage},
      {"resource-usage", resource_usage},     {"cost-curves", cost_curves}};
  return m;
}

}  // namespace

const Dataset& ExperimentResult::dataset(const std::string& name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return d;
  }
  throw Error(Errc::kNotFound, "experiment " + experiment + " has no dataset " + name);
}

Json ExperimentResult::to_json() const {
  Json ds = Json::object();
  for (const auto& d : datasets) ds[d.name] = d.csv;
  return {{"experiment", experiment}, {"datasets", ds}, {"summary", summary}};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"deployment-times", "step-breakdown",   "attach-latency",
                                              "reconfig-availability", "reconfig-latency", "slice-usage",
                                              "resource-usage",   "cost-curves"};
  return names;
}

ExperimentResult run_experiment(const std::string& name, const Config& config) {
  const auto it = runners().find(name);
  if (it == runners().end()) {
    throw Error(Errc::kUnknownExperiment, "unknown experiment '" + name + "'",
                {{"name", name}, {"known", experiment_names()}});
  }
  return it->second(config);
}

std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& d : result.datasets) {
    const auto path = dir / (d.name + ".csv");
    std::ofstream(path, std::ios::binary) << d.csv;
    written.push_back(path);
  }
  const auto path = dir / (result.experiment + ".summary.json");
  std::ofstream(path, std::ios::binary) << result.summary.dump(2) << "\n";
  written.push_back(path);
  return written;
}

}  // namespace nsaas
