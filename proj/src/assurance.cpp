#include "nsaas/assurance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nsaas/digest.hpp"
#include "nsaas/error.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// Telemetry

void to_json(Json& j, const KpiRecord& r) {
  j = {{"t", r.t},
       {"snssai", r.snssai ? Json(r.snssai->str()) : Json(nullptr)},
       {"metric", r.metric},
       {"value", r.value},
       {"domain", r.domain},
       {"source", r.source}};
}

Aggregate aggregate(const std::vector<double>& values, double sigma) {
  std::vector<double> kept = values;
  Aggregate a;
  while (!kept.empty()) {
    const double n = static_cast<double>(kept.size());
    const double mean = std::accumulate(kept.begin(), kept.end(), 0.0) / n;
    double var = 0;
    for (double v : kept) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    a.mean = mean;
    a.stddev = sd;
    if (sd == 0) break;
    const auto before = kept.size();
    kept.erase(std::remove_if(kept.begin(), kept.end(), [&](double v) { return std::abs(v - mean) > sigma * sd; }),
               kept.end());
    if (kept.size() == before) break;
  }
  a.count = kept.size();
  a.excluded = values.size() - kept.size();
  return a;
}

void TelemetryStream::ingest(KpiRecord r) {
  if (!r.snssai) {
    throw Error(Errc::kValidation, "telemetry record without S-NSSAI rejected by enrichment",
                {{"metric", r.metric}, {"source", r.source}, {"t", r.t}});
  }
  records_.push_back(std::move(r));
}

std::vector<KpiRecord> TelemetryStream::series(const SNssai& snssai, const std::string& metric) const {
  std::vector<KpiRecord> out;
  for (const auto& r : records_) {
    if (*r.snssai == snssai && r.metric == metric) out.push_back(r);
  }
  return out;
}

std::vector<double> TelemetryStream::values(const SNssai& snssai, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : records_) {
    if (*r.snssai == snssai && r.metric == metric) out.push_back(r.value);
  }
  return out;
}

Aggregate TelemetryStream::summary(const SNssai& snssai, const std::string& metric, double sigma) const {
  return aggregate(values(snssai, metric), sigma);
}

std::string TelemetryStream::to_csv() const {
  std::string out = "t_s,snssai,metric,value,domain,source\n";
  char buf[64];
  for (const auto& r : records_) {
    std::snprintf(buf, sizeof(buf), "%.3f", r.t);
    out += buf;
    out += "," + r.snssai->str() + "," + r.metric + ",";
    std::snprintf(buf, sizeof(buf), "%.6g", r.value);
    out += buf;
    out += "," + r.domain + "," + r.source + "\n";
  }
  return out;
}

std::string TelemetryStream::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) out += canonical(Json(r)) + "\n";
  return out;
}

void collect_telemetry(const Platform& platform, const std::vector<Nsi>& slices, double from, double to,
                       const TelemetryConfig& cfg, std::uint64_t seed, TelemetryStream& out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<long>(std::floor((to - from) / cfg.sampling_period_s + 1e-9));
  for (long i = 0; i < n; ++i) {
    const double t = from + i * cfg.sampling_period_s;
    for (const auto& s : slices) {
      const auto [cpu, ram] = platform.usage_at(t, s.id);
      const double k = 1.0 + cfg.usage_jitter * noise(rng);
      out.ingest({t, s.snssai, "cpu_vcpu", cpu * k, "E2E", s.id});
      out.ingest({t, s.snssai, "ram_mb", ram * k, "E2E", s.id});
    }
  }
}

// ---------------------------------------------------------------------------
// Attach

const AttachProfile& AttachModel::profile(Scenario s) const {
  auto it = cfg_.profiles.find(s);
  if (it == cfg_.profiles.end()) {
    throw Error(Errc::kUnknownScenario, "no attach profile for " + std::string(to_string(s)));
  }
  return it->second;
}

double AttachModel::median_ms(Scenario s, int concurrent_ues) const {
  const auto& p = profile(s);
  return p.deterministic_ms(concurrent_ues) + p.backoff_mean_ms * std::log(2.0);
}

double AttachModel::sample_ms(Scenario s, int concurrent_ues) {
  const auto& p = profile(s);
  const double base = p.deterministic_ms(concurrent_ues);
  std::normal_distribution<double> jitter(0.0, cfg_.jitter);
  double v = base * (1.0 + jitter(rng_));
  if (p.backoff_mean_ms > 0) {
    std::exponential_distribution<double> backoff(1.0 / p.backoff_mean_ms);
    v += backoff(rng_);
  }
  return std::max(v, 0.0);
}

std::vector<double> AttachModel::samples(Scenario s, std::size_t n, int concurrent_ues) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_ms(s, concurrent_ues));
  return out;
}

double AttachModel::recovery_penalty_ms(double since_ready_s) const {
  if (since_ready_s < 0) return 0;
  return cfg_.recovery_penalty_ms * std::pow(cfg_.recovery_decay_per_s, since_ready_s);
}

double AttachModel::drain_latency_ms(double base_ms, double elapsed_s, double drain_s) const {
  const double f = std::clamp(elapsed_s / drain_s, 0.0, 1.0);
  return base_ms + (cfg_.drain_peak_ms - base_ms) * f;
}

double AttachModel::attempt(Scenario s, const Platform& platform, const std::string& amf_workload, double t,
                            int concurrent_ues, bool jitter) {
  const auto since = platform.ready_since(amf_workload, t);
  if (!since) {
    throw Error(Errc::kNoAmfAvailable, "registration timed out: no AMF ready",
                {{"amf", amf_workload}, {"t", t}, {"timeout_ms", cfg_.registration_timeout_ms}});
  }
  const double base = jitter ? sample_ms(s, concurrent_ues) : median_ms(s, concurrent_ues);
  // The bootstrap instant of the platform is not a recovery.
  const auto& hist = platform.workload(amf_workload)->readiness;
  const bool first = !hist.empty() && hist.front().first == *since;
  return base + (first ? 0.0 : recovery_penalty_ms(t - *since));
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

// ---------------------------------------------------------------------------
// Availability

std::vector<AvailabilitySample> track_availability(const Platform& platform, const std::string& amf_workload,
                                                   double from, double to, double period) {
  std::vector<AvailabilitySample> out;
  const auto n = static_cast<long>(std::floor((to - from) / period + 1e-9));
  for (long i = 0; i < n; ++i) {
    const double t = from + i * period;
    out.push_back({t, platform.ready_at(amf_workload, t) ? 1 : 0});
  }
  return out;
}

double availability_fraction(const std::vector<AvailabilitySample>& series) {
  if (series.empty()) return 0;
  double up = 0;
  for (const auto& s : series) up += s.up;
  return up / static_cast<double>(series.size());
}

std::vector<double> outage_runs(const std::vector<AvailabilitySample>& series, double period) {
  std::vector<double> runs;
  std::size_t run = 0;
  for (const auto& s : series) {
    if (s.up == 0) {
      ++run;
    } else if (run > 0) {
      runs.push_back(run * period);
      run = 0;
    }
  }
  if (run > 0) runs.push_back(run * period);
  return runs;
}

// ---------------------------------------------------------------------------
// Admission

void AdmissionController::add_slice(const std::string& slice) {
  if (std::find(slices_.begin(), slices_.end(), slice) == slices_.end()) slices_.push_back(slice);
}

std::string AdmissionController::admit(const std::string& ue, double t) {
  if (auto it = assignment_.find(ue); it != assignment_.end()) return it->second;
  for (const auto& s : slices_) {
    auto& c = count_[s];
    if (c >= cap_) continue;
    ++c;
    peak_[s] = std::max(peak_[s], c);
    assignment_[ue] = s;
    events_.push_back({t, ue, s, "admit"});
    if (c == cap_) events_.push_back({t, ue, s, "transition"});
    return s;
  }
  throw Error(Errc::kNoCapacity, "every slice is at its admission cap", {{"ue", ue}, {"cap", cap_}});
}

void AdmissionController::detach(const std::string& ue, double t) {
  auto it = assignment_.find(ue);
  if (it == assignment_.end()) return;
  --count_[it->second];
  events_.push_back({t, ue, it->second, "detach"});
  assignment_.erase(it);
}

int AdmissionController::count(const std::string& slice) const {
  auto it = count_.find(slice);
  return it == count_.end() ? 0 : it->second;
}

int AdmissionController::peak(const std::string& slice) const {
  auto it = peak_.find(slice);
  return it == peak_.end() ? 0 : it->second;
}

std::optional<std::string> AdmissionController::slice_of(const std::string& ue) const {
  auto it = assignment_.find(ue);
  if (it == assignment_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Closed loop

std::string_view to_string(ActionKind a) {
  switch (a) {
    case ActionKind::kScale: return "scale";
    case ActionKind::kReplaceAmf: return "replace_amf";
    case ActionKind::kRedirectAdmission: return "redirect_admission";
    case ActionKind::kAlert: return "alert";
  }
  return "?";
}

void to_json(Json& j, const ActionRecord& r) {
  j = {{"t", r.t},
       {"rule", r.rule},
       {"action", r.action},
       {"target", r.target},
       {"snssai", r.snssai},
       {"before", r.before},
       {"after", r.after ? Json(*r.after) : Json(nullptr)},
       {"outcome", r.outcome}};
}

std::vector<std::pair<std::size_t, std::size_t>> segment_episodes(const std::vector<double>& values,
                                                                  const AssuranceRule& rule) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  int breach = 0;
  int clear = 0;
  bool open = false;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (rule.breached(values[i])) {
      ++breach;
      clear = 0;
      if (!open && breach >= rule.sustain) {
        open = true;
        begin = i;
      }
    } else {
      breach = 0;
      if (open && ++clear >= rule.sustain) {
        out.emplace_back(begin, i + 1);
        open = false;
        clear = 0;
      }
    }
  }
  if (open) out.emplace_back(begin, values.size());
  return out;
}

std::optional<ActionRecord> ClosedLoop::observe(const KpiRecord& r) {
  if (!r.snssai) throw Error(Errc::kValidation, "closed loop needs enriched records", {{"metric", r.metric}});
  std::optional<ActionRecord> fired;
  for (const auto& rule : rules_) {
    if (rule.metric != r.metric) continue;
    auto& st = state_[{rule.name, r.snssai->str()}];
    if (st.pending_after) {
      log_[*st.pending_after].after = r.value;
      st.pending_after.reset();
    }
    if (rule.breached(r.value)) {
      ++st.breach_run;
      st.clear_run = 0;
      if (!st.in_episode && st.breach_run >= rule.sustain) {
        st.in_episode = true;
        ActionRecord a;
        a.t = r.t;
        a.rule = rule.name;
        a.action = std::string(to_string(rule.action));
        a.target = rule.target.empty() ? r.source : rule.target;
        a.snssai = r.snssai->str();
        a.before = r.value;
        if (dispatch_) a.outcome = dispatch_(rule, r);
        log_.push_back(a);
        st.pending_after = log_.size() - 1;
        fired = a;
      }
    } else {
      st.breach_run = 0;
      if (st.in_episode && ++st.clear_run >= rule.sustain) {
        st.in_episode = false;
        st.clear_run = 0;
      }
    }
  }
  return fired;
}

std::vector<ActionRecord> ClosedLoop::run(const std::vector<KpiRecord>& records) {
  std::vector<ActionRecord> out;
  for (const auto& r : records) {
    if (auto a = observe(r)) out.push_back(*a);
  }
  return out;
}

}  // namespace nsaas
