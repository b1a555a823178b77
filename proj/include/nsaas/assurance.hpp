#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nsaas/config.hpp"
#include "nsaas/infra_sim.hpp"
#include "nsaas/slice_model.hpp"

namespace nsaas {

// ---------------------------------------------------------------------------
// Telemetry

struct KpiRecord {
  double t = 0;
  std::optional<SNssai> snssai;
  std::string metric;  // cpu_vcpu, ram_mb, attach_ms, availability, utilization, ...
  double value = 0;
  std::string domain;  // CN | RAN | TN | E2E
  std::string source;  // workload or NSI id
};

void to_json(Json& j, const KpiRecord& r);

struct Aggregate {
  double mean = 0;
  double stddev = 0;
  std::size_t count = 0;     // samples kept
  std::size_t excluded = 0;  // samples discarded as outliers
};

// Mean/stddev after iteratively discarding samples beyond +/- sigma standard deviations.
Aggregate aggregate(const std::vector<double>& values, double sigma = 3.0);

class TelemetryStream {
 public:
  // Enrichment stage: records must carry an S-NSSAI. Throws Validation otherwise.
  void ingest(KpiRecord r);
  const std::vector<KpiRecord>& raw() const { return records_; }
  std::vector<KpiRecord> series(const SNssai& snssai, const std::string& metric) const;
  std::vector<double> values(const SNssai& snssai, const std::string& metric) const;
  Aggregate summary(const SNssai& snssai, const std::string& metric, double sigma = 3.0) const;
  std::string to_csv() const;
  std::string to_jsonl() const;

 private:
  std::vector<KpiRecord> records_;
};

// Samples per-slice cpu/ram usage from the platform every `period` seconds over [from, to),
// with seeded relative gaussian noise, into the stream.
void collect_telemetry(const Platform& platform, const std::vector<Nsi>& slices, double from, double to,
                       const TelemetryConfig& cfg, std::uint64_t seed, TelemetryStream& out);

// ---------------------------------------------------------------------------
// UE attach

class AttachModel {
 public:
  AttachModel(const AttachModelConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {}

  // Noise-free latency: path + processing + queueing (+ median backoff for mMTC) + tunnel.
  double median_ms(Scenario s, int concurrent_ues = 0) const;
  // Random sample: gaussian jitter on the deterministic part plus exponential backoff.
  double sample_ms(Scenario s, int concurrent_ues = 0);
  std::vector<double> samples(Scenario s, std::size_t n, int concurrent_ues = 0);

  // Extra latency while a freshly started AMF warms up.
  double recovery_penalty_ms(double since_ready_s) const;
  // Latency ramp while an AMF drains without orchestration.
  double drain_latency_ms(double base_ms, double elapsed_s, double drain_s) const;

  // One registration attempt at time t against the serving AMF. Throws NoAmfAvailable when the
  // AMF is not ready (the attempt times out). Noise-free unless `jitter` is true.
  double attempt(Scenario s, const Platform& platform, const std::string& amf_workload, double t,
                 int concurrent_ues = 0, bool jitter = false);

  const AttachModelConfig& config() const { return cfg_; }

 private:
  const AttachProfile& profile(Scenario s) const;

  AttachModelConfig cfg_;
  std::mt19937_64 rng_;
};

double percentile(std::vector<double> values, double p);
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Availability

struct AvailabilitySample {
  double t = 0;
  int up = 0;
};

// Binary series: 1 while the AMF serving the slice is ready.
std::vector<AvailabilitySample> track_availability(const Platform& platform, const std::string& amf_workload,
                                                   double from, double to, double period);
double availability_fraction(const std::vector<AvailabilitySample>& series);
// Length of every maximal run of zeros, in seconds (count * period).
std::vector<double> outage_runs(const std::vector<AvailabilitySample>& series, double period);

// ---------------------------------------------------------------------------
// Admission control

struct AdmissionEvent {
  double t = 0;
  std::string ue;
  std::string slice;
  std::string kind;  // admit | detach | transition
};

class AdmissionController {
 public:
  explicit AdmissionController(int cap) : cap_(cap) {}

  // Slices in preference order; the first is the primary.
  void add_slice(const std::string& slice);

  // Lowest-order slice below its cap; throws NoCapacity when every slice is full.
  std::string admit(const std::string& ue, double t = 0);
  void detach(const std::string& ue, double t = 0);

  int count(const std::string& slice) const;
  int peak(const std::string& slice) const;
  int cap() const { return cap_; }
  std::optional<std::string> slice_of(const std::string& ue) const;
  const std::vector<AdmissionEvent>& events() const { return events_; }

 private:
  int cap_;
  std::vector<std::string> slices_;
  std::map<std::string, int> count_;
  std::map<std::string, int> peak_;
  std::map<std::string, std::string> assignment_;
  std::vector<AdmissionEvent> events_;
};

// ---------------------------------------------------------------------------
// Closed loop

enum class ActionKind { kScale, kReplaceAmf, kRedirectAdmission, kAlert };
std::string_view to_string(ActionKind a);

struct AssuranceRule {
  std::string name;
  std::string metric;
  double threshold = 0;
  Direction direction = Direction::kAtMost;  // breach when the metric leaves this bound
  int sustain = 3;                           // samples
  ActionKind action = ActionKind::kAlert;
  std::string target;

  bool breached(double v) const { return direction == Direction::kAtMost ? v > threshold : v < threshold; }
};

struct ActionRecord {
  double t = 0;
  std::string rule;
  std::string action;
  std::string target;
  std::string snssai;
  double before = 0;
  std::optional<double> after;  // first sample after the action
  Json outcome = Json::object();
};

void to_json(Json& j, const ActionRecord& r);

// Episode boundaries [begin, end) over a sample series: an episode opens once `sustain`
// consecutive samples breach and closes after `sustain` consecutive in-band samples.
std::vector<std::pair<std::size_t, std::size_t>> segment_episodes(const std::vector<double>& values,
                                                                  const AssuranceRule& rule);

class ClosedLoop {
 public:
  using Dispatcher = std::function<Json(const AssuranceRule&, const KpiRecord&)>;

  explicit ClosedLoop(std::vector<AssuranceRule> rules, Dispatcher dispatch = {})
      : rules_(std::move(rules)), dispatch_(std::move(dispatch)) {}

  // Feeds one record; returns the action dispatched by it, if any.
  std::optional<ActionRecord> observe(const KpiRecord& r);
  std::vector<ActionRecord> run(const std::vector<KpiRecord>& records);

  const std::vector<ActionRecord>& actions() const { return log_; }

 private:
  struct State {
    int breach_run = 0;
    int clear_run = 0;
    bool in_episode = false;
    std::optional<std::size_t> pending_after;
  };

  std::vector<AssuranceRule> rules_;
  Dispatcher dispatch_;
  std::map<std::pair<std::string, std::string>, State> state_;  // (rule, snssai)
  std::vector<ActionRecord> log_;
};

}  // namespace nsaas
