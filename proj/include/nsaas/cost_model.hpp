#pragma once

#include <map>
#include <string>
#include <vector>

namespace nsaas {

struct InstanceSpec {
  std::string tier;  // Edge | Metropolitan | Central
  std::string size;
  double vcpu = 0;
  double ram_gb = 0;
  double storage_gb = 0;
  double price = 0;  // $/month
};

// "$70,88" -> 70.88. Accepts dot decimals too.
double parse_price(const std::string& text);

// CSV with header type,size,vcpu,ram_gb,storage_gb,price_month; quoted fields allowed.
std::vector<InstanceSpec> parse_price_table(const std::string& csv);

struct TierCostModel {
  std::string tier;
  double a = 0;  // $ per vCPU-month
  double b = 0;  // $ per GB-month
  double c = 0;  // intercept
  double residual_norm = 0;

  double predict(double vcpu, double ram_gb) const { return a * vcpu + b * ram_gb + c; }
};

// Ordinary least squares of price on (vcpu, ram_gb, 1) over the tier's rows. Throws
// RankDeficient with fewer than 3 rows or a singular design.
TierCostModel fit_cost_model(const std::vector<InstanceSpec>& table, const std::string& tier);

inline double predict_cost(const TierCostModel& m, double vcpu, double ram_gb) { return m.predict(vcpu, ram_gb); }

// Reference coefficients as printed, not fitted.
std::map<std::string, TierCostModel> printed_cost_models();

// 100 * (edge - central) / central at the operating point.
double tier_variation(const TierCostModel& edge, const TierCostModel& central, double vcpu, double ram_gb);

struct UsagePoint {
  double t = 0;
  double vcpu = 0;
  double ram_gb = 0;
};

struct CostMarker {
  double t = 0;
  std::string label;
};

struct CostTrace {
  std::vector<std::string> tiers;
  std::vector<UsagePoint> usage;
  std::vector<std::vector<double>> cost;  // [tier][sample]
  std::vector<CostMarker> markers;

  std::string to_csv() const;
};

CostTrace cost_trace(const std::vector<TierCostModel>& models, const std::vector<UsagePoint>& usage,
                     std::vector<CostMarker> markers = {});

}  // namespace nsaas
