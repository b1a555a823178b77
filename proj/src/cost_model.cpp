#include "nsaas/cost_model.hpp"

#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

#include "nsaas/error.hpp"

namespace nsaas {

double parse_price(const std::string& text) {
  std::string raw;
  for (char ch : text) {
    if (ch != '$' && ch != ' ' && ch != '"') raw.push_back(ch);
  }
  // The last separator is the decimal mark; earlier ones group thousands.
  const auto dec = raw.find_last_of(".,");
  std::string digits;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '.' || raw[i] == ',') {
      if (i == dec) digits.push_back('.');
    } else {
      digits.push_back(raw[i]);
    }
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != digits.size()) {
    throw Error(Errc::kSchema, "cannot parse price '" + text + "'", {{"value", text}});
  }
  return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double number(const std::string& s, const char* column, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::kSchema, std::string("bad ") + column + " on line " + std::to_string(line),
              {{"column", column}, {"line", line}, {"value", s}});
}

}  // namespace

std::vector<InstanceSpec> parse_price_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<InstanceSpec> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw Error(Errc::kSchema, "price table row needs 6 columns", {{"line", lineno}, {"columns", f.size()}});
    }
    if (f[0] == "type") continue;
    InstanceSpec s{f[0], f[1], number(f[2], "vcpu", lineno), number(f[3], "ram_gb", lineno),
                   number(f[4], "storage_gb", lineno), parse_price(f[5])};
    if (s.price <= 0) throw Error(Errc::kSchema, "price must be positive", {{"line", lineno}});
    rows.push_back(s);
  }
  return rows;
}

TierCostModel fit_cost_model(const std::vector<InstanceSpec>& table, const std::string& tier) {
  std::vector<const InstanceSpec*> rows;
  for (const auto& r : table) {
    if (r.tier == tier) rows.push_back(&r);
  }
  if (rows.size() < 3) {
    throw Error(Errc::kRankDeficient, "tier '" + tier + "' needs at least 3 rows", {{"tier", tier}, {"rows", rows.size()}});
  }
  Eigen::MatrixXd X(rows.size(), 3);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X(i, 0) = rows[i]->vcpu;
    X(i, 1) = rows[i]->ram_gb;
    X(i, 2) = 1.0;
    y(i) = rows[i]->price;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw Error(Errc::kRankDeficient, "design matrix for '" + tier + "' is rank deficient", {{"tier", tier}});
  const Eigen::VectorXd beta = qr.solve(y);
  TierCostModel m;
  m.tier = tier;
  m.a = beta(0);
  m.b = beta(1);
  m.c = beta(2);
  m.residual_norm = (X * beta - y).norm();
  return m;
}

std::map<std::string, TierCostModel> printed_cost_models() {
  return {{"Edge", {"Edge", 39.42, 3.65, -22.56, 0}},
          {"Metropolitan", {"Metropolitan", 33.58, -1.46, 6.63, 0}},
          {"Central", {"Central", 15.19, 1.0, 15.99, 0}}};
}

double tier_variation(const TierCostModel& edge, const TierCostModel& central, double vcpu, double ram_gb) {
  const double c = central.predict(vcpu, ram_gb);
  return 100.0 * (edge.predict(vcpu, ram_gb) - c) / c;
}

CostTrace cost_trace(const std::vector<TierCostModel>& models, const std::vector<UsagePoint>& usage,
                     std::vector<CostMarker> markers) {
  CostTrace tr;
  tr.usage = usage;
  tr.markers = std::move(markers);
  for (const auto& m : models) {
    tr.tiers.push_back(m.tier);
    std::vector<double> series;
    series.reserve(usage.size());
    for (const auto& u : usage) series.push_back(m.predict(u.vcpu, u.ram_gb));
    tr.cost.push_back(std::move(series));
  }
  return tr;
}

std::string CostTrace::to_csv() const {
  std::string out = "t_s,vcpu,ram_gb";
  for (const auto& t : tiers) out += "," + t + "_usd_month";
  out += ",marker\n";
  char buf[64];
  for (std::size_t i = 0; i < usage.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.4f,%.4f", usage[i].t, usage[i].vcpu, usage[i].ram_gb);
    out += buf;
    for (const auto& series : cost) {
      std::snprintf(buf, sizeof(buf), ",%.4f", series[i]);
      out += buf;
    }
    std::string label;
    const double next = i + 1 < usage.size() ? usage[i + 1].t : usage[i].t + 1e9;
    for (const auto& m : markers) {
      if (m.t >= usage[i].t && m.t < next) label += (label.empty() ? "" : ";") + m.label;
    }
    out += "," + label + "\n";
  }
  return out;
}

}  // namespace nsaas
