#include "nsaas/gateway.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <vector>

#include <httplib.h>

#include "nsaas/digest.hpp"
#include "nsaas/experiments.hpp"

namespace nsaas {

int http_status(Errc code) {
  switch (code) {
    case Errc::kSchema:
    case Errc::kUnknownScenario:
      return 400;
    case Errc::kNoMatch:
    case Errc::kValidation:
    case Errc::kOverrideConflict:
    case Errc::kUnclassifiable:
    case Errc::kEmptyCatalog:
    case Errc::kQuotaExceeded:
    case Errc::kNoPath:
    case Errc::kRuleConflict:
      return 422;
    case Errc::kDuplicateInFlight:
    case Errc::kConcurrentModification:
    case Errc::kInvalidState:
    case Errc::kSequenceConflict:
      return 409;
    case Errc::kNotFound:
    case Errc::kUnknownExperiment:
      return 404;
    case Errc::kPoolExhausted:
    case Errc::kNoCapacity:
    case Errc::kNoAmfAvailable:
      return 503;
    default:
      return 500;
  }
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : path) {
    if (ch == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::map<std::string, std::string> parse_query(const std::string& q) {
  std::map<std::string, std::string> out;
  std::istringstream in(q);
  std::string pair;
  while (std::getline(in, pair, '&')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    out[pair.substr(0, eq)] = eq == std::string::npos ? "" : httplib::detail::decode_url(pair.substr(eq + 1), true);
  }
  return out;
}

double query_number(const std::map<std::string, std::string>& q, const std::string& key, double fallback) {
  const auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::kSchema, "query parameter '" + key + "' must be a number", {{"field", key}});
}

HttpResponse json_response(int status, const Json& body) { return {status, body.dump(), "application/json", {}}; }

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

Gateway::Gateway(Engine& engine, double realtime_factor) : engine_(engine), realtime_factor_(realtime_factor) {}

Gateway::~Gateway() { stop(); }

HttpResponse Gateway::handle(const std::string& method, const std::string& target, const std::string& body) {
  const auto qpos = target.find('?');
  const std::string path = target.substr(0, qpos);
  const auto query = qpos == std::string::npos ? std::map<std::string, std::string>{} : parse_query(target.substr(qpos + 1));
  try {
    return route(method, path, query, body);
  } catch (const Error& err) {
    return error_response(err, method, target, body);
  } catch (const std::exception& ex) {
    return error_response(Error(Errc::kDomainDeployFailure, ex.what()), method, target, body);
  }
}

HttpResponse Gateway::error_response(const Error& err, const std::string& method, const std::string& target,
                                     const std::string& body) {
  const int status = http_status(err.code());
  Json j = err.to_json();
  HttpResponse r = json_response(status, j);
  if (status >= 500) {
    const auto trace = "trace-" + sha256_hex(method + " " + target + "\n" + body + "\n" + fmt_num(engine_.now()) + err.what()).substr(0, 16);
    j["trace_id"] = trace;
    r = json_response(status, j);
    r.headers["X-Trace-Id"] = trace;
  }
  return r;
}

HttpResponse Gateway::route(const std::string& method, const std::string& path,
                            const std::map<std::string, std::string>& query, const std::string& body) {
  const auto seg = split_path(path);
  auto not_allowed = [&] {
    return json_response(405, {{"reason", "MethodNotAllowed"}, {"message", method + " " + path}, {"details", Json::object()}});
  };

  if (seg.size() == 1 && seg[0] == "slices") {
    if (method == "GET") {
      Json arr = Json::array();
      for (const auto& nsi : engine_.list()) arr.push_back(nsi.to_json());
      return json_response(200, {{"slices", arr}});
    }
    if (method != "POST") return not_allowed();
    Json doc;
    try {
      doc = Json::parse(body);
    } catch (const Json::parse_error& ex) {
      throw Error(Errc::kSchema, std::string("request body is not valid JSON: ") + ex.what(), {{"field", ""}});
    }
    const auto req = SliceRequest::from_json(doc);
    const bool known = engine_.is_known(req);
    std::string id;
    if (virtual_mode()) {
      id = engine_.submit(req).id;
    } else {
      id = engine_.submit_async(req);
    }
    const int status = known ? 200 : (virtual_mode() ? 201 : 202);
    auto r = json_response(status, engine_.slice_json(id));
    r.headers["Location"] = "/slices/" + id;
    return r;
  }

  if (seg.size() >= 2 && seg[0] == "slices") {
    const std::string& id = seg[1];
    if (seg.size() == 2) {
      if (method == "GET") return json_response(200, engine_.slice_json(id));
      if (method == "DELETE") {
        engine_.decommission(id);
        return {204, "", "application/json", {}};
      }
      return not_allowed();
    }
    if (seg.size() == 3 && seg[2] == "reconfigure") {
      if (method != "POST") return not_allowed();
      std::optional<NfProfile> profile;
      if (!body.empty()) {
        try {
          const auto j = Json::parse(body);
          if (j.contains("amf_profile")) profile = j.at("amf_profile").get<NfProfile>();
        } catch (const Json::exception& ex) {
          throw Error(Errc::kSchema, std::string("bad reconfigure body: ") + ex.what(), {{"field", "/amf_profile"}});
        }
      }
      const double start = engine_.now();
      engine_.begin_reconfigure(id, profile);
      if (virtual_mode()) engine_.run_until_settled();
      Json j = engine_.slice_json(id);
      const double period = engine_.config().telemetry.sampling_period_s;
      const double to = std::max(engine_.now(), start) + 10.0;
      j["availability_trace"] = "/slices/" + id + "/availability?from=" + fmt_num(std::max(0.0, start - 10.0)) +
                                "&to=" + fmt_num(to) + "&period=" + fmt_num(period);
      auto r = json_response(202, j);
      r.headers["Location"] = j["availability_trace"].get<std::string>();
      return r;
    }
    if (seg.size() == 3 && seg[2] == "availability") {
      if (method != "GET") return not_allowed();
      const auto nsi = engine_.get(id);
      if (!nsi) throw Error(Errc::kNotFound, "no slice " + id, {{"nsi_id", id}});
      const double period = query_number(query, "period", engine_.config().telemetry.sampling_period_s);
      if (period <= 0) throw Error(Errc::kSchema, "period must be positive", {{"field", "period"}});
      const double from = query_number(query, "from", nsi->created_at);
      const double to = query_number(query, "to", engine_.now());
      const auto series = engine_.availability(id, from, to, period);
      if (auto f = query.find("format"); f != query.end() && f->second == "csv") {
        std::string csv = "t_s,availability\n";
        for (const auto& s : series) csv += fmt_num(s.t) + "," + std::to_string(s.up) + "\n";
        return {200, csv, "text/csv", {}};
      }
      Json samples = Json::array();
      for (const auto& s : series) samples.push_back({s.t, s.up});
      return json_response(200, {{"nsi_id", id},
                                 {"amf", engine_.orchestrator().amf_workload(id)},
                                 {"from_s", from},
                                 {"to_s", to},
                                 {"period_s", period},
                                 {"samples", samples},
                                 {"availability_fraction", availability_fraction(series)},
                                 {"outage_runs_s", outage_runs(series, period)}});
    }
  }

  if (seg.size() == 1 && seg[0] == "metrics") {
    if (method != "GET") return not_allowed();
    return json_response(200, engine_.metrics());
  }

  if (!seg.empty() && seg[0] == "experiments") {
    if (method != "GET") return not_allowed();
    if (seg.size() == 1) return json_response(200, {{"experiments", experiment_names()}});
    if (seg.size() == 2) {
      const auto result = run_experiment(seg[1], engine_.config());
      if (auto d = query.find("dataset"); d != query.end()) return {200, result.dataset(d->second).csv, "text/csv", {}};
      return json_response(200, result.to_json());
    }
  }

  throw Error(Errc::kNotFound, "no route for " + method + " " + path, {{"path", path}});
}

void Gateway::install_routes() {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle(req.method, req.target, req.body);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    if (!r.body.empty()) res.set_content(r.body, r.content_type);
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Delete(".*", handler);
}

void Gateway::start_pacer() {
  if (virtual_mode() || pacer_.joinable()) return;
  pacer_ = std::thread([this] {
    constexpr double kTickS = 0.05;
    while (running_) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      engine_.advance(engine_.now() + kTickS * realtime_factor_);
    }
  });
}

bool Gateway::serve(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  running_ = true;
  start_pacer();
  const bool ok = server_->listen(host, port);
  running_ = false;
  if (pacer_.joinable()) pacer_.join();
  return ok;
}

int Gateway::serve_background(const std::string& host) {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  const int port = server_->bind_to_any_port(host);
  if (port < 0) throw Error(Errc::kConfig, "cannot bind " + host);
  running_ = true;
  start_pacer();
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Gateway::stop() {
  running_ = false;
  if (server_) server_->stop();
  if (listener_.joinable()) listener_.join();
  if (pacer_.joinable()) pacer_.join();
}

}  // namespace nsaas
