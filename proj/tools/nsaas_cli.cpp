#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nsaas/assurance.hpp"
#include "nsaas/digest.hpp"
#include "nsaas/engine.hpp"
#include "nsaas/error.hpp"
#include "nsaas/experiments.hpp"
#include "nsaas/gateway.hpp"

namespace fs = std::filesystem;
using namespace nsaas;

namespace {

struct Options {
  std::string config;
  std::string out = "nsaas-out";
  double realtime_factor = 0.0;
};

Config load_config(const Options& o) {
  std::optional<fs::path> explicit_path;
  if (!o.config.empty()) explicit_path = o.config;
  const auto path = explicit_path ? explicit_path : config_path_from_env(std::nullopt);
  return path ? Config::load(*path) : Config::defaults();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kConfig, "cannot read " + p.string(), {{"path", p.string()}});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every mutating command is journaled; each invocation replays the journal on a fresh
// engine, which reproduces the same virtual-time state.
class Session {
 public:
  explicit Session(const Options& o) : dir_(o.out), engine_(load_config(o)) {
    fs::create_directories(dir_);
    std::ifstream in(journal());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) apply(Json::parse(line));
    }
  }

  Json run(const Json& cmd) {
    Json result = apply(cmd);
    std::ofstream(journal(), std::ios::app) << cmd.dump() << "\n";
    return result;
  }

  Engine& engine() { return engine_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path journal() const { return dir_ / "commands.jsonl"; }

  Json apply(const Json& cmd) {
    const auto op = cmd.at("op").get<std::string>();
    if (op == "submit") return engine_.slice_json(engine_.submit_json(cmd.at("body")).id);
    if (op == "reconfigure") return engine_.slice_json(engine_.reconfigure(cmd.at("id").get<std::string>()).id);
    if (op == "delete") return engine_.decommission(cmd.at("id").get<std::string>()).to_json();
    throw Error(Errc::kSchema, "unknown journal op '" + op + "'");
  }

  fs::path dir_;
  Engine engine_;
};

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

void export_state(Session& s, const std::string& format) {
  Engine& e = s.engine();
  const auto slices = e.list();
  std::vector<fs::path> written;
  if (format == "jsonl") {
    const auto ev = s.dir() / "events.jsonl";
    std::ofstream(ev, std::ios::binary) << e.event_log_jsonl();
    const auto sl = s.dir() / "slices.jsonl";
    std::ofstream out(sl, std::ios::binary);
    for (const auto& nsi : slices) out << canonical(nsi.to_json()) << "\n";
    written = {ev, sl};
  } else if (format == "csv") {
    const auto sl = s.dir() / "slices.csv";
    std::ofstream out(sl, std::ios::binary);
    out << "nsi_id,scenario,state,snssai,vlan,created_at_s,activated_at_s\n";
    for (const auto& nsi : slices) {
      char act[32] = "";
      if (nsi.activated_at) std::snprintf(act, sizeof(act), "%.2f", *nsi.activated_at);
      char created[32];
      std::snprintf(created, sizeof(created), "%.2f", nsi.created_at);
      out << nsi.id << "," << to_string(nsi.scenario) << "," << to_string(nsi.state) << "," << nsi.snssai.str() << ","
          << nsi.vlan << "," << created << "," << act << "\n";
    }
    TelemetryStream stream;
    std::vector<Nsi> live;
    for (const auto& nsi : slices) {
      if (nsi.state != NsiState::kTerminated) live.push_back(nsi);
    }
    collect_telemetry(e.platform(), live, 0.0, e.now(), e.config().telemetry, e.config().seed, stream);
    const auto kpi = s.dir() / "telemetry.csv";
    std::ofstream(kpi, std::ios::binary) << stream.to_csv();
    written = {sl, kpi};
  } else {
    throw Error(Errc::kSchema, "export format must be csv or jsonl", {{"field", "format"}});
  }
  Json files = Json::array();
  for (const auto& p : written) files.push_back(p.string());
  print({{"written", files}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network slice as a service: onboarding, orchestration and experiment replay"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "Configuration file (JSON); NASP_CONFIG is used when omitted");
  app.add_option("--out", o.out, "State and output directory")->capture_default_str();
  app.add_option("--realtime-factor", o.realtime_factor, "Pace virtual time at this multiple of wall time (serve)")
      ->check(CLI::NonNegativeNumber);

  std::string request_file;
  auto* submit = app.add_subcommand("submit", "Onboard and deploy a slice request");
  submit->add_option("request", request_file, "Slice request JSON file ('-' for stdin)")->required();

  std::string id;
  auto* status = app.add_subcommand("status", "Show one slice or all slices");
  status->add_option("id", id, "Slice id");

  auto* reconfigure = app.add_subcommand("reconfigure", "Replace the AMF serving a slice");
  reconfigure->add_option("id", id, "Slice id")->required();

  auto* del = app.add_subcommand("delete", "Decommission a slice");
  del->add_option("id", id, "Slice id")->required();

  std::string experiment;
  auto* exp = app.add_subcommand("experiment", "Regenerate an experiment dataset");
  exp->add_option("name", experiment, "Experiment name")->required();

  std::string format = "csv";
  auto* exp_cmd = app.add_subcommand("export", "Export slices, events or telemetry");
  exp_cmd->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the northbound HTTP service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  auto* init = app.add_subcommand("init-config", "Write the default configuration file set into --out");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp) {
      const auto result = run_experiment(experiment, load_config(o));
      const auto files = write_experiment(result, o.out);
      Json written = Json::array();
      for (const auto& f : files) written.push_back(f.string());
      print({{"experiment", experiment}, {"written", written}, {"summary", result.summary}});
      return 0;
    }
    if (*init) {
      write_default_config_files(o.out);
      std::ofstream(fs::path(o.out) / "listing1_request.json") << listing_one_request().dump(2) << "\n";
      print({{"written", o.out}, {"config_digest", Config::load(fs::path(o.out) / "config.json").digest()}});
      return 0;
    }
    Session session(o);
    if (*submit) {
      const std::string text = request_file == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                                                   : read_file(request_file);
      Json body;
      try {
        body = Json::parse(text);
      } catch (const Json::parse_error& ex) {
        throw Error(Errc::kSchema, std::string("request is not valid JSON: ") + ex.what(), {{"field", ""}});
      }
      print(session.run({{"op", "submit"}, {"body", body}}));
    } else if (*status) {
      if (id.empty()) {
        Json arr = Json::array();
        for (const auto& nsi : session.engine().list()) arr.push_back(nsi.to_json());
        print({{"virtual_time_s", session.engine().now()}, {"slices", arr}});
      } else {
        print(session.engine().slice_json(id));
      }
    } else if (*reconfigure) {
      print(session.run({{"op", "reconfigure"}, {"id", id}}));
    } else if (*del) {
      print(session.run({{"op", "delete"}, {"id", id}}));
    } else if (*exp_cmd) {
      export_state(session, format);
    } else if (*serve) {
      Gateway gw(session.engine(), o.realtime_factor);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!gw.serve(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const Error& err) {
    std::cerr << err.to_json().dump(2) << "\n";
    return http_status(err.code()) / 100;
  }
  return 0;
}
