#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsaas/config.hpp"
#include "nsaas/error.hpp"
#include "nsaas/experiments.hpp"

using namespace nsaas;
namespace fs = std::filesystem;

TEST_CASE("every experiment is deterministic byte for byte") {
  const auto cfg = Config::defaults();
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const auto a = run_experiment(name, cfg);
    const auto b = run_experiment(name, cfg);
    REQUIRE(a.datasets.size() == b.datasets.size());
    for (std::size_t i = 0; i < a.datasets.size(); ++i) CHECK(a.datasets[i].csv == b.datasets[i].csv);
    CHECK(a.summary == b.summary);
  }
}

TEST_CASE("dataset headers carry the experiment and config digest") {
  const auto cfg = Config::defaults();
  const auto r = run_experiment("deployment-times", cfg);
  REQUIRE_FALSE(r.datasets.empty());
  const auto& csv = r.datasets[0].csv;
  CHECK(csv.rfind("# experiment=deployment-times", 0) == 0);
  CHECK(csv.find("config_digest=" + cfg.digest()) != std::string::npos);
}

TEST_CASE("unknown experiments list the known names") {
  try {
    run_experiment("fig-99", Config::defaults());
    FAIL("expected UnknownExperiment");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnknownExperiment);
    CHECK(e.details().at("known").size() == experiment_names().size());
  }
}

TEST_CASE("the shipped data files load to the built-in defaults") {
  const auto loaded = Config::load(fs::path(NSAAS_DATA_DIR) / "config.json");
  CHECK(loaded.digest() == Config::defaults().digest());
  CHECK(Config::from_json(Config::defaults().to_json()).digest() == Config::defaults().digest());
}

TEST_CASE("a changed config changes the digest and the outcome") {
  auto cfg = Config::defaults();
  cfg.admission_cap = 5;
  CHECK(cfg.digest() != Config::defaults().digest());
  const auto r = run_experiment("slice-usage", cfg);
  CHECK(r.summary.at("peak_a") == 5);
  CHECK(r.summary.at("assignment").at("ue-10") == "B");
  CHECK(r.summary.at("assignment").at("ue-11") == "rejected");
}

TEST_CASE("write_experiment emits one CSV per dataset and a summary") {
  const auto dir = fs::temp_directory_path() / "nsaas-test-exp";
  fs::remove_all(dir);
  const auto r = run_experiment("slice-usage", Config::defaults());
  const auto files = write_experiment(r, dir);
  CHECK(files.size() == r.datasets.size() + 1);
  for (const auto& f : files) CHECK(fs::exists(f));
  std::ifstream in(dir / "slice-usage.summary.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(Json::parse(ss.str()) == r.summary);
  fs::remove_all(dir);
}
