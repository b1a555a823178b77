#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nsaas/config.hpp"
#include "nsaas/slice_model.hpp"

namespace nsaas {

struct Dataset {
  std::string name;  // file stem, e.g. "deployment-times" or "attach-latency.samples"
  std::string csv;   // starts with a "# ..." line carrying units and the config digest
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Dataset> datasets;
  Json summary = Json::object();

  const Dataset& dataset(const std::string& name) const;
  Json to_json() const;
};

const std::vector<std::string>& experiment_names();

// Runs one named experiment on a fresh engine built from `config`. Throws UnknownExperiment.
ExperimentResult run_experiment(const std::string& name, const Config& config = Config::defaults());

// Writes every dataset as <dir>/<dataset>.csv plus <dir>/<experiment>.summary.json.
std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace nsaas
