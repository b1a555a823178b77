#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace nsaas {

// Machine-readable reason codes carried by every rejection.
enum class Errc {
  kSchema,
  kValidation,
  kUnclassifiable,
  kNoMatch,
  kOverrideConflict,
  kEmptyCatalog,
  kSequenceConflict,
  kLogCorrupt,
  kPoolExhausted,
  kUnknownScenario,
  kDomainDeployFailure,
  kNotFound,
  kConcurrentModification,
  kInvalidState,
  kQuotaExceeded,
  kNoPath,
  kRuleConflict,
  kNoAmfAvailable,
  kNoCapacity,
  kRankDeficient,
  kUnknownExperiment,
  kConfig,
  kDuplicateInFlight,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  Errc code() const { return code_; }
  std::string_view reason() const { return to_string(code_); }
  const nlohmann::json& details() const { return details_; }

  nlohmann::json to_json() const {
    return {{"reason", std::string(reason())}, {"message", what()}, {"details", details_}};
  }

 private:
  Errc code_;
  nlohmann::json details_;
};

}  // namespace nsaas
