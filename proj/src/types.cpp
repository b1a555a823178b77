#include "nsaas/types.hpp"

#include <algorithm>
#include <cctype>

#include "nsaas/error.hpp"

namespace nsaas {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kSchema: return "SchemaError";
    case Errc::kValidation: return "ValidationError";
    case Errc::kUnclassifiable: return "UnclassifiableRequest";
    case Errc::kNoMatch: return "NoMatch";
    case Errc::kOverrideConflict: return "OverrideConflict";
    case Errc::kEmptyCatalog: return "EmptyCatalog";
    case Errc::kSequenceConflict: return "SequenceConflict";
    case Errc::kLogCorrupt: return "LogCorrupt";
    case Errc::kPoolExhausted: return "PoolExhausted";
    case Errc::kUnknownScenario: return "UnknownScenario";
    case Errc::kDomainDeployFailure: return "DomainDeployFailure";
    case Errc::kNotFound: return "NotFound";
    case Errc::kConcurrentModification: return "ConcurrentModification";
    case Errc::kInvalidState: return "InvalidState";
    case Errc::kQuotaExceeded: return "QuotaExceeded";
    case Errc::kNoPath: return "NoPath";
    case Errc::kRuleConflict: return "RuleConflict";
    case Errc::kNoAmfAvailable: return "NoAmfAvailable";
    case Errc::kNoCapacity: return "NoCapacity";
    case Errc::kRankDeficient: return "RankDeficient";
    case Errc::kUnknownExperiment: return "UnknownExperiment";
    case Errc::kConfig: return "ConfigError";
    case Errc::kDuplicateInFlight: return "DuplicateInFlight";
  }
  return "Unknown";
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::kCN: return "CN";
    case Domain::kRAN: return "RAN";
    case Domain::kTN: return "TN";
  }
  return "?";
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kURLLC: return "URLLC";
    case Scenario::kMMTC: return "mMTC";
    case Scenario::kSharedEMBB: return "Shared-eMBB";
    case Scenario::kNon3gpp: return "non3gpp";
  }
  return "?";
}

std::string_view to_string(NstType t) {
  switch (t) {
    case NstType::kEMBB: return "eMBB";
    case NstType::kURLLC: return "URLLC";
    case NstType::kMMTC: return "mMTC";
    case NstType::kNon3gpp: return "non3gpp";
    case NstType::kCustom: return "custom";
  }
  return "?";
}

std::string_view to_string(NsiState s) {
  switch (s) {
    case NsiState::kRequested: return "Requested";
    case NsiState::kDeploying: return "Deploying";
    case NsiState::kActive: return "Active";
    case NsiState::kReconfiguring: return "Reconfiguring";
    case NsiState::kDegraded: return "Degraded";
    case NsiState::kTerminated: return "Terminated";
  }
  return "?";
}

std::string_view to_string(NssiState s) {
  switch (s) {
    case NssiState::kPending: return "Pending";
    case NssiState::kDeploying: return "Deploying";
    case NssiState::kReady: return "Ready";
    case NssiState::kFailed: return "Failed";
    case NssiState::kRemoved: return "Removed";
  }
  return "?";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

[[noreturn]] void unknown(std::string_view what, std::string_view value) {
  throw Error(Errc::kSchema, "unknown " + std::string(what) + " '" + std::string(value) + "'",
              {{"field", std::string(what)}, {"value", std::string(value)}});
}

}  // namespace

Domain parse_domain(std::string_view s) {
  const auto v = lower(s);
  if (v == "cn" || v == "core") return Domain::kCN;
  if (v == "ran") return Domain::kRAN;
  if (v == "tn") return Domain::kTN;
  unknown("domain", s);
}

Scenario parse_scenario(std::string_view s) {
  const auto v = lower(s);
  if (v == "urllc") return Scenario::kURLLC;
  if (v == "mmtc" || v == "miot") return Scenario::kMMTC;
  if (v == "shared-embb" || v == "shared" || v == "embb") return Scenario::kSharedEMBB;
  if (v == "non3gpp" || v == "non-3gpp") return Scenario::kNon3gpp;
  throw Error(Errc::kUnknownScenario, "unknown scenario '" + std::string(s) + "'", {{"value", std::string(s)}});
}

NstType parse_nst_type(std::string_view s) {
  const auto v = lower(s);
  if (v == "embb") return NstType::kEMBB;
  if (v == "urllc") return NstType::kURLLC;
  if (v == "mmtc" || v == "miot") return NstType::kMMTC;
  if (v == "non3gpp" || v == "non-3gpp") return NstType::kNon3gpp;
  if (v == "custom") return NstType::kCustom;
  unknown("NST.type", s);
}

NsiState parse_nsi_state(std::string_view s) {
  for (auto st : {NsiState::kRequested, NsiState::kDeploying, NsiState::kActive, NsiState::kReconfiguring,
                  NsiState::kDegraded, NsiState::kTerminated}) {
    if (to_string(st) == s) return st;
  }
  unknown("nsi state", s);
}

NssiState parse_nssi_state(std::string_view s) {
  for (auto st : {NssiState::kPending, NssiState::kDeploying, NssiState::kReady, NssiState::kFailed,
                  NssiState::kRemoved}) {
    if (to_string(st) == s) return st;
  }
  unknown("nssi state", s);
}

std::uint8_t sst_of(Scenario s) {
  switch (s) {
    case Scenario::kSharedEMBB: return 1;
    case Scenario::kURLLC: return 2;
    case Scenario::kMMTC: return 3;
    case Scenario::kNon3gpp: return 4;
  }
  return 0;
}

}  // namespace nsaas
