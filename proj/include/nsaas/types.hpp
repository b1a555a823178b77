#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace nsaas {

enum class Domain { kCN, kRAN, kTN };

// Scenario classes that drive template selection and the deployment plan shape.
enum class Scenario { kURLLC, kMMTC, kSharedEMBB, kNon3gpp };

enum class NstType { kEMBB, kURLLC, kMMTC, kNon3gpp, kCustom };

enum class NsiState { kRequested, kDeploying, kActive, kReconfiguring, kDegraded, kTerminated };

enum class NssiState { kPending, kDeploying, kReady, kFailed, kRemoved };

inline constexpr std::array<Domain, 3> kAllDomains{Domain::kCN, Domain::kRAN, Domain::kTN};
inline constexpr std::array<Scenario, 4> kAllScenarios{Scenario::kURLLC, Scenario::kMMTC, Scenario::kSharedEMBB,
                                                       Scenario::kNon3gpp};

std::string_view to_string(Domain d);
std::string_view to_string(Scenario s);
std::string_view to_string(NstType t);
std::string_view to_string(NsiState s);
std::string_view to_string(NssiState s);

// Parsers throw Error(kSchema) on unknown spellings (kUnknownScenario for scenarios).
Domain parse_domain(std::string_view s);
Scenario parse_scenario(std::string_view s);
NstType parse_nst_type(std::string_view s);
NsiState parse_nsi_state(std::string_view s);
NssiState parse_nssi_state(std::string_view s);

// 3GPP slice/service type code for a scenario (4 is used for non-3GPP access).
std::uint8_t sst_of(Scenario s);

}  // namespace nsaas
