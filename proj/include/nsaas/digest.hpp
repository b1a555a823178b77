#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace nsaas {

// Stable serialization: object keys sorted, no whitespace, shortest round-trip doubles.
std::string canonical(const nlohmann::json& j);

std::string sha256_hex(std::string_view bytes);
std::array<unsigned char, 32> sha256_raw(std::span<const unsigned char> bytes);

inline std::string digest_of(const nlohmann::json& j) { return sha256_hex(canonical(j)); }

}  // namespace nsaas
