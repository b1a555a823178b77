#include "nsaas/digest.hpp"

#include <array>

#include <openssl/evp.h>

namespace nsaas {

std::string canonical(const nlohmann::json& j) {
  // nlohmann::json stores objects in std::map, so dump() already emits sorted keys.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

std::array<unsigned char, 32> sha256_raw(std::span<const unsigned char> bytes) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  const auto raw = sha256_raw({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(64);
  for (unsigned char c : raw) {
    hex.push_back(kHex[c >> 4]);
    hex.push_back(kHex[c & 0xf]);
  }
  return hex;
}

}  // namespace nsaas
