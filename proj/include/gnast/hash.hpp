#pragma once

#include <openssl/evp.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gnast {

inline std::string sha256_hex(const void* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (!EVP_Digest(data, len, digest, &digest_len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 digest failed");
  static const char hex[] = "0123456789abcdef";
  std::string out(digest_len * 2, '0');
  for (unsigned int i = 0; i < digest_len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xf];
  }
  return out;
}

inline std::string sha256_hex(std::string_view s) { return sha256_hex(s.data(), s.size()); }

inline std::string sha256_hex(const std::vector<std::uint8_t>& v) {
  return sha256_hex(v.data(), v.size());
}

}  // namespace gnast
