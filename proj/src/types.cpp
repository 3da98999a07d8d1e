#include "csum/types.hpp"

#include <openssl/crypto.h>

#include "csum/errors.hpp"

namespace csum {

Seed::~Seed() {
  OPENSSL_cleanse(bytes_.data(), bytes_.size());
}

Seed::Seed(Seed&& other) noexcept : bytes_(other.bytes_) {
  OPENSSL_cleanse(other.bytes_.data(), other.bytes_.size());
}

Seed& Seed::operator=(Seed&& other) noexcept {
  if (this != &other) {
    bytes_ = other.bytes_;
    OPENSSL_cleanse(other.bytes_.data(), other.bytes_.size());
  }
  return *this;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Token token_from_hex(std::string_view hex) {
  if (hex.size() != kTokenSize * 2)
    throw DecodeError("token hex must be exactly 64 characters");
  auto raw = from_hex(hex);
  Token t;
  std::copy(raw.begin(), raw.end(), t.bytes.begin());
  return t;
}

ChainId chain_id_from_hex(std::string_view hex) {
  if (hex.size() != kChainIdSize * 2)
    throw DecodeError("chain id hex must be exactly 32 characters");
  auto raw = from_hex(hex);
  ChainId id{};
  std::copy(raw.begin(), raw.end(), id.begin());
  return id;
}

}  // namespace csum
