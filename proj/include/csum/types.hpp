#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csum {

// Output length of the chain hash function (SHA-256); every token-shaped
// value in the protocol is exactly this wide.
inline constexpr std::size_t kTokenSize = 32;
inline constexpr std::size_t kChainIdSize = 16;

using ChainId = std::array<std::uint8_t, kChainIdSize>;

// One hash-chain element. Depending on context the same value acts as the
// trust anchor, AT_curr, AT_prev, the derived token DT, or the CubeSat's
// local verifier token.
struct Token {
  std::array<std::uint8_t, kTokenSize> bytes{};

  friend auto operator<=>(const Token&, const Token&) = default;
};

// 32-byte XOR encapsulation AT_curr ^ h(SUP || AT_prev) binding the payload,
// the revealed token and the chain position.
struct TransmissionToken {
  std::array<std::uint8_t, kTokenSize> bytes{};

  friend auto operator<=>(const TransmissionToken&, const TransmissionToken&) = default;
};

// h(SUP || AT_prev), computed on both sides to encapsulate/extract AT_curr.
struct PartialToken {
  std::array<std::uint8_t, kTokenSize> bytes{};

  friend auto operator<=>(const PartialToken&, const PartialToken&) = default;
};

// Administrator-side chain secret. Move-only; the buffer is zeroized on
// destruction and must never be serialized into any bundle or log.
class Seed {
 public:
  explicit Seed(const std::array<std::uint8_t, kTokenSize>& bytes) : bytes_(bytes) {}
  ~Seed();

  Seed(Seed&& other) noexcept;
  Seed& operator=(Seed&& other) noexcept;
  Seed(const Seed&) = delete;
  Seed& operator=(const Seed&) = delete;

  std::span<const std::uint8_t, kTokenSize> bytes() const { return bytes_; }

 private:
  std::array<std::uint8_t, kTokenSize> bytes_;
};

// Opaque update payload plus an optional label used in reports. Empty
// payloads are legal (no-op / keep-alive updates).
struct SoftwareUpdatePackage {
  std::vector<std::uint8_t> payload;
  std::string name;
};

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);  // throws DecodeError

Token token_from_hex(std::string_view hex);      // exactly 64 hex chars
ChainId chain_id_from_hex(std::string_view hex); // exactly 32 hex chars

}  // namespace csum
