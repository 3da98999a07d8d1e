#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "csum/types.hpp"

namespace csum {

inline constexpr std::array<std::uint8_t, 8> kBundleMagic = {'C', 'S', 'U', 'M',
                                                             'B', 'N', 'D', '1'};

// Fixed cost per bundle: 32-byte framing header (magic + chain id + ordinal +
// length) plus the 32-byte transmission token. Independent of payload size.
inline constexpr std::size_t kBundleHeaderSize = 32;
inline constexpr std::size_t kBundleOverhead = kBundleHeaderSize + kTokenSize;

// The unit that travels GS -> CS: framed payload bytes plus the transmission
// token. The ordinal is diagnostic only; verification rests solely on the
// token chain.
struct UpdateBundle {
  ChainId chain_id{};
  std::uint32_t ordinal = 0;  // 1-based update counter
  std::vector<std::uint8_t> payload;
  TransmissionToken tt;

  friend bool operator==(const UpdateBundle&, const UpdateBundle&) = default;
};

// Layout: magic(8) | chain_id(16) | ordinal(BE u32) | sup_len(BE u32) |
// payload(sup_len) | tt(32). Total size = 64 + sup_len.
std::vector<std::uint8_t> encode_bundle(const UpdateBundle& bundle);  // throws SizeError

// Parses the layout or throws DecodeError; never reads past declared
// lengths, and rejects trailing bytes.
UpdateBundle decode_bundle(std::span<const std::uint8_t> bytes);

}  // namespace csum
