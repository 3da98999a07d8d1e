#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "csum/types.hpp"

namespace csum {

// Fills the destination with fresh random bytes; throws on source failure.
using RandomFill = std::function<void(std::span<std::uint8_t>)>;

Seed generate_seed();
Seed generate_seed(const RandomFill& fill);

struct TokenPair {
  Token at_curr;
  Token at_prev;  // h(at_curr) == at_prev by construction
};

// The administrator's ordered token sequence T_1..T_n with T_1 = h(seed) and
// T_i = h(T_{i-1}). T_n is the trust anchor installed on the satellite; the
// cursor walks down from n-1 issuing one (AT_curr, AT_prev) pair per update,
// so a chain of length n supports exactly n-1 updates.
class HashChain {
 public:
  static HashChain build(const Seed& seed, std::uint32_t length);  // fresh random id
  static HashChain build(const Seed& seed, std::uint32_t length, const ChainId& id);

  const ChainId& id() const { return id_; }
  std::uint32_t length() const { return static_cast<std::uint32_t>(tokens_.size()); }

  // Index of the next AT_curr to issue; 0 means exhausted.
  std::uint32_t cursor() const { return cursor_; }
  std::uint32_t remaining_updates() const { return cursor_; }
  bool exhausted() const { return cursor_ == 0; }

  const Token& token_at(std::uint32_t i) const;  // 1-based: T_1..T_n
  const Token& trust_anchor() const { return tokens_.back(); }

  // Returns (T_cursor, T_{cursor+1}) and decrements the cursor. Throws
  // ChainExhaustedError once all n-1 pairs have been issued.
  TokenPair next_token_pair();

  // Chain file format (bit-exact): magic "CSUMCHN1", version byte 0x01,
  // 16-byte chain id, big-endian u32 n, big-endian u32 cursor, n*32 token
  // bytes, then a 32-byte SHA-256 of everything preceding. Writes go to a
  // temp file in the same directory followed by an atomic rename.
  void save(const std::filesystem::path& dest) const;
  static HashChain load(const std::filesystem::path& src);

  std::vector<std::uint8_t> serialize() const;
  static HashChain deserialize(std::span<const std::uint8_t> data);  // throws IntegrityError

  friend bool operator==(const HashChain&, const HashChain&) = default;

 private:
  HashChain() = default;

  ChainId id_{};
  std::uint32_t cursor_ = 0;
  std::vector<Token> tokens_;
};

inline constexpr std::array<std::uint8_t, 8> kChainMagic = {'C', 'S', 'U', 'M',
                                                            'C', 'H', 'N', '1'};
inline constexpr std::uint8_t kChainFormatVersion = 0x01;

// 8 magic + 1 version + 16 id + 4 n + 4 cursor + 32 trailing checksum.
inline constexpr std::size_t kChainFileOverhead = 65;

}  // namespace csum
