#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "csum/types.hpp"

namespace csum::crypto {

using Digest = std::array<std::uint8_t, kTokenSize>;

// Streaming SHA-256. One-shot helpers below cover the common cases; the
// streaming form keeps memory O(1) for large payloads.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> data);
  Digest finish();  // finalizes; the hasher must not be reused afterwards

 private:
  void* ctx_;  // EVP_MD_CTX
};

Digest sha256(std::span<const std::uint8_t> data);

// Chain-step hash h(token): the only hash ever applied to walk or check the
// token chain. Counted in hash_stats().token_chain_hashes.
Token hash_token(const Token& token);

// Fills `out` from the operating system CSPRNG. Throws RandomnessError.
void random_bytes(std::span<std::uint8_t> out);

// Protocol hash instrumentation. Counts only the two hash roles of the
// update protocol itself: partial-token digests h(SUP || AT_prev) and
// token-chain hashes h(token). File checksums and report digests are
// plumbing and are not counted.
struct HashStats {
  std::uint64_t payload_digests = 0;
  std::uint64_t token_chain_hashes = 0;

  std::uint64_t total() const { return payload_digests + token_chain_hashes; }
};

HashStats hash_stats();
void reset_hash_stats();

namespace detail {
void count_payload_digest();
}

}  // namespace csum::crypto
