#include "csum/hashchain.hpp"

#include <algorithm>

#include "byteio.hpp"
#include "csum/crypto.hpp"
#include "csum/errors.hpp"
#include "fileio.hpp"

namespace csum {

Seed generate_seed() {
  return generate_seed([](std::span<std::uint8_t> out) { crypto::random_bytes(out); });
}

Seed generate_seed(const RandomFill& fill) {
  std::array<std::uint8_t, kTokenSize> bytes{};
  try {
    fill(bytes);
  } catch (const RandomnessError&) {
    throw;
  } catch (const std::exception& e) {
    throw RandomnessError(std::string("randomness source failed: ") + e.what());
  }
  return Seed(bytes);
}

HashChain HashChain::build(const Seed& seed, std::uint32_t length) {
  ChainId id{};
  crypto::random_bytes(id);
  return build(seed, length, id);
}

HashChain HashChain::build(const Seed& seed, std::uint32_t length, const ChainId& id) {
  if (length < 2)
    throw InvalidLengthError("chain length must be >= 2 to support at least one update");

  HashChain chain;
  chain.id_ = id;
  chain.tokens_.reserve(length);

  Token t;
  t.bytes = crypto::sha256(seed.bytes());  // T_1 = h(seed)
  chain.tokens_.push_back(t);
  for (std::uint32_t i = 1; i < length; ++i)
    chain.tokens_.push_back(crypto::hash_token(chain.tokens_.back()));  // T_i = h(T_{i-1})

  chain.cursor_ = length - 1;
  return chain;
}

const Token& HashChain::token_at(std::uint32_t i) const {
  if (i < 1 || i > tokens_.size()) throw Error("token index out of range");
  return tokens_[i - 1];
}

TokenPair HashChain::next_token_pair() {
  if (cursor_ == 0)
    throw ChainExhaustedError("hash chain exhausted: all one-time tokens issued, re-anchor required");
  TokenPair pair{token_at(cursor_), token_at(cursor_ + 1)};
  --cursor_;
  return pair;
}

std::vector<std::uint8_t> HashChain::serialize() const {
  detail::ByteWriter w;
  w.write(kChainMagic);
  w.write_u8(kChainFormatVersion);
  w.write(id_);
  w.write_u32_be(length());
  w.write_u32_be(cursor_);
  for (const Token& t : tokens_) w.write(t.bytes);
  auto body = w.take();
  crypto::Digest checksum = crypto::sha256(body);
  body.insert(body.end(), checksum.begin(), checksum.end());
  return body;
}

HashChain HashChain::deserialize(std::span<const std::uint8_t> data) {
  if (data.size() < kChainFileOverhead + 2 * kTokenSize)
    throw IntegrityError("chain file truncated");

  detail::ByteReader r(data);
  std::array<std::uint8_t, 8> magic{};
  r.read(magic);
  if (magic != kChainMagic) throw IntegrityError("chain file: bad magic");
  std::uint8_t version = 0;
  r.read_u8(version);
  if (version != kChainFormatVersion) throw IntegrityError("chain file: unsupported version");

  HashChain chain;
  r.read(chain.id_);
  std::uint32_t n = 0;
  r.read_u32_be(n);
  r.read_u32_be(chain.cursor_);
  if (n < 2) throw IntegrityError("chain file: invalid chain length");
  if (chain.cursor_ > n - 1) throw IntegrityError("chain file: cursor out of range");

  // Exact size check before touching the token block.
  const std::size_t expected = kChainFileOverhead + static_cast<std::size_t>(n) * kTokenSize;
  if (data.size() != expected) throw IntegrityError("chain file: size mismatch");

  crypto::Digest computed = crypto::sha256(data.first(data.size() - kTokenSize));
  if (!std::equal(computed.begin(), computed.end(), data.end() - kTokenSize))
    throw IntegrityError("chain file: checksum mismatch");

  chain.tokens_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) r.read(chain.tokens_[i].bytes);

  for (std::uint32_t i = 1; i < n; ++i) {
    if (crypto::hash_token(chain.tokens_[i - 1]) != chain.tokens_[i])
      throw IntegrityError("chain file: chain-link check failed");
  }
  return chain;
}

void HashChain::save(const std::filesystem::path& dest) const {
  detail::atomic_write(dest, serialize());
}

HashChain HashChain::load(const std::filesystem::path& src) {
  return deserialize(detail::read_file(src));
}

}  // namespace csum
