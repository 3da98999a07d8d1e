#include "csum/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <atomic>
#include <stdexcept>

#include "csum/errors.hpp"

namespace csum::crypto {

namespace {

std::atomic<std::uint64_t> g_payload_digests{0};
std::atomic<std::uint64_t> g_token_chain_hashes{0};

const EVP_MD* sha256_md() {
  // Fetched once; EVP_MD_fetch avoids the per-call provider lookup that makes
  // the legacy one-shot paths slow on OpenSSL 3.
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA2-256", nullptr);
  if (md == nullptr) throw Error("OpenSSL: SHA2-256 unavailable");
  return md;
}

EVP_MD_CTX* new_ctx() {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("OpenSSL: EVP_MD_CTX_new failed");
  return ctx;
}

}  // namespace

Sha256::Sha256() : ctx_(new_ctx()) {
  if (EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), sha256_md(), nullptr) != 1)
    throw Error("OpenSSL: DigestInit failed");
}

Sha256::~Sha256() {
  EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

Sha256::Sha256(Sha256&& other) noexcept : ctx_(other.ctx_) {
  other.ctx_ = nullptr;
}

Sha256& Sha256::operator=(Sha256&& other) noexcept {
  if (this != &other) {
    EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
    ctx_ = other.ctx_;
    other.ctx_ = nullptr;
  }
  return *this;
}

void Sha256::update(std::span<const std::uint8_t> data) {
  if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()) != 1)
    throw Error("OpenSSL: DigestUpdate failed");
}

Digest Sha256::finish() {
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len) != 1 ||
      len != out.size())
    throw Error("OpenSSL: DigestFinal failed");
  return out;
}

Digest sha256(std::span<const std::uint8_t> data) {
  struct TlCtx {
    EVP_MD_CTX* c = new_ctx();
    ~TlCtx() { EVP_MD_CTX_free(c); }
  };
  thread_local TlCtx tl;
  EVP_MD_CTX* ctx = tl.c;
  if (EVP_DigestInit_ex(ctx, sha256_md(), nullptr) != 1)
    throw Error("OpenSSL: DigestInit failed");
  if (EVP_DigestUpdate(ctx, data.data(), data.size()) != 1)
    throw Error("OpenSSL: DigestUpdate failed");
  Digest out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size())
    throw Error("OpenSSL: DigestFinal failed");
  return out;
}

Token hash_token(const Token& token) {
  g_token_chain_hashes.fetch_add(1, std::memory_order_relaxed);
  Token out;
  out.bytes = sha256(token.bytes);
  return out;
}

void random_bytes(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
    throw RandomnessError("secure randomness source unavailable");
}

HashStats hash_stats() {
  return {g_payload_digests.load(std::memory_order_relaxed),
          g_token_chain_hashes.load(std::memory_order_relaxed)};
}

void reset_hash_stats() {
  g_payload_digests.store(0, std::memory_order_relaxed);
  g_token_chain_hashes.store(0, std::memory_order_relaxed);
}

namespace detail {
void count_payload_digest() {
  g_payload_digests.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

}  // namespace csum::crypto
