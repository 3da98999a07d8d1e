#include "csum/token_protocol.hpp"

#include <algorithm>

#include "csum/crypto.hpp"
#include "csum/errors.hpp"

namespace csum {

namespace {

// Hash block size for large payloads; keeps hasher feed O(1) regardless of
// payload length.
constexpr std::size_t kHashBlock = 64 * 1024;

crypto::Digest payload_digest(std::span<const std::uint8_t> payload, const Token& at_prev) {
  crypto::Sha256 hasher;
  while (!payload.empty()) {
    const std::size_t take = std::min(payload.size(), kHashBlock);
    hasher.update(payload.first(take));
    payload = payload.subspan(take);
  }
  hasher.update(at_prev.bytes);
  crypto::detail::count_payload_digest();
  return hasher.finish();
}

std::array<std::uint8_t, kTokenSize> xor_bytes(const std::array<std::uint8_t, kTokenSize>& a,
                                               const std::array<std::uint8_t, kTokenSize>& b) {
  std::array<std::uint8_t, kTokenSize> out;
  for (std::size_t i = 0; i < kTokenSize; ++i) out[i] = a[i] ^ b[i];
  return out;
}

}  // namespace

PartialToken partial_token(std::span<const std::uint8_t> payload, const Token& at_prev) {
  PartialToken pt;
  pt.bytes = payload_digest(payload, at_prev);
  return pt;
}

PartialToken partial_token(const SoftwareUpdatePackage& sup, const Token& at_prev) {
  return partial_token(std::span<const std::uint8_t>(sup.payload), at_prev);
}

TransmissionToken make_transmission_token(std::span<const std::uint8_t> payload,
                                          const Token& at_curr, const Token& at_prev) {
  if (crypto::hash_token(at_curr) != at_prev)
    throw InvalidTokenPairError("invalid AT_curr and AT_prev combination");
  TransmissionToken tt;
  tt.bytes = xor_bytes(at_curr.bytes, partial_token(payload, at_prev).bytes);
  return tt;
}

TransmissionToken make_transmission_token(const SoftwareUpdatePackage& sup,
                                          const Token& at_curr, const Token& at_prev) {
  return make_transmission_token(std::span<const std::uint8_t>(sup.payload), at_curr, at_prev);
}

Token derive_token(std::span<const std::uint8_t> payload, const TransmissionToken& tt,
                   const Token& token) {
  Token dt;
  dt.bytes = xor_bytes(tt.bytes, partial_token(payload, token).bytes);
  return dt;
}

Token derive_token(const SoftwareUpdatePackage& sup, const TransmissionToken& tt,
                   const Token& token) {
  return derive_token(std::span<const std::uint8_t>(sup.payload), tt, token);
}

VerificationOutcome verify(const Token& derived, const Token& token) {
  VerificationOutcome outcome;
  if (crypto::hash_token(derived) == token) {
    outcome.accepted = true;
    outcome.derived_token = derived;
    outcome.reason = RejectReason::ok;
  } else {
    outcome.accepted = false;
    outcome.reason = RejectReason::token_mismatch;
  }
  return outcome;
}

}  // namespace csum
