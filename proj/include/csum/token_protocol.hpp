#pragma once

#include <optional>
#include <span>

#include "csum/types.hpp"

namespace csum {

enum class RejectReason { ok, token_mismatch };

// Result of checking a derived token against the verifier's current token.
// Rejection is a normal protocol branch, not an exception; derived_token is
// present iff accepted and becomes the caller's new token.
struct VerificationOutcome {
  bool accepted = false;
  std::optional<Token> derived_token;
  RejectReason reason = RejectReason::token_mismatch;
};

// PT = h(payload || at_prev). The payload bytes are hashed first, the 32
// token bytes immediately after, with no separator: the token is fixed-width
// so the split is unambiguous. Streamed in fixed-size blocks.
PartialToken partial_token(std::span<const std::uint8_t> payload, const Token& at_prev);
PartialToken partial_token(const SoftwareUpdatePackage& sup, const Token& at_prev);

// TT = at_curr ^ h(payload || at_prev). Requires h(at_curr) == at_prev and
// throws InvalidTokenPairError otherwise.
TransmissionToken make_transmission_token(std::span<const std::uint8_t> payload,
                                          const Token& at_curr, const Token& at_prev);
TransmissionToken make_transmission_token(const SoftwareUpdatePackage& sup,
                                          const Token& at_curr, const Token& at_prev);

// DT = tt ^ h(payload || token). Pure; inverts make_transmission_token when
// payload and token match the sender's inputs.
Token derive_token(std::span<const std::uint8_t> payload, const TransmissionToken& tt,
                   const Token& token);
Token derive_token(const SoftwareUpdatePackage& sup, const TransmissionToken& tt,
                   const Token& token);

// Accepts iff h(derived) == token; a single token-chain hash.
VerificationOutcome verify(const Token& derived, const Token& token);

}  // namespace csum
