#pragma once

#include <stdexcept>
#include <string>

namespace csum {

// Base class for everything this library throws on its own behalf.
// Protocol rejection (a failed bundle verification) is not an error and is
// reported as a value; see VerificationOutcome and UpdateReport.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The secure randomness source failed during setup.
class RandomnessError : public Error {
 public:
  using Error::Error;
};

// Requested chain length cannot support a single update (n < 2).
class InvalidLengthError : public Error {
 public:
  using Error::Error;
};

// All n-1 one-time tokens of a chain have been issued; re-anchoring is the
// only way forward.
class ChainExhaustedError : public Error {
 public:
  using Error::Error;
};

// h(AT_curr) != AT_prev when building a transmission token.
class InvalidTokenPairError : public Error {
 public:
  using Error::Error;
};

// No chain with the given id is registered.
class UnknownChainError : public Error {
 public:
  using Error::Error;
};

// A persisted chain or CubeSat state file failed validation (bad magic,
// truncation, checksum or chain-link mismatch).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A wire-format buffer could not be parsed.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// A payload exceeds the wire format's 32-bit length field.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure while reading or writing chain/state/bundle files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed scenario or benchmark configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace csum
