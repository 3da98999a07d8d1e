#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csum/crypto.hpp"
#include "csum/hashchain.hpp"
#include "csum/types.hpp"
#include "csum/wire.hpp"

namespace csum {

inline constexpr const char* kMsgUpdateSuccessful = "Update successful";
inline constexpr const char* kMsgUpdateFailed = "Error: Update Failed";

enum class UpdateStatus { success, failed };

struct UpdateReport {
  ChainId chain_id{};
  std::uint32_t ordinal = 0;
  UpdateStatus status = UpdateStatus::failed;
  std::string message;  // exactly kMsgUpdateSuccessful or kMsgUpdateFailed
};

// Administrator side: one unique hash chain per satellite plus the last
// issued bundle per chain, kept for retransmission. Issuing advances the
// chain cursor; retransmitting does not.
class Administrator {
 public:
  struct Provision {
    ChainId chain_id{};
    Token trust_anchor;
  };

  Provision provision(std::uint32_t chain_length);
  // Deterministic variant for simulation: caller supplies seed and id.
  Provision provision(std::uint32_t chain_length, const Seed& seed, const ChainId& id);

  UpdateBundle issue(const ChainId& id, SoftwareUpdatePackage sup);
  UpdateBundle retransmit(const ChainId& id) const;  // identical pending bundle
  bool has_pending(const ChainId& id) const;

  const HashChain& chain(const ChainId& id) const;
  std::size_t registry_size() const { return registry_.size(); }

 private:
  std::map<ChainId, HashChain> registry_;
  std::map<ChainId, UpdateBundle> pending_;
};

// Ground station: forwards bundle bytes untouched and logs what passed
// through.
class GroundStation {
 public:
  struct LogEntry {
    ChainId chain_id{};  // zero if the header could not be read
    crypto::Digest bundle_digest{};
    std::string disposition;
  };

  std::vector<std::uint8_t> relay(std::vector<std::uint8_t> bundle_bytes);

  const std::vector<LogEntry>& forwarding_log() const { return log_; }

 private:
  std::vector<LogEntry> log_;
};

// CubeSat-side verifier state: the current token (initialized to the trust
// anchor), the append-only install log, and the chain identity. The token
// moves only via an accepted verification. When a state file is attached,
// an accepted update is persisted before the success report is returned.
class CubeSat {
 public:
  CubeSat(const ChainId& chain_id, const Token& trust_anchor);

  void attach_storage(std::filesystem::path state_file);

  UpdateReport handle(std::span<const std::uint8_t> bundle_bytes);
  UpdateReport handle(const UpdateBundle& bundle);

  const ChainId& chain_id() const { return chain_id_; }
  const Token& token() const { return token_; }
  const std::vector<crypto::Digest>& installed() const { return installed_; }
  std::uint32_t accepted_count() const { return static_cast<std::uint32_t>(installed_.size()); }

  // Manual re-anchor after chain exhaustion: installs a fresh trust anchor
  // (and chain identity) while keeping the install log.
  void re_anchor(const ChainId& chain_id, const Token& trust_anchor);

  // State file format (bit-exact): magic "CSUMSAT1", version byte 0x01,
  // 16-byte chain id, 32-byte token, big-endian u32 accepted count, one
  // 32-byte payload digest per accepted update, 32-byte trailing SHA-256.
  void persist() const;  // to the attached state file
  void persist(const std::filesystem::path& dest) const;
  static CubeSat restore(const std::filesystem::path& src);

  std::vector<std::uint8_t> serialize_state() const;
  static CubeSat restore_state(std::span<const std::uint8_t> data);  // throws IntegrityError

 private:
  ChainId chain_id_{};
  Token token_;
  std::vector<crypto::Digest> installed_;
  std::optional<std::filesystem::path> storage_;
};

inline constexpr std::array<std::uint8_t, 8> kStateMagic = {'C', 'S', 'U', 'M',
                                                            'S', 'A', 'T', '1'};
inline constexpr std::uint8_t kStateFormatVersion = 0x01;

}  // namespace csum
