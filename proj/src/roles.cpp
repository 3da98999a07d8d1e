#include "csum/roles.hpp"

#include <algorithm>

#include "byteio.hpp"
#include "csum/errors.hpp"
#include "csum/token_protocol.hpp"
#include "fileio.hpp"

namespace csum {

Administrator::Provision Administrator::provision(std::uint32_t chain_length) {
  Seed seed = generate_seed();
  HashChain chain = HashChain::build(seed, chain_length);
  while (registry_.contains(chain.id())) {
    // 128-bit id collision; retry with a fresh id.
    ChainId id{};
    crypto::random_bytes(id);
    chain = HashChain::build(seed, chain_length, id);
  }
  Provision p{chain.id(), chain.trust_anchor()};
  registry_.emplace(chain.id(), std::move(chain));
  return p;
}

Administrator::Provision Administrator::provision(std::uint32_t chain_length, const Seed& seed,
                                                  const ChainId& id) {
  if (registry_.contains(id)) throw Error("chain id already registered");
  HashChain chain = HashChain::build(seed, chain_length, id);
  Provision p{chain.id(), chain.trust_anchor()};
  registry_.emplace(id, std::move(chain));
  return p;
}

UpdateBundle Administrator::issue(const ChainId& id, SoftwareUpdatePackage sup) {
  auto it = registry_.find(id);
  if (it == registry_.end()) throw UnknownChainError("no chain registered under this id");
  HashChain& chain = it->second;

  TokenPair pair = chain.next_token_pair();
  UpdateBundle bundle;
  bundle.chain_id = id;
  bundle.ordinal = chain.length() - 1 - chain.cursor();  // 1-based issue counter
  bundle.tt = make_transmission_token(sup, pair.at_curr, pair.at_prev);
  bundle.payload = std::move(sup.payload);
  pending_[id] = bundle;
  return bundle;
}

UpdateBundle Administrator::retransmit(const ChainId& id) const {
  auto it = pending_.find(id);
  if (it == pending_.end()) throw UnknownChainError("no pending bundle for this chain");
  return it->second;
}

bool Administrator::has_pending(const ChainId& id) const {
  return pending_.contains(id);
}

const HashChain& Administrator::chain(const ChainId& id) const {
  auto it = registry_.find(id);
  if (it == registry_.end()) throw UnknownChainError("no chain registered under this id");
  return it->second;
}

std::vector<std::uint8_t> GroundStation::relay(std::vector<std::uint8_t> bundle_bytes) {
  LogEntry entry;
  entry.bundle_digest = crypto::sha256(bundle_bytes);
  // Best-effort header peek for the log; the bytes themselves are never touched.
  if (bundle_bytes.size() >= kBundleHeaderSize &&
      std::equal(kBundleMagic.begin(), kBundleMagic.end(), bundle_bytes.begin())) {
    std::copy_n(bundle_bytes.begin() + kBundleMagic.size(), kChainIdSize,
                entry.chain_id.begin());
    entry.disposition = "forwarded";
  } else {
    entry.disposition = "forwarded-unparsed";
  }
  log_.push_back(std::move(entry));
  return bundle_bytes;
}

CubeSat::CubeSat(const ChainId& chain_id, const Token& trust_anchor)
    : chain_id_(chain_id), token_(trust_anchor) {}

void CubeSat::attach_storage(std::filesystem::path state_file) {
  storage_ = std::move(state_file);
}

UpdateReport CubeSat::handle(std::span<const std::uint8_t> bundle_bytes) {
  UpdateBundle bundle;
  try {
    bundle = decode_bundle(bundle_bytes);
  } catch (const DecodeError&) {
    UpdateReport report;
    report.chain_id = chain_id_;
    report.ordinal = 0;
    report.status = UpdateStatus::failed;
    report.message = kMsgUpdateFailed;
    return report;
  }
  return handle(bundle);
}

UpdateReport CubeSat::handle(const UpdateBundle& bundle) {
  UpdateReport report;
  report.chain_id = chain_id_;
  report.ordinal = bundle.ordinal;
  report.status = UpdateStatus::failed;
  report.message = kMsgUpdateFailed;

  // Bundles addressed to another satellite's chain never reach verification.
  if (bundle.chain_id != chain_id_) return report;

  Token derived = derive_token(bundle.payload, bundle.tt, token_);
  VerificationOutcome outcome = verify(derived, token_);
  if (!outcome.accepted) return report;

  const Token previous_token = token_;
  token_ = *outcome.derived_token;  // token := DT
  installed_.push_back(crypto::sha256(bundle.payload));
  if (storage_) {
    try {
      persist();
    } catch (...) {
      installed_.pop_back();
      token_ = previous_token;
      throw;
    }
  }

  report.status = UpdateStatus::success;
  report.message = kMsgUpdateSuccessful;
  return report;
}

void CubeSat::re_anchor(const ChainId& chain_id, const Token& trust_anchor) {
  chain_id_ = chain_id;
  token_ = trust_anchor;
  if (storage_) persist();
}

void CubeSat::persist() const {
  if (!storage_) throw IoError("no state file attached");
  persist(*storage_);
}

void CubeSat::persist(const std::filesystem::path& dest) const {
  detail::atomic_write(dest, serialize_state());
}

CubeSat CubeSat::restore(const std::filesystem::path& src) {
  CubeSat cs = restore_state(detail::read_file(src));
  cs.attach_storage(src);
  return cs;
}

std::vector<std::uint8_t> CubeSat::serialize_state() const {
  detail::ByteWriter w;
  w.write(kStateMagic);
  w.write_u8(kStateFormatVersion);
  w.write(chain_id_);
  w.write(token_.bytes);
  w.write_u32_be(accepted_count());
  for (const crypto::Digest& d : installed_) w.write(d);
  auto body = w.take();
  crypto::Digest checksum = crypto::sha256(body);
  body.insert(body.end(), checksum.begin(), checksum.end());
  return body;
}

CubeSat CubeSat::restore_state(std::span<const std::uint8_t> data) {
  // 8 magic + 1 version + 16 id + 32 token + 4 count + 32 checksum.
  constexpr std::size_t kFixedSize = 93;
  if (data.size() < kFixedSize) throw IntegrityError("state file truncated");

  detail::ByteReader r(data);
  std::array<std::uint8_t, 8> magic{};
  r.read(magic);
  if (magic != kStateMagic) throw IntegrityError("state file: bad magic");
  std::uint8_t version = 0;
  r.read_u8(version);
  if (version != kStateFormatVersion) throw IntegrityError("state file: unsupported version");

  ChainId id{};
  Token token;
  r.read(id);
  r.read(token.bytes);
  std::uint32_t count = 0;
  r.read_u32_be(count);

  const std::uint64_t expected =
      kFixedSize + static_cast<std::uint64_t>(count) * kTokenSize;
  if (data.size() != expected) throw IntegrityError("state file: size mismatch");

  crypto::Digest computed = crypto::sha256(data.first(data.size() - kTokenSize));
  if (!std::equal(computed.begin(), computed.end(), data.end() - kTokenSize))
    throw IntegrityError("state file: checksum mismatch");

  CubeSat cs(id, token);
  cs.installed_.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) r.read(cs.installed_[i]);
  return cs;
}

}  // namespace csum
