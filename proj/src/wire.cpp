#include "csum/wire.hpp"

#include <limits>

#include "byteio.hpp"
#include "csum/errors.hpp"

namespace csum {

std::vector<std::uint8_t> encode_bundle(const UpdateBundle& bundle) {
  if (bundle.payload.size() > std::numeric_limits<std::uint32_t>::max())
    throw SizeError("payload exceeds 32-bit length field");

  detail::ByteWriter w;
  w.write(kBundleMagic);
  w.write(bundle.chain_id);
  w.write_u32_be(bundle.ordinal);
  w.write_u32_be(static_cast<std::uint32_t>(bundle.payload.size()));
  w.write(bundle.payload);
  w.write(bundle.tt.bytes);
  return w.take();
}

UpdateBundle decode_bundle(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);

  std::array<std::uint8_t, 8> magic{};
  if (!r.read(magic)) throw DecodeError("bundle truncated: missing magic");
  if (magic != kBundleMagic) throw DecodeError("bad bundle magic");

  UpdateBundle b;
  if (!r.read(b.chain_id)) throw DecodeError("bundle truncated: missing chain id");
  if (!r.read_u32_be(b.ordinal)) throw DecodeError("bundle truncated: missing ordinal");

  std::uint32_t sup_len = 0;
  if (!r.read_u32_be(sup_len)) throw DecodeError("bundle truncated: missing payload length");
  if (r.remaining() != static_cast<std::size_t>(sup_len) + kTokenSize)
    throw DecodeError("bundle length mismatch");

  if (!r.read_bytes(sup_len, b.payload)) throw DecodeError("bundle truncated: payload");
  if (!r.read(b.tt.bytes)) throw DecodeError("bundle truncated: transmission token");
  return b;
}

}  // namespace csum
