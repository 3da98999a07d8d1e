#include <doctest.h>

#include "csum/errors.hpp"
#include "csum/types.hpp"

using namespace csum;

TEST_SUITE("types") {
  TEST_CASE("hex round-trips") {
    const std::vector<std::uint8_t> bytes = {0x00, 0x01, 0xab, 0xff, 0x7f};
    CHECK(to_hex(bytes) == "0001abff7f");
    CHECK(from_hex("0001abff7f") == bytes);
    CHECK(from_hex("0001ABFF7F") == bytes);  // case-insensitive input
    CHECK(from_hex("").empty());
  }

  TEST_CASE("from_hex rejects malformed input") {
    CHECK_THROWS_AS(from_hex("abc"), DecodeError);   // odd length
    CHECK_THROWS_AS(from_hex("zz"), DecodeError);    // non-hex digit
    CHECK_THROWS_AS(from_hex("0x01"), DecodeError);  // prefixes are not accepted
  }

  TEST_CASE("token_from_hex and chain_id_from_hex enforce exact width") {
    const std::string token_hex(64, 'a');
    const Token t = token_from_hex(token_hex);
    CHECK(to_hex(t.bytes) == token_hex);
    CHECK_THROWS_AS(token_from_hex(std::string(62, 'a')), DecodeError);
    CHECK_THROWS_AS(token_from_hex(std::string(66, 'a')), DecodeError);

    const std::string id_hex(32, '1');
    const ChainId id = chain_id_from_hex(id_hex);
    CHECK(to_hex(id) == id_hex);
    CHECK_THROWS_AS(chain_id_from_hex(std::string(30, '1')), DecodeError);
  }

  TEST_CASE("tokens compare by value") {
    Token a, b;
    a.bytes.fill(1);
    b.bytes.fill(1);
    CHECK(a == b);
    b.bytes[31] = 2;
    CHECK(a != b);
  }

  TEST_CASE("seed exposes exactly its 32 bytes and moves ownership") {
    std::array<std::uint8_t, kTokenSize> raw{};
    raw.fill(0x5c);
    Seed seed(raw);
    CHECK(std::equal(seed.bytes().begin(), seed.bytes().end(), raw.begin()));
    const Seed moved = std::move(seed);
    CHECK(std::equal(moved.bytes().begin(), moved.bytes().end(), raw.begin()));
  }
}
