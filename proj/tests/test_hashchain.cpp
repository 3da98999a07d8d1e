#include <doctest.h>

#include <filesystem>

#include "csum/errors.hpp"
#include "csum/hashchain.hpp"
#include "csum/types.hpp"
#include "oracle_sha256.hpp"
#include "test_util.hpp"

using namespace csum;

namespace {

// Frozen golden vectors for the zero-seed length-3 chain, fixed once with an
// independent oracle: T_1 = h(0^32), T_i = h(T_{i-1}).
constexpr const char* kT1 = "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925";
constexpr const char* kT2 = "2b32db6c2c0a6235fb1397e8225ea85e0f0e6e8c7b126d0016ccbde0e667151e";
constexpr const char* kT3 = "12771355e46cd47c71ed1721fd5319b383cca3a1f9fce3aa1c8cd3bd37af20d7";

// Tip of the length-3 chain grown from the all-0x01 seed.
constexpr const char* kOnesTip = "bbe795b2c096a5467f832ac2352bf83402adac02ee8f3d68e75296a6afddc618";

Seed zero_seed() {
  return Seed(std::array<std::uint8_t, kTokenSize>{});
}

HashChain zero_chain(std::uint32_t n) {
  ChainId id{};
  id.fill(0x11);
  return HashChain::build(zero_seed(), n, id);
}

}  // namespace

TEST_SUITE("hashchain") {
  TEST_CASE("zero-seed n=3 chain reproduces the frozen golden tokens") {
    const HashChain chain = zero_chain(3);
    CHECK(to_hex(chain.token_at(1).bytes) == kT1);
    CHECK(to_hex(chain.token_at(2).bytes) == kT2);
    CHECK(to_hex(chain.token_at(3).bytes) == kT3);
    CHECK(chain.trust_anchor() == chain.token_at(3));
  }

  TEST_CASE("all-ones seed tip matches the oracle-fixed vector") {
    std::array<std::uint8_t, kTokenSize> raw{};
    raw.fill(0x01);
    const HashChain chain = HashChain::build(Seed(raw), 3);
    CHECK(to_hex(chain.trust_anchor().bytes) == kOnesTip);
  }

  TEST_CASE("every link satisfies T_i = h(T_{i-1}) against the oracle") {
    const HashChain chain = zero_chain(40);
    for (std::uint32_t i = 2; i <= chain.length(); ++i) {
      CHECK(chain.token_at(i).bytes == oracle::sha256(chain.token_at(i - 1).bytes));
    }
  }

  TEST_CASE("chains shorter than 2 are rejected") {
    CHECK_THROWS_AS(HashChain::build(zero_seed(), 0), InvalidLengthError);
    CHECK_THROWS_AS(HashChain::build(zero_seed(), 1), InvalidLengthError);
    CHECK_NOTHROW(HashChain::build(zero_seed(), 2));
  }

  TEST_CASE("token_at is 1-based and bounds-checked") {
    const HashChain chain = zero_chain(3);
    CHECK_THROWS_AS(chain.token_at(0), Error);
    CHECK_THROWS_AS(chain.token_at(4), Error);
  }

  TEST_CASE("cursor walks down and exhausts after n-1 pairs") {
    HashChain chain = zero_chain(4);
    CHECK(chain.cursor() == 3);
    CHECK(chain.remaining_updates() == 3);
    CHECK_FALSE(chain.exhausted());

    const TokenPair p1 = chain.next_token_pair();
    CHECK(p1.at_curr == chain.token_at(3));
    CHECK(p1.at_prev == chain.token_at(4));
    const TokenPair p2 = chain.next_token_pair();
    CHECK(p2.at_curr == chain.token_at(2));
    CHECK(p2.at_prev == chain.token_at(3));
    const TokenPair p3 = chain.next_token_pair();
    CHECK(p3.at_curr == chain.token_at(1));
    CHECK(p3.at_prev == chain.token_at(2));

    CHECK(chain.exhausted());
    CHECK_THROWS_AS(chain.next_token_pair(), ChainExhaustedError);
  }

  TEST_CASE("issued pairs satisfy h(at_curr) == at_prev") {
    HashChain chain = zero_chain(8);
    while (!chain.exhausted()) {
      const TokenPair pair = chain.next_token_pair();
      CHECK(pair.at_prev.bytes == oracle::sha256(pair.at_curr.bytes));
    }
  }

  TEST_CASE("generate_seed produces distinct 32-byte secrets") {
    const Seed a = generate_seed();
    const Seed b = generate_seed();
    CHECK(a.bytes().size() == kTokenSize);
    CHECK_FALSE(std::equal(a.bytes().begin(), a.bytes().end(), b.bytes().begin()));
  }

  TEST_CASE("generate_seed surfaces source failure as RandomnessError") {
    const RandomFill broken = [](std::span<std::uint8_t>) {
      throw std::runtime_error("entropy source offline");
    };
    CHECK_THROWS_AS(generate_seed(broken), RandomnessError);
  }

  TEST_CASE("serialize/deserialize round-trips including a moved cursor") {
    HashChain chain = zero_chain(5);
    (void)chain.next_token_pair();
    (void)chain.next_token_pair();
    const auto bytes = chain.serialize();
    const HashChain back = HashChain::deserialize(bytes);
    CHECK(back == chain);
    CHECK(back.cursor() == 2);
  }

  TEST_CASE("serialized size is 65 + 32n") {
    CHECK(zero_chain(3).serialize().size() == kChainFileOverhead + 3 * kTokenSize);
    CHECK(zero_chain(100).serialize().size() == kChainFileOverhead + 100 * kTokenSize);
    // n=100 keeps the whole token block at 3.2 KB.
    CHECK(100 * kTokenSize == 3200);
  }

  TEST_CASE("deserialize rejects corruption") {
    const HashChain chain = zero_chain(4);
    const auto good = chain.serialize();

    SUBCASE("flipped token byte") {
      auto bad = good;
      bad[70] ^= 0x01;
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("flipped checksum byte") {
      auto bad = good;
      bad[bad.size() - 1] ^= 0x01;
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("truncation") {
      auto bad = good;
      bad.resize(bad.size() - 1);
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("trailing garbage") {
      auto bad = good;
      bad.push_back(0x00);
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("wrong magic") {
      auto bad = good;
      bad[0] = 'X';
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("unknown version") {
      auto bad = good;
      bad[8] = 0x7f;
      CHECK_THROWS_AS(HashChain::deserialize(bad), IntegrityError);
    }
    SUBCASE("empty input") {
      CHECK_THROWS_AS(HashChain::deserialize(std::vector<std::uint8_t>{}), IntegrityError);
    }
  }

  TEST_CASE("deserialize rejects a chain whose links do not verify") {
    // Recompute the checksum over tampered token bytes so only the link
    // structure check can catch the damage.
    auto bytes = zero_chain(3).serialize();
    bytes[65 + 32] ^= 0x01;  // second token, first byte
    const auto body = std::span(bytes).first(bytes.size() - 32);
    const auto checksum = oracle::sha256(body);
    std::copy(checksum.begin(), checksum.end(), bytes.end() - 32);
    CHECK_THROWS_AS(HashChain::deserialize(bytes), IntegrityError);
  }

  TEST_CASE("save/load round-trips through a file") {
    testutil::TempDir dir;
    const auto file = dir.file("chain.bin");
    HashChain chain = zero_chain(100);
    (void)chain.next_token_pair();
    chain.save(file);
    CHECK(std::filesystem::file_size(file) == kChainFileOverhead + 100 * kTokenSize);
    const HashChain back = HashChain::load(file);
    CHECK(back == chain);
  }

  TEST_CASE("load of a missing file reports an I/O error") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(HashChain::load(dir.file("absent.bin")), IoError);
  }

  TEST_CASE("distinct builds get distinct random chain ids") {
    const HashChain a = HashChain::build(zero_seed(), 2);
    const HashChain b = HashChain::build(zero_seed(), 2);
    CHECK(a.id() != b.id());
  }
}
