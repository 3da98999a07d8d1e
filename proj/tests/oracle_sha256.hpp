#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

// Self-contained SHA-256 used to cross-check the production implementation.
// Written straight from FIPS 180-4 with no shared code or libraries, so a
// defect in the library hash cannot hide from the tests.
namespace oracle {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

// h(a || b) without materializing the concatenation.
std::array<std::uint8_t, 32> sha256_concat(std::span<const std::uint8_t> a,
                                           std::span<const std::uint8_t> b);

std::string hex(std::span<const std::uint8_t> bytes);

}  // namespace oracle
