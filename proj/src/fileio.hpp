#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace csum::detail {

// Write-to-temp + rename so a killed process never leaves a half-written
// chain or state file behind.
void atomic_write(const std::filesystem::path& dest, std::span<const std::uint8_t> data);

std::vector<std::uint8_t> read_file(const std::filesystem::path& src);

}  // namespace csum::detail
