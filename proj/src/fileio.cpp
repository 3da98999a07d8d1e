#include "fileio.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <system_error>

#include "csum/errors.hpp"

namespace csum::detail {

void atomic_write(const std::filesystem::path& dest, std::span<const std::uint8_t> data) {
  namespace fs = std::filesystem;
  fs::path dir = dest.parent_path();
  if (dir.empty()) dir = fs::current_path();

  static std::atomic<std::uint64_t> counter{0};
  fs::path tmp = dir / (dest.filename().string() + ".tmp" +
                        std::to_string(counter.fetch_add(1)) + "." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open temp file for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, dest, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed for " + dest.string());
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& src) {
  std::ifstream in(src, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + src.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + src.string());
  return data;
}

}  // namespace csum::detail
