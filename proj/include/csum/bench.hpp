#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace csum::bench {

enum class Primitive { hash, sign, verify_signature, encrypt, decrypt };

std::string primitive_name(Primitive p);

struct BenchConfig {
  // Synthetic payload sizes in bytes; defaults mirror the reference corpus
  // (1.58 / 4.59 / 12.22 / 15.09 MB).
  std::vector<std::size_t> payload_sizes = {1'580'000, 4'590'000, 12'220'000, 15'090'000};
  std::vector<std::filesystem::path> corpus_files;  // optional real files
  std::vector<Primitive> primitives = {Primitive::hash, Primitive::sign,
                                       Primitive::verify_signature, Primitive::encrypt,
                                       Primitive::decrypt};
  std::uint32_t repetitions = 10;  // must be >= 3
  std::uint32_t warmup = 2;        // excluded from statistics
  std::vector<std::uint32_t> chain_sizes = {10'000, 20'000, 30'000, 40'000, 50'000};
  std::uint32_t chain_repetitions = 1;
  std::uint64_t rng_seed = 1;  // synthetic payload generation
};

BenchConfig load_config(const std::filesystem::path& file);  // throws ConfigError
BenchConfig parse_config(std::string_view json_text);

struct PrimitiveSample {
  std::string primitive;
  std::string payload;  // label
  std::size_t payload_bytes = 0;
  std::uint32_t rep = 0;
  double seconds = 0.0;
};

struct PayloadSummary {
  std::string payload;
  std::size_t payload_bytes = 0;
  std::map<std::string, double> median_seconds;  // per primitive
  std::map<std::string, double> ratio_to_hash;   // median / median(hash)
};

struct ChainSample {
  std::uint32_t n = 0;
  std::uint32_t rep = 0;
  double generate_seconds = 0.0;
  double verify_seconds = 0.0;  // issue+deliver+verify all n-1 updates
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct BenchReport {
  std::vector<PrimitiveSample> samples;  // raw samples retained
  std::vector<PayloadSummary> payload_summary;
  std::vector<ChainSample> chain_samples;
  LinearFit generation_fit;
  LinearFit verification_fit;

  std::string to_csv() const;  // one row per sample
  void print_summary(std::ostream& os) const;
  std::string summary_json() const;  // machine-readable, for CI checks
};

// Times the configured primitives over each payload; medians over
// `repetitions` runs after `warmup` discarded runs.
BenchReport bench_primitives(const BenchConfig& config);

// For each n: chain build time and the time to issue, deliver and verify all
// n-1 minimal-payload updates through the admin -> wire -> CS pipeline.
BenchReport bench_chain(const BenchConfig& config);

// Merges chain results into a primitives report (used by the CLI runner).
BenchReport bench_all(const BenchConfig& config);

double median(std::vector<double> values);
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

}  // namespace csum::bench
