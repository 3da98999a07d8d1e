#include <doctest.h>

#include <sstream>

#include "csum/bench.hpp"
#include "csum/errors.hpp"
#include "test_util.hpp"

using namespace csum;
using namespace csum::bench;

namespace {

BenchConfig tiny_config() {
  BenchConfig config;
  config.payload_sizes = {1'000, 2'000};
  config.primitives = {Primitive::hash, Primitive::encrypt};
  config.repetitions = 3;
  config.warmup = 1;
  config.chain_sizes = {10, 20, 30};
  config.rng_seed = 11;
  return config;
}

std::size_t count_lines(const std::string& text, const std::string& prefix) {
  std::size_t count = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) count++;
  }
  return count;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("median handles odd, even and singleton samples") {
    CHECK(median({3.0}) == 3.0);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(median({}), Error);
  }

  TEST_CASE("fit_linear recovers an exact line with r2 = 1") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {3.5, 5.5, 7.5, 9.5, 11.5};  // y = 2x + 1.5
    const LinearFit fit = fit_linear(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.5));
    CHECK(fit.r2 == doctest::Approx(1.0));
  }

  TEST_CASE("fit_linear rejects degenerate input") {
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(fit_linear(one, one), Error);
    const std::vector<double> same_x = {2.0, 2.0};
    const std::vector<double> y = {1.0, 5.0};
    CHECK_THROWS_AS(fit_linear(same_x, y), Error);
  }

  TEST_CASE("bench_primitives samples every primitive x payload x repetition") {
    const BenchConfig config = tiny_config();
    const BenchReport report = bench_primitives(config);
    CHECK(report.samples.size() == 2 * 2 * 3);  // payloads x primitives x reps
    REQUIRE(report.payload_summary.size() == 2);
    for (const PayloadSummary& s : report.payload_summary) {
      REQUIRE(s.median_seconds.contains("hash"));
      REQUIRE(s.median_seconds.contains("encrypt"));
      CHECK(s.median_seconds.at("hash") > 0.0);
      CHECK(s.ratio_to_hash.at("hash") == doctest::Approx(1.0));
    }
  }

  TEST_CASE("bench_chain verifies n-1 updates per chain and fits a line") {
    const BenchConfig config = tiny_config();
    const BenchReport report = bench_chain(config);
    REQUIRE(report.chain_samples.size() == 3);
    for (const ChainSample& s : report.chain_samples) {
      CHECK(s.generate_seconds > 0.0);
      CHECK(s.verify_seconds > 0.0);
    }
    CHECK(report.verification_fit.slope > 0.0);
  }

  TEST_CASE("CSV holds one row per sample plus one per chain point") {
    const BenchConfig config = tiny_config();
    const BenchReport report = bench_all(config);
    const std::string csv = report.to_csv();
    CHECK(count_lines(csv, "kind,") == 1);
    CHECK(count_lines(csv, "primitive,") == report.samples.size());
    CHECK(count_lines(csv, "chain,") == report.chain_samples.size());
  }

  TEST_CASE("summary output mentions every primitive and chain size") {
    const BenchReport report = bench_all(tiny_config());
    std::ostringstream os;
    report.print_summary(os);
    const std::string text = os.str();
    CHECK(text.find("hash") != std::string::npos);
    CHECK(text.find("encrypt") != std::string::npos);
    CHECK(text.find("n=10") != std::string::npos);
    CHECK(text.find("n=30") != std::string::npos);
    CHECK(text.find("verification fit") != std::string::npos);
    CHECK_FALSE(report.summary_json().empty());
  }

  TEST_CASE("config JSON parses and validates") {
    const BenchConfig config = parse_config(R"({
      "payload_sizes": [512],
      "primitives": ["hash", "verify"],
      "repetitions": 4,
      "warmup": 0,
      "chain_sizes": [100],
      "chain_repetitions": 2,
      "rng_seed": 9
    })");
    CHECK(config.payload_sizes == std::vector<std::size_t>{512});
    REQUIRE(config.primitives.size() == 2);
    CHECK(config.primitives[1] == Primitive::verify_signature);
    CHECK(config.repetitions == 4);
    CHECK(config.warmup == 0);
    CHECK(config.chain_repetitions == 2);
    CHECK(config.rng_seed == 9);
  }

  TEST_CASE("bad configs are refused") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repetitions": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"primitives": ["sha3"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"chain_sizes": [1]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"payload_sizes": []})"), ConfigError);
  }

  TEST_CASE("corpus files are benchmarked by name") {
    testutil::TempDir dir;
    const auto corpus = dir.file("firmware.img");
    std::mt19937_64 rng(3);
    testutil::write_file(corpus, testutil::random_bytes(rng, 4096));

    BenchConfig config = tiny_config();
    config.payload_sizes.clear();
    config.corpus_files = {corpus};
    const BenchReport report = bench_primitives(config);
    REQUIRE(report.payload_summary.size() == 1);
    CHECK(report.payload_summary.front().payload == "firmware.img");
    CHECK(report.payload_summary.front().payload_bytes == 4096);
  }
}
