#include "csum/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>

#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/rsa.h>

#include "csum/crypto.hpp"
#include "csum/errors.hpp"
#include "csum/hashchain.hpp"
#include "csum/roles.hpp"
#include "csum/wire.hpp"
#include "fileio.hpp"

namespace csum::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fill_random(std::mt19937_64& rng, std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    std::uint64_t word = rng();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> (8 * b));
    }
  }
}

[[noreturn]] void crypto_failure(const char* op) {
  throw Error(std::string("benchmark: OpenSSL ") + op + " failed");
}

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

// The signature and cipher primitives the update path is compared against:
// RSA-2048 with PSS padding and AES-256-CBC, both through EVP.
class PrimitiveBench {
 public:
  explicit PrimitiveBench(std::uint64_t rng_seed) : rng_(rng_seed) {
    key_.reset(EVP_RSA_gen(2048));
    if (!key_) crypto_failure("RSA keygen");
    fill_random(rng_, aes_key_);
    fill_random(rng_, aes_iv_);
  }

  // One full primitive execution over `data`; the returned duration is what
  // gets sampled.
  double run(Primitive p, std::span<const std::uint8_t> data) {
    switch (p) {
      case Primitive::hash: {
        const auto start = Clock::now();
        volatile std::uint8_t sink = crypto::sha256(data)[0];
        (void)sink;
        return seconds_since(start);
      }
      case Primitive::sign: {
        const auto start = Clock::now();
        sign_into(data, scratch_sig_);
        return seconds_since(start);
      }
      case Primitive::verify_signature: {
        ensure_signature(data);
        const auto start = Clock::now();
        if (!verify(data, cached_sig_)) crypto_failure("signature verify");
        return seconds_since(start);
      }
      case Primitive::encrypt: {
        const auto start = Clock::now();
        encrypt_into(data, scratch_ct_);
        return seconds_since(start);
      }
      case Primitive::decrypt: {
        ensure_ciphertext(data);
        const auto start = Clock::now();
        decrypt_into(cached_ct_, scratch_pt_);
        return seconds_since(start);
      }
    }
    crypto_failure("unknown primitive");
  }

  // Cached inputs are per-payload; reset when the payload changes.
  void new_payload() {
    cached_sig_.clear();
    cached_ct_.clear();
  }

 private:
  void sign_into(std::span<const std::uint8_t> data, std::vector<std::uint8_t>& sig) {
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx) crypto_failure("sign ctx");
    EVP_PKEY_CTX* pctx = nullptr;
    if (EVP_DigestSignInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
        EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
        EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) != 1) {
      crypto_failure("sign init");
    }
    std::size_t sig_len = 0;
    if (EVP_DigestSign(ctx.get(), nullptr, &sig_len, data.data(), data.size()) != 1) {
      crypto_failure("sign size");
    }
    sig.resize(sig_len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &sig_len, data.data(), data.size()) != 1) {
      crypto_failure("sign");
    }
    sig.resize(sig_len);
  }

  bool verify(std::span<const std::uint8_t> data, const std::vector<std::uint8_t>& sig) {
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx) crypto_failure("verify ctx");
    EVP_PKEY_CTX* pctx = nullptr;
    if (EVP_DigestVerifyInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
        EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PSS_PADDING) != 1 ||
        EVP_PKEY_CTX_set_rsa_pss_saltlen(pctx, RSA_PSS_SALTLEN_DIGEST) != 1) {
      crypto_failure("verify init");
    }
    return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), data.data(), data.size()) == 1;
  }

  void encrypt_into(std::span<const std::uint8_t> data, std::vector<std::uint8_t>& out) {
    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) crypto_failure("encrypt ctx");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, aes_key_.data(),
                           aes_iv_.data()) != 1) {
      crypto_failure("encrypt init");
    }
    out.resize(data.size() + 16);
    int written = 0;
    int total = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &written, data.data(),
                          static_cast<int>(data.size())) != 1) {
      crypto_failure("encrypt");
    }
    total = written;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &written) != 1) {
      crypto_failure("encrypt final");
    }
    total += written;
    out.resize(static_cast<std::size_t>(total));
  }

  void decrypt_into(std::span<const std::uint8_t> ct, std::vector<std::uint8_t>& out) {
    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) crypto_failure("decrypt ctx");
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, aes_key_.data(),
                           aes_iv_.data()) != 1) {
      crypto_failure("decrypt init");
    }
    out.resize(ct.size() + 16);
    int written = 0;
    int total = 0;
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &written, ct.data(), static_cast<int>(ct.size())) !=
        1) {
      crypto_failure("decrypt");
    }
    total = written;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &written) != 1) {
      crypto_failure("decrypt final");
    }
    total += written;
    out.resize(static_cast<std::size_t>(total));
  }

  void ensure_signature(std::span<const std::uint8_t> data) {
    if (cached_sig_.empty()) sign_into(data, cached_sig_);
  }

  void ensure_ciphertext(std::span<const std::uint8_t> data) {
    if (cached_ct_.empty()) encrypt_into(data, cached_ct_);
  }

  std::mt19937_64 rng_;
  PkeyPtr key_;
  std::array<std::uint8_t, 32> aes_key_{};
  std::array<std::uint8_t, 16> aes_iv_{};
  std::vector<std::uint8_t> cached_sig_;
  std::vector<std::uint8_t> cached_ct_;
  std::vector<std::uint8_t> scratch_sig_;
  std::vector<std::uint8_t> scratch_ct_;
  std::vector<std::uint8_t> scratch_pt_;
};

std::string megabyte_label(std::size_t bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2fMB", static_cast<double>(bytes) / 1'000'000.0);
  return buf;
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9f", s);
  return buf;
}

struct Payload {
  std::string label;
  std::vector<std::uint8_t> bytes;
};

std::vector<Payload> materialize_payloads(const BenchConfig& config) {
  std::vector<Payload> payloads;
  std::mt19937_64 rng(config.rng_seed);
  for (std::size_t size : config.payload_sizes) {
    Payload p;
    p.label = megabyte_label(size);
    p.bytes.resize(size);
    fill_random(rng, p.bytes);
    payloads.push_back(std::move(p));
  }
  for (const auto& file : config.corpus_files) {
    Payload p;
    p.label = file.filename().string();
    p.bytes = detail::read_file(file);
    payloads.push_back(std::move(p));
  }
  return payloads;
}

void validate(const BenchConfig& config) {
  if (config.repetitions < 3) throw ConfigError("bench: repetitions must be >= 3");
  if (config.payload_sizes.empty() && config.corpus_files.empty()) {
    throw ConfigError("bench: no payloads configured");
  }
  for (std::uint32_t n : config.chain_sizes) {
    if (n < 2) throw ConfigError("bench: chain sizes must be >= 2");
  }
}

}  // namespace

std::string primitive_name(Primitive p) {
  switch (p) {
    case Primitive::hash: return "hash";
    case Primitive::sign: return "sign";
    case Primitive::verify_signature: return "verify";
    case Primitive::encrypt: return "encrypt";
    case Primitive::decrypt: return "decrypt";
  }
  return "unknown";
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty sample set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("fit_linear needs two equally sized samples of at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("fit_linear: degenerate x values");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double predicted = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - predicted) * (y[i] - predicted);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

BenchReport bench_primitives(const BenchConfig& config) {
  validate(config);
  BenchReport report;
  PrimitiveBench bench(config.rng_seed);
  const auto payloads = materialize_payloads(config);

  for (const Payload& payload : payloads) {
    bench.new_payload();
    PayloadSummary summary;
    summary.payload = payload.label;
    summary.payload_bytes = payload.bytes.size();
    for (Primitive p : config.primitives) {
      for (std::uint32_t w = 0; w < config.warmup; ++w) bench.run(p, payload.bytes);
      std::vector<double> timings;
      timings.reserve(config.repetitions);
      for (std::uint32_t rep = 1; rep <= config.repetitions; ++rep) {
        const double s = bench.run(p, payload.bytes);
        timings.push_back(s);
        report.samples.push_back(
            {primitive_name(p), payload.label, payload.bytes.size(), rep, s});
      }
      summary.median_seconds[primitive_name(p)] = median(std::move(timings));
    }
    if (auto it = summary.median_seconds.find("hash"); it != summary.median_seconds.end()) {
      for (const auto& [name, med] : summary.median_seconds) {
        summary.ratio_to_hash[name] = it->second == 0.0 ? 0.0 : med / it->second;
      }
    }
    report.payload_summary.push_back(std::move(summary));
  }
  return report;
}

BenchReport bench_chain(const BenchConfig& config) {
  validate(config);
  BenchReport report;
  std::mt19937_64 rng(config.rng_seed);

  for (std::uint32_t n : config.chain_sizes) {
    for (std::uint32_t rep = 1; rep <= std::max(1u, config.chain_repetitions); ++rep) {
      ChainSample sample;
      sample.n = n;
      sample.rep = rep;

      std::array<std::uint8_t, kTokenSize> seed_bytes{};
      fill_random(rng, seed_bytes);
      ChainId id{};
      fill_random(rng, id);

      {
        Seed seed(seed_bytes);
        const auto start = Clock::now();
        HashChain chain = HashChain::build(seed, n, id);
        sample.generate_seconds = seconds_since(start);
        if (chain.remaining_updates() != n - 1) throw Error("benchmark: bad chain cursor");
      }

      // The verify phase drives the full pipeline: issue, encode, decode,
      // verify, accept. Chain construction inside provision() is setup and
      // deliberately untimed.
      Administrator admin;
      Seed seed_again(seed_bytes);
      auto prov = admin.provision(n, seed_again, id);
      CubeSat cs(prov.chain_id, prov.trust_anchor);
      SoftwareUpdatePackage sup;
      sup.name = "bench";

      const auto start = Clock::now();
      for (std::uint32_t i = 1; i < n; ++i) {
        UpdateBundle bundle = admin.issue(id, sup);
        const auto bytes = encode_bundle(bundle);
        UpdateReport result = cs.handle(std::span<const std::uint8_t>(bytes));
        if (result.status != UpdateStatus::success) {
          throw Error("benchmark: genuine update rejected at step " + std::to_string(i));
        }
      }
      sample.verify_seconds = seconds_since(start);
      if (cs.accepted_count() != n - 1) throw Error("benchmark: update count mismatch");

      report.chain_samples.push_back(sample);
    }
  }

  std::vector<double> xs, gen, ver;
  for (const ChainSample& s : report.chain_samples) {
    xs.push_back(static_cast<double>(s.n));
    gen.push_back(s.generate_seconds);
    ver.push_back(s.verify_seconds);
  }
  if (xs.size() >= 2) {
    report.generation_fit = fit_linear(xs, gen);
    report.verification_fit = fit_linear(xs, ver);
  }
  return report;
}

BenchReport bench_all(const BenchConfig& config) {
  BenchReport report = bench_primitives(config);
  BenchReport chain = bench_chain(config);
  report.chain_samples = std::move(chain.chain_samples);
  report.generation_fit = chain.generation_fit;
  report.verification_fit = chain.verification_fit;
  return report;
}

std::string BenchReport::to_csv() const {
  // One row per sample: primitive rows fill `seconds`, chain rows fill the
  // generate/verify pair.
  std::string out = "kind,primitive,payload,payload_bytes,n,rep,seconds,generate_seconds,verify_seconds\n";
  for (const PrimitiveSample& s : samples) {
    out += "primitive," + s.primitive + "," + s.payload + "," + std::to_string(s.payload_bytes) +
           ",," + std::to_string(s.rep) + "," + format_seconds(s.seconds) + ",,\n";
  }
  for (const ChainSample& s : chain_samples) {
    out += "chain,,,," + std::to_string(s.n) + "," + std::to_string(s.rep) + ",," +
           format_seconds(s.generate_seconds) + "," + format_seconds(s.verify_seconds) + "\n";
  }
  return out;
}

void BenchReport::print_summary(std::ostream& os) const {
  if (!payload_summary.empty()) {
    os << "Primitive medians (seconds; ratio vs. hash in parentheses)\n";
    for (const PayloadSummary& p : payload_summary) {
      os << "  " << std::left << std::setw(14) << p.payload << std::right << std::setw(10)
         << p.payload_bytes << " bytes\n";
      for (const auto& [name, med] : p.median_seconds) {
        os << "    " << std::left << std::setw(8) << name << std::right << std::fixed
           << std::setprecision(6) << std::setw(12) << med;
        if (auto it = p.ratio_to_hash.find(name); it != p.ratio_to_hash.end()) {
          os << "  (" << std::setprecision(2) << it->second << "x)";
        }
        os << "\n";
      }
    }
  }
  if (!chain_samples.empty()) {
    os << "Chain scaling\n";
    for (const ChainSample& s : chain_samples) {
      const double per_update = s.n > 1 ? s.verify_seconds / (s.n - 1) : 0.0;
      os << "  n=" << std::left << std::setw(8) << s.n << std::right << "generate "
         << std::fixed << std::setprecision(6) << s.generate_seconds << " s, verify "
         << s.verify_seconds << " s (" << std::setprecision(2) << per_update * 1e6
         << " us/update)\n";
    }
    os << "  generation fit: " << std::scientific << std::setprecision(3) << generation_fit.slope
       << " s/token (r2=" << std::fixed << std::setprecision(4) << generation_fit.r2 << ")\n";
    os << "  verification fit: " << std::scientific << std::setprecision(3)
       << verification_fit.slope << " s/update (r2=" << std::fixed << std::setprecision(4)
       << verification_fit.r2 << ")\n";
    os.unsetf(std::ios::floatfield);
  }
}

std::string BenchReport::summary_json() const {
  nlohmann::ordered_json j;
  j["payloads"] = nlohmann::ordered_json::array();
  for (const PayloadSummary& p : payload_summary) {
    nlohmann::ordered_json entry;
    entry["payload"] = p.payload;
    entry["payload_bytes"] = p.payload_bytes;
    entry["median_seconds"] = p.median_seconds;
    entry["ratio_to_hash"] = p.ratio_to_hash;
    j["payloads"].push_back(std::move(entry));
  }
  j["chain"] = nlohmann::ordered_json::array();
  for (const ChainSample& s : chain_samples) {
    nlohmann::ordered_json entry;
    entry["n"] = s.n;
    entry["rep"] = s.rep;
    entry["generate_seconds"] = s.generate_seconds;
    entry["verify_seconds"] = s.verify_seconds;
    j["chain"].push_back(std::move(entry));
  }
  j["generation_fit"] = {{"slope", generation_fit.slope},
                         {"intercept", generation_fit.intercept},
                         {"r2", generation_fit.r2}};
  j["verification_fit"] = {{"slope", verification_fit.slope},
                           {"intercept", verification_fit.intercept},
                           {"r2", verification_fit.r2}};
  return j.dump(2);
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) { throw ConfigError("bench: " + what); }

Primitive parse_primitive(const std::string& name) {
  if (name == "hash") return Primitive::hash;
  if (name == "sign") return Primitive::sign;
  if (name == "verify") return Primitive::verify_signature;
  if (name == "encrypt") return Primitive::encrypt;
  if (name == "decrypt") return Primitive::decrypt;
  bad_config("unknown primitive \"" + name + "\"");
}

}  // namespace

BenchConfig parse_config(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) bad_config("not valid JSON");
  if (!j.is_object()) bad_config("top level must be an object");

  BenchConfig config;
  if (auto it = j.find("payload_sizes"); it != j.end()) {
    if (!it->is_array()) bad_config("payload_sizes must be an array");
    config.payload_sizes.clear();
    for (const auto& v : *it) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
        bad_config("payload_sizes entries must be positive integers");
      }
      config.payload_sizes.push_back(v.get<std::size_t>());
    }
  }
  if (auto it = j.find("corpus_files"); it != j.end()) {
    if (!it->is_array()) bad_config("corpus_files must be an array");
    for (const auto& v : *it) {
      if (!v.is_string()) bad_config("corpus_files entries must be strings");
      config.corpus_files.emplace_back(v.get<std::string>());
    }
  }
  if (auto it = j.find("primitives"); it != j.end()) {
    if (!it->is_array() || it->empty()) bad_config("primitives must be a non-empty array");
    config.primitives.clear();
    for (const auto& v : *it) {
      if (!v.is_string()) bad_config("primitives entries must be strings");
      config.primitives.push_back(parse_primitive(v.get<std::string>()));
    }
  }
  auto read_u32 = [&](const char* key, std::uint32_t fallback) -> std::uint32_t {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_unsigned()) bad_config(std::string(key) + " must be a non-negative integer");
    return it->get<std::uint32_t>();
  };
  config.repetitions = read_u32("repetitions", config.repetitions);
  config.warmup = read_u32("warmup", config.warmup);
  config.chain_repetitions = read_u32("chain_repetitions", config.chain_repetitions);
  if (auto it = j.find("chain_sizes"); it != j.end()) {
    if (!it->is_array()) bad_config("chain_sizes must be an array");
    config.chain_sizes.clear();
    for (const auto& v : *it) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 2) {
        bad_config("chain_sizes entries must be integers >= 2");
      }
      config.chain_sizes.push_back(v.get<std::uint32_t>());
    }
  }
  if (auto it = j.find("rng_seed"); it != j.end()) {
    if (!it->is_number_unsigned()) bad_config("rng_seed must be a non-negative integer");
    config.rng_seed = it->get<std::uint64_t>();
  }
  validate(config);
  return config;
}

BenchConfig load_config(const std::filesystem::path& file) {
  std::vector<std::uint8_t> raw;
  try {
    raw = detail::read_file(file);
  } catch (const IoError& e) {
    throw ConfigError(std::string("bench: ") + e.what());
  }
  return parse_config(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

}  // namespace csum::bench
