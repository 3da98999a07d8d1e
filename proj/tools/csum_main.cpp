#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csum/bench.hpp"
#include "csum/errors.hpp"
#include "csum/hashchain.hpp"
#include "csum/roles.hpp"
#include "csum/simnet.hpp"
#include "csum/token_protocol.hpp"
#include "csum/types.hpp"
#include "csum/wire.hpp"
#include "fileio.hpp"

namespace fs = std::filesystem;

namespace {

// Serializes mutating access to a chain or state file across processes. The
// lock is a `.lock` sidecar so it can be taken before the target exists; it
// is advisory and drops with the process.
class FileLock {
 public:
  explicit FileLock(const fs::path& target) : path_(target.string() + ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw csum::IoError("cannot open lock file " + path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw csum::ConfigError("another process is using " + target.string() +
                              " (lock held on " + path_ + ")");
    }
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

// Relative chain/state paths resolve against CSUM_STATE_DIR when it is set,
// so operators can keep all mutable state in one place.
fs::path resolve_state_path(const fs::path& p) {
  if (p.is_relative()) {
    if (const char* dir = std::getenv("CSUM_STATE_DIR"); dir != nullptr && *dir != '\0') {
      return fs::path(dir) / p;
    }
  }
  return p;
}

void write_text(const fs::path& dest, const std::string& text) {
  csum::detail::atomic_write(
      dest, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// Exit-code contract: 0 success, 1 protocol rejection, 2 anything that kept
// the command from running (usage, I/O, corrupt files, exhausted chain).
int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_admin_init(const fs::path& out, std::uint32_t length, const std::string& id_hex) {
  const fs::path out_path = resolve_state_path(out);
  FileLock lock(out_path);
  const csum::Seed seed = csum::generate_seed();
  const csum::HashChain chain =
      id_hex.empty() ? csum::HashChain::build(seed, length)
                     : csum::HashChain::build(seed, length, csum::chain_id_from_hex(id_hex));
  chain.save(out_path);
  std::cout << "chain-id: " << csum::to_hex(chain.id()) << "\n";
  std::cout << "trust-anchor: " << csum::to_hex(chain.trust_anchor().bytes) << "\n";
  std::cout << "updates-available: " << chain.remaining_updates() << "\n";
  return 0;
}

int cmd_admin_package(const fs::path& chain_file, const fs::path& sup_file,
                      const fs::path& out_file) {
  const fs::path chain_path = resolve_state_path(chain_file);
  FileLock lock(chain_path);
  csum::HashChain chain = csum::HashChain::load(chain_path);
  std::vector<std::uint8_t> payload = csum::detail::read_file(sup_file);

  const csum::TokenPair pair = chain.next_token_pair();
  csum::UpdateBundle bundle;
  bundle.chain_id = chain.id();
  bundle.ordinal = chain.length() - 1 - chain.cursor();
  bundle.tt = csum::make_transmission_token(payload, pair.at_curr, pair.at_prev);
  bundle.payload = std::move(payload);

  const auto bytes = csum::encode_bundle(bundle);
  // Bundle first, chain second: a crash in between leaves the cursor on the
  // old pair, so the same bundle is regenerated; no token is ever skipped.
  csum::detail::atomic_write(out_file, bytes);
  chain.save(chain_path);

  std::cout << "ordinal: " << bundle.ordinal << "\n";
  std::cout << "bundle: " << out_file.string() << " (" << bytes.size() << " bytes)\n";
  std::cout << "updates-remaining: " << chain.remaining_updates() << "\n";
  return 0;
}

int cmd_cs_init(const fs::path& state, const std::string& id_hex, const std::string& anchor_hex) {
  const fs::path state_path = resolve_state_path(state);
  FileLock lock(state_path);
  const csum::CubeSat cs(csum::chain_id_from_hex(id_hex), csum::token_from_hex(anchor_hex));
  cs.persist(state_path);
  std::cout << "state: " << state_path.string() << "\n";
  return 0;
}

int cmd_cs_apply(const fs::path& state, const fs::path& bundle_file) {
  const fs::path state_path = resolve_state_path(state);
  FileLock lock(state_path);
  csum::CubeSat cs = csum::CubeSat::restore(state_path);
  const auto bytes = csum::detail::read_file(bundle_file);
  const csum::UpdateReport report = cs.handle(std::span<const std::uint8_t>(bytes));
  std::cout << report.message << "\n";
  return report.status == csum::UpdateStatus::success ? 0 : 1;
}

int cmd_sim_run(const fs::path& scenario_file, const fs::path& transcript_file,
                std::uint64_t seed, bool seed_given) {
  csum::sim::Scenario scenario = csum::sim::load_scenario(scenario_file);
  if (seed_given) scenario.rng_seed = seed;
  const csum::sim::Transcript transcript = csum::sim::run_scenario(scenario);
  if (!transcript_file.empty()) write_text(transcript_file, transcript.to_jsonl());

  const csum::sim::Counters& c = transcript.counters;
  std::cout << "scenario '" << transcript.scenario_name << "' (seed " << transcript.rng_seed
            << "): " << c.issued << " issued, " << c.accepted << " accepted, " << c.rejected
            << " rejected, " << c.retransmissions << " retransmitted, " << c.forgeries_accepted
            << " forgeries accepted\n";
  for (const std::string& failure : transcript.assertion_failures) {
    std::cerr << "assertion failed: " << failure << "\n";
  }
  std::cout << "assertions: " << (transcript.assertions_passed ? "passed" : "FAILED") << "\n";
  return transcript.assertions_passed ? 0 : 1;
}

int cmd_bench_run(const fs::path& config_file, const fs::path& csv_file,
                  const fs::path& json_file) {
  const csum::bench::BenchConfig config = config_file.empty()
                                              ? csum::bench::BenchConfig{}
                                              : csum::bench::load_config(config_file);
  const csum::bench::BenchReport report = csum::bench::bench_all(config);
  report.print_summary(std::cout);
  if (!csv_file.empty()) {
    write_text(csv_file, report.to_csv());
    std::cout << "csv: " << csv_file.string() << "\n";
  }
  if (!json_file.empty()) write_text(json_file, report.summary_json());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csum - hash-chain secured software updates for CubeSats"};
  app.require_subcommand(1);

  // admin-init
  fs::path init_out;
  std::uint32_t init_length = 0;
  std::string init_id;
  auto* admin_init = app.add_subcommand("admin-init", "Create a hash chain and print its trust anchor");
  admin_init->add_option("--length", init_length, "Chain length n (supports n-1 updates)")
      ->required();
  admin_init->add_option("--out", init_out, "Chain file to write")->required();
  admin_init->add_option("--id", init_id, "Chain id as 32 hex chars (default: random)");

  // admin-package
  fs::path pkg_chain, pkg_sup, pkg_out;
  auto* admin_package =
      app.add_subcommand("admin-package", "Wrap a payload into the next update bundle");
  admin_package->add_option("--chain", pkg_chain, "Chain file (rewritten with advanced cursor)")
      ->required();
  admin_package->add_option("--sup", pkg_sup, "Payload file to package")->required();
  admin_package->add_option("--out", pkg_out, "Bundle file to write")->required();

  // cs-init
  fs::path csin_state;
  std::string csin_id, csin_anchor;
  auto* cs_init = app.add_subcommand("cs-init", "Provision CubeSat state with a trust anchor");
  cs_init->add_option("--state", csin_state, "State file to create")->required();
  cs_init->add_option("--chain-id", csin_id, "Chain id as 32 hex chars")->required();
  cs_init->add_option("--anchor", csin_anchor, "Trust anchor as 64 hex chars")->required();

  // cs-apply
  fs::path csap_state, csap_bundle;
  auto* cs_apply = app.add_subcommand("cs-apply", "Verify a bundle against CubeSat state");
  cs_apply->add_option("--state", csap_state, "State file (updated on acceptance)")->required();
  cs_apply->add_option("--bundle", csap_bundle, "Bundle file to verify")->required();

  // sim-run
  fs::path sim_scenario, sim_transcript;
  std::uint64_t sim_seed = 0;
  auto* sim_run = app.add_subcommand("sim-run", "Run an adversarial channel scenario");
  sim_run->add_option("--scenario", sim_scenario, "Scenario JSON file")->required();
  auto* seed_opt = sim_run->add_option("--seed", sim_seed, "Override the scenario RNG seed");
  sim_run->add_option("--transcript", sim_transcript, "Write the JSONL transcript here");

  // bench-run
  fs::path bench_config, bench_csv, bench_json;
  auto* bench_run = app.add_subcommand("bench-run", "Benchmark primitives and chain scaling");
  bench_run->add_option("--config", bench_config, "Benchmark config JSON (default: built-in)");
  bench_run->add_option("--csv", bench_csv, "Write per-sample CSV here");
  bench_run->add_option("--json", bench_json, "Write machine-readable summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*admin_init) {
    return guarded([&] { return cmd_admin_init(init_out, init_length, init_id); });
  }
  if (*admin_package) {
    return guarded([&] { return cmd_admin_package(pkg_chain, pkg_sup, pkg_out); });
  }
  if (*cs_init) {
    return guarded([&] { return cmd_cs_init(csin_state, csin_id, csin_anchor); });
  }
  if (*cs_apply) {
    return guarded([&] { return cmd_cs_apply(csap_state, csap_bundle); });
  }
  if (*sim_run) {
    return guarded(
        [&] { return cmd_sim_run(sim_scenario, sim_transcript, sim_seed, seed_opt->count() > 0); });
  }
  if (*bench_run) {
    return guarded([&] { return cmd_bench_run(bench_config, bench_csv, bench_json); });
  }
  return 2;
}
