#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "csum/roles.hpp"
#include "csum/types.hpp"
#include "csum/wire.hpp"

namespace csum::sim {

// The adversary owns the GS->CS channel: it can read everything that passes,
// mangle or drop a transmission in flight, and deliver transmissions of its
// own (replays of captured bundles, frankensteined token swaps, forgeries).
// It cannot touch administrator or CubeSat internal state.
enum class ActionKind { deliver, drop, tamper, swap_tt, replay, inject, flood };

enum class TamperTarget { payload, tt };

struct TamperSpec {
  TamperTarget target = TamperTarget::payload;
  std::uint64_t bit_index = 0;  // bit to flip within the target field
  bool identity = false;        // no-op mutation (control case)
};

enum class ForgeryStrategy { random_tt, random_bundle, stale_tt };

// One entry of a scripted channel program. deliver/drop/tamper act on the
// pending genuine transmission (consuming one delivery attempt);
// replay/inject/flood deliver adversarial transmissions of their own.
// swap_tt does either: with swap_payload_of == -1 it mangles the pending
// transmission to carry the TT captured from update `swap_tt_of`; with
// swap_payload_of >= 1 it crafts a standalone bundle from two captures.
// Capture references are update ordinals (1-based); -1 = most recent.
struct ScriptedAction {
  ActionKind kind = ActionKind::deliver;
  TamperSpec tamper;
  int replay_of = -1;
  int swap_payload_of = -1;
  int swap_tt_of = -1;
  std::uint32_t flood_count = 0;
  ForgeryStrategy strategy = ForgeryStrategy::random_tt;
};

// Randomized adversary: `actions` interference draws spread across the run,
// chosen by relative weight.
struct StochasticProfile {
  std::uint32_t actions = 0;
  double w_drop = 1.0;
  double w_tamper = 1.0;
  double w_swap = 1.0;
  double w_replay = 1.0;
  double w_inject = 1.0;
  double w_flood = 0.2;
  std::uint32_t flood_burst = 10;
};

struct PayloadSpec {
  std::string name;
  std::vector<std::uint8_t> bytes;  // used when random_size == 0
  std::uint32_t random_size = 0;    // draw this many bytes from the scenario RNG
};

struct Expectation {
  std::optional<std::uint64_t> accepted;
  std::optional<std::uint64_t> rejected_at_least;
  std::optional<std::uint32_t> final_token_index;  // CS token == T_index
  bool forgeries_accepted_zero = true;
  bool all_genuine_accepted = true;
};

struct Scenario {
  std::string name;
  std::uint64_t rng_seed = 0;
  std::uint32_t chain_length = 3;
  std::vector<PayloadSpec> payloads;
  std::vector<ScriptedAction> script;
  std::optional<StochasticProfile> stochastic;
  std::uint32_t retransmit_timeout_ticks = 3;
  Expectation expect;
};

Scenario load_scenario(const std::filesystem::path& file);  // throws ConfigError
Scenario parse_scenario(std::string_view json_text);

enum class EventKind { issue, channel, decision, report, retransmit };

struct Event {
  std::uint64_t tick = 0;
  EventKind kind = EventKind::channel;
  std::string action;  // deliver/drop/tamper/... for channel events
  std::uint32_t ordinal = 0;
  bool genuine = false;
  bool accepted = false;
  std::string reason;
  std::string detail;
};

struct Counters {
  std::uint64_t issued = 0;
  std::uint64_t delivered = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::map<std::string, std::uint64_t> rejected_by_reason;
  std::uint64_t forgeries_accepted = 0;
  std::uint64_t adversarial_actions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t cs_payload_digests = 0;
  std::uint64_t cs_token_chain_hashes = 0;
};

struct Transcript {
  std::string scenario_name;
  std::uint64_t rng_seed = 0;
  std::vector<Event> events;
  Counters counters;
  Token final_token;
  std::uint32_t final_token_index = 0;  // k such that token == T_k; 0 if unknown
  bool assertions_passed = false;
  std::vector<std::string> assertion_failures;

  // Line-delimited records: one JSON object per event plus a trailing
  // summary record.
  std::string to_jsonl() const;
};

// Runs the deterministic discrete-event loop. The chain seed and id derive
// from the scenario RNG, so identical (scenario, rng_seed) give identical
// transcripts.
Transcript run_scenario(const Scenario& scenario);

// Returns a mutated copy; the original is untouched.
UpdateBundle attack_tamper(const UpdateBundle& bundle, const TamperSpec& mutation);

struct FloodResult {
  std::uint64_t delivered = 0;
  std::uint64_t accepted = 0;
  std::vector<Event> events;
};

// Delivers `count` forged bundles straight to the target. stale_tt draws
// transmission tokens from `captured`.
FloodResult attack_flood(CubeSat& target, std::uint32_t count, ForgeryStrategy strategy,
                         std::mt19937_64& rng, std::span<const UpdateBundle> captured = {});

}  // namespace csum::sim
