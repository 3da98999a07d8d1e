#include "csum/simnet.hpp"

#include <algorithm>
#include <utility>

#include <json.hpp>

#include "csum/crypto.hpp"
#include "csum/errors.hpp"
#include "fileio.hpp"

namespace csum::sim {

namespace {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::issue: return "issue";
    case EventKind::channel: return "channel";
    case EventKind::decision: return "decision";
    case EventKind::report: return "report";
    case EventKind::retransmit: return "retransmit";
  }
  return "unknown";
}

bool chance(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
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

// Builds a bundle the administrator never issued. All strategies keep the
// target's chain id: a wrong id is dropped before any verification work and
// would make the flood cost measurements meaningless.
UpdateBundle forge_bundle(ForgeryStrategy strategy, std::mt19937_64& rng,
                          const ChainId& chain_id, std::uint32_t ordinal_hint,
                          std::span<const UpdateBundle> captured) {
  UpdateBundle forged;
  forged.chain_id = chain_id;
  forged.ordinal = ordinal_hint;
  forged.payload.resize(kTokenSize);
  fill_random(rng, forged.payload);
  switch (strategy) {
    case ForgeryStrategy::random_tt:
      fill_random(rng, forged.tt.bytes);
      break;
    case ForgeryStrategy::random_bundle: {
      forged.payload.resize(1 + static_cast<std::size_t>(rng() % 240));
      fill_random(rng, forged.payload);
      fill_random(rng, forged.tt.bytes);
      forged.ordinal = static_cast<std::uint32_t>(rng());
      break;
    }
    case ForgeryStrategy::stale_tt:
      if (captured.empty()) {
        fill_random(rng, forged.tt.bytes);
      } else {
        forged.tt = captured[rng() % captured.size()].tt;
      }
      break;
  }
  return forged;
}

// Drives one scenario end to end. Single-threaded by design, so the hash
// instrumentation deltas around each CubeSat decision are exact.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario)
      : sc_(scenario),
        rng_(scenario.rng_seed),
        stochastic_budget_(scenario.stochastic ? scenario.stochastic->actions : 0) {}

  Transcript run() {
    provision();
    for (std::size_t k = 0; k < sc_.payloads.size() && !aborted_; ++k) {
      run_update(static_cast<std::uint32_t>(k + 1));
    }
    if (!aborted_) run_epilogue();
    finish();
    return std::move(out_);
  }

 private:
  void provision() {
    std::array<std::uint8_t, kTokenSize> seed_bytes{};
    fill_random(rng_, seed_bytes);
    ChainId id{};
    fill_random(rng_, id);
    Seed seed(seed_bytes);
    auto prov = admin_.provision(sc_.chain_length, seed, id);
    chain_id_ = prov.chain_id;
    cs_.emplace(prov.chain_id, prov.trust_anchor);

    // Materialize random payloads once so retransmissions are byte-stable.
    payloads_.reserve(sc_.payloads.size());
    for (std::size_t i = 0; i < sc_.payloads.size(); ++i) {
      const PayloadSpec& spec = sc_.payloads[i];
      SoftwareUpdatePackage sup;
      sup.name = spec.name.empty() ? "update-" + std::to_string(i + 1) : spec.name;
      if (spec.random_size > 0) {
        sup.payload.resize(spec.random_size);
        fill_random(rng_, sup.payload);
      } else {
        sup.payload = spec.bytes;
      }
      payloads_.push_back(std::move(sup));
    }

    Event ev;
    ev.tick = tick_;
    ev.kind = EventKind::issue;
    ev.action = "provision";
    ev.detail = "chain=" + to_hex(chain_id_) + " n=" + std::to_string(sc_.chain_length) +
                " anchor=" + to_hex(prov.trust_anchor.bytes);
    out_.events.push_back(std::move(ev));
  }

  void run_update(std::uint32_t ordinal) {
    pending_bundle_ = admin_.issue(chain_id_, payloads_[ordinal - 1]);
    pending_bytes_ = encode_bundle(pending_bundle_);
    pending_ordinal_ = ordinal;
    out_.counters.issued++;

    Event ev;
    ev.tick = tick_;
    ev.kind = EventKind::issue;
    ev.action = "issue";
    ev.ordinal = ordinal;
    ev.detail = payloads_[ordinal - 1].name + " (" +
                std::to_string(pending_bundle_.payload.size()) + " bytes)";
    out_.events.push_back(std::move(ev));

    current_accepted_ = false;
    transmit(false);

    std::uint32_t attempts = 0;
    while (!current_accepted_) {
      if (++attempts > kAttemptCap) {
        fail_assertion("update " + std::to_string(ordinal) + " never accepted after " +
                       std::to_string(kAttemptCap) + " delivery attempts");
        aborted_ = true;
        return;
      }
      adversary_standalone_phase();
      if (current_accepted_) break;
      apply_in_flight_verdict();
      tick_++;
    }
    genuine_accepted_++;
  }

  // Standalone adversary actions do not consume the pending GS transmission:
  // they add traffic of the adversary's own making.
  void adversary_standalone_phase() {
    if (sc_.stochastic) {
      while (stochastic_budget_ > 0 && chance(rng_, 0.5)) {
        draw_standalone_action();
        if (current_accepted_) return;
      }
      return;
    }
    while (script_pos_ < sc_.script.size() && is_standalone(sc_.script[script_pos_])) {
      do_standalone(sc_.script[script_pos_]);
      script_pos_++;
      if (current_accepted_) return;
    }
  }

  static bool is_standalone(const ScriptedAction& a) {
    if (a.kind == ActionKind::replay || a.kind == ActionKind::inject ||
        a.kind == ActionKind::flood) {
      return true;
    }
    return a.kind == ActionKind::swap_tt && a.swap_payload_of >= 1;
  }

  void apply_in_flight_verdict() {
    ScriptedAction verdict;  // defaults to deliver
    if (!sc_.stochastic && script_pos_ < sc_.script.size()) {
      verdict = sc_.script[script_pos_++];
    } else if (sc_.stochastic && stochastic_budget_ > 0 && chance(rng_, 0.4)) {
      verdict = draw_in_flight_action();
    }

    switch (verdict.kind) {
      case ActionKind::deliver:
        deliver(on_channel_, "deliver", true);
        break;
      case ActionKind::drop: {
        out_.counters.adversarial_actions++;
        record_channel("drop", pending_ordinal_, "transmission dropped");
        // The GS hears nothing and retransmits after the scenario timeout.
        tick_ += sc_.retransmit_timeout_ticks;
        transmit(true);
        return;
      }
      case ActionKind::tamper: {
        out_.counters.adversarial_actions++;
        UpdateBundle mutated = attack_tamper(pending_bundle_, verdict.tamper);
        record_channel("tamper", pending_ordinal_, tamper_detail(verdict.tamper));
        deliver(encode_bundle(mutated), "tamper", true);
        break;
      }
      case ActionKind::swap_tt: {
        out_.counters.adversarial_actions++;
        std::uint32_t source = resolve_capture(verdict.swap_tt_of, "swap_tt.tt_of");
        UpdateBundle franken = pending_bundle_;
        franken.tt = captured_.at(source).tt;
        record_channel("swap_tt", pending_ordinal_,
                       "tt taken from update " + std::to_string(source));
        deliver(encode_bundle(franken), "swap_tt", true);
        break;
      }
      default:
        // Standalone kinds cannot reach this switch.
        break;
    }

    // A rejected genuine transmission produces a matching failure report,
    // and the GS retransmits on the next tick.
    if (!current_accepted_) transmit(true);
  }

  void do_standalone(const ScriptedAction& action) {
    switch (action.kind) {
      case ActionKind::replay: {
        out_.counters.adversarial_actions++;
        std::uint32_t source = resolve_capture(action.replay_of, "replay.of");
        record_channel("replay", source, "replayed capture of update " + std::to_string(source));
        deliver(encode_bundle(captured_.at(source)), "replay", false);
        break;
      }
      case ActionKind::inject: {
        out_.counters.adversarial_actions++;
        UpdateBundle forged =
            forge_bundle(action.strategy, rng_, chain_id_, pending_ordinal_, captured_list());
        record_channel("inject", forged.ordinal, strategy_name(action.strategy));
        deliver(encode_bundle(forged), "inject", false);
        break;
      }
      case ActionKind::flood: {
        auto snapshot = captured_vector();
        for (std::uint32_t i = 0; i < action.flood_count && !current_accepted_; ++i) {
          out_.counters.adversarial_actions++;
          UpdateBundle forged =
              forge_bundle(action.strategy, rng_, chain_id_, pending_ordinal_, snapshot);
          deliver(encode_bundle(forged), "flood", false);
        }
        break;
      }
      case ActionKind::swap_tt: {
        out_.counters.adversarial_actions++;
        std::uint32_t pay = resolve_capture(action.swap_payload_of, "swap_tt.payload_of");
        std::uint32_t tok = resolve_capture(action.swap_tt_of, "swap_tt.tt_of");
        UpdateBundle franken = captured_.at(pay);
        franken.tt = captured_.at(tok).tt;
        record_channel("swap_tt", pay,
                       "payload of update " + std::to_string(pay) + " with tt of update " +
                           std::to_string(tok));
        deliver(encode_bundle(franken), "swap_tt", false);
        break;
      }
      default:
        break;
    }
  }

  void draw_standalone_action() {
    stochastic_budget_--;
    const StochasticProfile& p = *sc_.stochastic;
    std::discrete_distribution<int> pick({p.w_replay, p.w_inject, p.w_flood});
    ScriptedAction action;
    switch (pick(rng_)) {
      case 0: action.kind = ActionKind::replay; action.replay_of = random_capture(); break;
      case 1: action.kind = ActionKind::inject; action.strategy = random_strategy(); break;
      default:
        action.kind = ActionKind::flood;
        action.flood_count = p.flood_burst;
        action.strategy = random_strategy();
        break;
    }
    do_standalone(action);
  }

  ScriptedAction draw_in_flight_action() {
    stochastic_budget_--;
    const StochasticProfile& p = *sc_.stochastic;
    std::discrete_distribution<int> pick({p.w_drop, p.w_tamper, p.w_swap});
    ScriptedAction action;
    switch (pick(rng_)) {
      case 0:
        action.kind = ActionKind::drop;
        break;
      case 1:
        action = random_tamper();
        break;
      default: {
        // An in-flight swap with the current update's own TT would be the
        // identity; only older captures make a real attack.
        std::vector<std::uint32_t> older;
        for (const auto& [ordinal, bundle] : captured_) {
          if (ordinal < pending_ordinal_) older.push_back(ordinal);
        }
        if (older.empty()) {
          action = random_tamper();
        } else {
          action.kind = ActionKind::swap_tt;
          action.swap_tt_of = static_cast<int>(older[rng_() % older.size()]);
        }
        break;
      }
    }
    return action;
  }

  ScriptedAction random_tamper() {
    ScriptedAction action;
    action.kind = ActionKind::tamper;
    const bool payload_has_bits = !pending_bundle_.payload.empty();
    action.tamper.target =
        (payload_has_bits && chance(rng_, 0.5)) ? TamperTarget::payload : TamperTarget::tt;
    const std::uint64_t bits = action.tamper.target == TamperTarget::payload
                                   ? pending_bundle_.payload.size() * 8
                                   : kTokenSize * 8;
    action.tamper.bit_index = rng_() % bits;
    return action;
  }

  ForgeryStrategy random_strategy() {
    switch (rng_() % 3) {
      case 0: return ForgeryStrategy::random_tt;
      case 1: return ForgeryStrategy::random_bundle;
      default: return ForgeryStrategy::stale_tt;
    }
  }

  // After the last update is accepted the adversary keeps going: replays of
  // old bundles and fresh forgeries against the settled state.
  void run_epilogue() {
    // No genuine transmission is pending any more; clear the per-update
    // delivery state so epilogue attacks (floods in particular) are not
    // suppressed by the previous update's accepted flag.
    current_accepted_ = false;
    on_channel_.clear();
    pending_bytes_.clear();
    pending_ordinal_ = 0;
    if (sc_.stochastic) {
      while (stochastic_budget_ > 0) {
        tick_++;
        draw_standalone_action();
      }
      return;
    }
    while (script_pos_ < sc_.script.size()) {
      const ScriptedAction& action = sc_.script[script_pos_++];
      tick_++;
      if (!is_standalone(action)) {
        fail_assertion("script entry " + std::to_string(script_pos_) +
                       " needs a pending update but all updates are settled");
        aborted_ = true;
        return;
      }
      do_standalone(action);
    }
  }

  // Puts the pending bundle on the channel through the ground station. The
  // adversary reads everything that passes, so the capture list updates here.
  void transmit(bool retransmission) {
    on_channel_ = gs_.relay(pending_bytes_);
    captured_[pending_ordinal_] = pending_bundle_;
    if (retransmission) {
      out_.counters.retransmissions++;
      Event ev;
      ev.tick = tick_;
      ev.kind = EventKind::retransmit;
      ev.action = "retransmit";
      ev.ordinal = pending_ordinal_;
      out_.events.push_back(std::move(ev));
    }
  }

  // Hands bytes to the CubeSat and accounts for the outcome. `genuine`
  // marks the GS's own transmission slot (possibly mangled in flight) as
  // opposed to traffic the adversary made up.
  void deliver(const std::vector<std::uint8_t>& bytes, const std::string& label, bool genuine) {
    out_.counters.delivered++;
    const Token token_before = cs_->token();
    const std::uint32_t installed_before = cs_->accepted_count();
    const crypto::HashStats before = crypto::hash_stats();
    UpdateReport report = cs_->handle(std::span<const std::uint8_t>(bytes));
    const crypto::HashStats after = crypto::hash_stats();
    out_.counters.cs_payload_digests += after.payload_digests - before.payload_digests;
    out_.counters.cs_token_chain_hashes += after.token_chain_hashes - before.token_chain_hashes;

    const bool accepted = report.status == UpdateStatus::success;
    std::string reason;
    if (accepted) {
      out_.counters.accepted++;
      if (bytes == pending_bytes_ && !current_accepted_) {
        current_accepted_ = true;
      } else {
        out_.counters.forgeries_accepted++;
        fail_assertion("CubeSat accepted a transmission the administrator did not issue (" +
                       label + ", tick " + std::to_string(tick_) + ")");
      }
    } else {
      out_.counters.rejected++;
      reason = classify_rejection(bytes);
      out_.counters.rejected_by_reason[reason]++;
      if (cs_->token() != token_before || cs_->accepted_count() != installed_before) {
        fail_assertion("CubeSat state changed on a rejected transmission (" + label + ", tick " +
                       std::to_string(tick_) + ")");
      }
    }

    Event ev;
    ev.tick = tick_;
    ev.kind = EventKind::decision;
    ev.action = label;
    ev.ordinal = report.ordinal;
    ev.genuine = genuine;
    ev.accepted = accepted;
    ev.reason = reason;
    ev.detail = report.message;
    out_.events.push_back(std::move(ev));
  }

  std::string classify_rejection(const std::vector<std::uint8_t>& bytes) const {
    try {
      UpdateBundle b = decode_bundle(bytes);
      return b.chain_id != cs_->chain_id() ? "wrong-chain" : "token-mismatch";
    } catch (const DecodeError&) {
      return "malformed";
    }
  }

  std::uint32_t resolve_capture(int reference, const char* field) {
    if (captured_.empty()) {
      throw ConfigError(std::string(field) + ": nothing has been observed on the channel yet");
    }
    if (reference == -1) return captured_.rbegin()->first;
    if (reference < 1 || !captured_.contains(static_cast<std::uint32_t>(reference))) {
      throw ConfigError(std::string(field) + ": update " + std::to_string(reference) +
                        " has not been observed on the channel");
    }
    return static_cast<std::uint32_t>(reference);
  }

  int random_capture() {
    // Keys are ordinals 1..k with no gaps: every issued update hits the
    // channel before its first delivery attempt.
    return static_cast<int>(1 + rng_() % captured_.size());
  }

  std::vector<UpdateBundle> captured_vector() const {
    std::vector<UpdateBundle> list;
    list.reserve(captured_.size());
    for (const auto& [ordinal, bundle] : captured_) list.push_back(bundle);
    return list;
  }

  std::span<const UpdateBundle> captured_list() {
    captured_snapshot_ = captured_vector();
    return captured_snapshot_;
  }

  void record_channel(const std::string& action, std::uint32_t ordinal, std::string detail) {
    Event ev;
    ev.tick = tick_;
    ev.kind = EventKind::channel;
    ev.action = action;
    ev.ordinal = ordinal;
    ev.detail = std::move(detail);
    out_.events.push_back(std::move(ev));
  }

  static std::string tamper_detail(const TamperSpec& spec) {
    if (spec.identity) return "identity mutation";
    return std::string(spec.target == TamperTarget::payload ? "payload" : "tt") + " bit " +
           std::to_string(spec.bit_index) + " flipped";
  }

  static const char* strategy_name(ForgeryStrategy s) {
    switch (s) {
      case ForgeryStrategy::random_tt: return "random_tt";
      case ForgeryStrategy::random_bundle: return "random_bundle";
      case ForgeryStrategy::stale_tt: return "stale_tt";
    }
    return "unknown";
  }

  void fail_assertion(std::string what) {
    out_.assertion_failures.push_back(std::move(what));
  }

  void finish() {
    out_.scenario_name = sc_.name;
    out_.rng_seed = sc_.rng_seed;
    out_.final_token = cs_->token();
    const HashChain& chain = admin_.chain(chain_id_);
    for (std::uint32_t i = 1; i <= chain.length(); ++i) {
      if (chain.token_at(i) == out_.final_token) {
        out_.final_token_index = i;
        break;
      }
    }

    const Expectation& expect = sc_.expect;
    if (expect.accepted && out_.counters.accepted != *expect.accepted) {
      fail_assertion("expected " + std::to_string(*expect.accepted) + " accepted, got " +
                     std::to_string(out_.counters.accepted));
    }
    if (expect.rejected_at_least && out_.counters.rejected < *expect.rejected_at_least) {
      fail_assertion("expected at least " + std::to_string(*expect.rejected_at_least) +
                     " rejected, got " + std::to_string(out_.counters.rejected));
    }
    if (expect.final_token_index && out_.final_token_index != *expect.final_token_index) {
      fail_assertion("expected final token index " + std::to_string(*expect.final_token_index) +
                     ", got " + std::to_string(out_.final_token_index));
    }
    if (expect.forgeries_accepted_zero && out_.counters.forgeries_accepted != 0) {
      fail_assertion(std::to_string(out_.counters.forgeries_accepted) + " forgeries accepted");
    }
    if (expect.all_genuine_accepted && genuine_accepted_ != payloads_.size()) {
      fail_assertion("only " + std::to_string(genuine_accepted_) + " of " +
                     std::to_string(payloads_.size()) + " genuine updates accepted");
    }
    out_.assertions_passed = out_.assertion_failures.empty();
  }

  static constexpr std::uint32_t kAttemptCap = 10'000;

  const Scenario& sc_;
  std::mt19937_64 rng_;
  Administrator admin_;
  GroundStation gs_;
  std::optional<CubeSat> cs_;
  ChainId chain_id_{};

  std::vector<SoftwareUpdatePackage> payloads_;
  std::map<std::uint32_t, UpdateBundle> captured_;  // ordinal -> observed bundle
  std::vector<UpdateBundle> captured_snapshot_;

  UpdateBundle pending_bundle_;
  std::vector<std::uint8_t> pending_bytes_;
  std::vector<std::uint8_t> on_channel_;
  std::uint32_t pending_ordinal_ = 0;
  bool current_accepted_ = false;
  std::size_t genuine_accepted_ = 0;

  std::size_t script_pos_ = 0;
  std::uint64_t stochastic_budget_ = 0;
  std::uint64_t tick_ = 0;
  bool aborted_ = false;

  Transcript out_;
};

}  // namespace

Transcript run_scenario(const Scenario& scenario) {
  return Simulation(scenario).run();
}

UpdateBundle attack_tamper(const UpdateBundle& bundle, const TamperSpec& mutation) {
  UpdateBundle mutated = bundle;
  if (mutation.identity) return mutated;
  std::uint8_t* data = nullptr;
  std::uint64_t bit_count = 0;
  if (mutation.target == TamperTarget::payload) {
    data = mutated.payload.data();
    bit_count = mutated.payload.size() * 8;
  } else {
    data = mutated.tt.bytes.data();
    bit_count = kTokenSize * 8;
  }
  if (mutation.bit_index >= bit_count) {
    throw ConfigError("tamper bit " + std::to_string(mutation.bit_index) +
                      " out of range (target has " + std::to_string(bit_count) + " bits)");
  }
  data[mutation.bit_index / 8] ^= static_cast<std::uint8_t>(1u << (mutation.bit_index % 8));
  return mutated;
}

FloodResult attack_flood(CubeSat& target, std::uint32_t count, ForgeryStrategy strategy,
                         std::mt19937_64& rng, std::span<const UpdateBundle> captured) {
  FloodResult result;
  for (std::uint32_t i = 0; i < count; ++i) {
    UpdateBundle forged =
        forge_bundle(strategy, rng, target.chain_id(), target.accepted_count() + 1, captured);
    UpdateReport report = target.handle(forged);
    result.delivered++;
    Event ev;
    ev.tick = i;
    ev.kind = EventKind::decision;
    ev.action = "flood";
    ev.ordinal = report.ordinal;
    ev.accepted = report.status == UpdateStatus::success;
    ev.detail = report.message;
    if (ev.accepted) result.accepted++;
    result.events.push_back(std::move(ev));
  }
  return result;
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_scenario(const std::string& what) { throw ConfigError("scenario: " + what); }

const json& require_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad_scenario(std::string("missing required field \"") + key + "\"");
  return *it;
}

std::uint64_t get_uint(const json& j, const char* key, std::uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned()) bad_scenario(std::string("\"") + key + "\" must be a non-negative integer");
  return it->get<std::uint64_t>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) bad_scenario(std::string("\"") + key + "\" must be a boolean");
  return it->get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) bad_scenario(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

int get_reference(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return -1;
  if (!it->is_number_integer()) bad_scenario(std::string("\"") + key + "\" must be an integer");
  const auto value = it->get<std::int64_t>();
  if (value != -1 && value < 1) bad_scenario(std::string("\"") + key + "\" must be >= 1 or -1");
  return static_cast<int>(value);
}

ForgeryStrategy parse_strategy(const std::string& name) {
  if (name == "random_tt") return ForgeryStrategy::random_tt;
  if (name == "random_bundle") return ForgeryStrategy::random_bundle;
  if (name == "stale_tt") return ForgeryStrategy::stale_tt;
  bad_scenario("unknown forgery strategy \"" + name + "\"");
}

PayloadSpec parse_payload(const json& j, std::size_t index) {
  if (!j.is_object()) bad_scenario("payload entries must be objects");
  PayloadSpec spec;
  spec.name = get_string(j, "name", "update-" + std::to_string(index + 1));
  const bool has_text = j.contains("text");
  const bool has_hex = j.contains("hex");
  const bool has_random = j.contains("random_size");
  if (has_text + has_hex + has_random != 1) {
    bad_scenario("payload \"" + spec.name + "\" needs exactly one of text/hex/random_size");
  }
  if (has_text) {
    const std::string text = get_string(j, "text", "");
    spec.bytes.assign(text.begin(), text.end());
  } else if (has_hex) {
    spec.bytes = from_hex(get_string(j, "hex", ""));
  } else {
    const auto size = get_uint(j, "random_size", 0);
    if (size == 0) bad_scenario("payload \"" + spec.name + "\": random_size must be > 0");
    spec.random_size = static_cast<std::uint32_t>(size);
  }
  return spec;
}

ScriptedAction parse_action(const json& j, std::size_t index) {
  if (!j.is_object()) bad_scenario("script entries must be objects");
  ScriptedAction action;
  const std::string kind = get_string(j, "action", "");
  const std::string where = "script entry " + std::to_string(index + 1);
  if (kind == "deliver") {
    action.kind = ActionKind::deliver;
  } else if (kind == "drop") {
    action.kind = ActionKind::drop;
  } else if (kind == "tamper") {
    action.kind = ActionKind::tamper;
    const std::string target = get_string(j, "target", "payload");
    if (target == "payload") {
      action.tamper.target = TamperTarget::payload;
    } else if (target == "tt") {
      action.tamper.target = TamperTarget::tt;
    } else {
      bad_scenario(where + ": unknown tamper target \"" + target + "\"");
    }
    action.tamper.bit_index = get_uint(j, "bit", 0);
    action.tamper.identity = get_bool(j, "identity", false);
  } else if (kind == "swap_tt") {
    action.kind = ActionKind::swap_tt;
    action.swap_payload_of = get_reference(j, "payload_of");
    action.swap_tt_of = get_reference(j, "tt_of");
  } else if (kind == "replay") {
    action.kind = ActionKind::replay;
    action.replay_of = get_reference(j, "of");
  } else if (kind == "inject") {
    action.kind = ActionKind::inject;
    action.strategy = parse_strategy(get_string(j, "strategy", "random_tt"));
  } else if (kind == "flood") {
    action.kind = ActionKind::flood;
    const auto count = get_uint(j, "count", 0);
    if (count == 0) bad_scenario(where + ": flood count must be > 0");
    action.flood_count = static_cast<std::uint32_t>(count);
    action.strategy = parse_strategy(get_string(j, "strategy", "random_tt"));
  } else {
    bad_scenario(where + ": unknown action \"" + kind + "\"");
  }
  return action;
}

StochasticProfile parse_stochastic(const json& j) {
  if (!j.is_object()) bad_scenario("\"stochastic\" must be an object");
  StochasticProfile profile;
  const auto actions = get_uint(j, "actions", 0);
  if (actions == 0) bad_scenario("stochastic.actions must be > 0");
  profile.actions = static_cast<std::uint32_t>(actions);
  profile.flood_burst = static_cast<std::uint32_t>(get_uint(j, "flood_burst", profile.flood_burst));
  if (auto it = j.find("weights"); it != j.end()) {
    if (!it->is_object()) bad_scenario("stochastic.weights must be an object");
    auto weight = [&](const char* key, double fallback) {
      auto w = it->find(key);
      if (w == it->end()) return fallback;
      if (!w->is_number() || w->get<double>() < 0) {
        bad_scenario(std::string("stochastic.weights.") + key + " must be a non-negative number");
      }
      return w->get<double>();
    };
    profile.w_drop = weight("drop", profile.w_drop);
    profile.w_tamper = weight("tamper", profile.w_tamper);
    profile.w_swap = weight("swap", profile.w_swap);
    profile.w_replay = weight("replay", profile.w_replay);
    profile.w_inject = weight("inject", profile.w_inject);
    profile.w_flood = weight("flood", profile.w_flood);
  }
  return profile;
}

Expectation parse_expect(const json& j) {
  if (!j.is_object()) bad_scenario("\"expect\" must be an object");
  Expectation expect;
  if (j.contains("accepted")) expect.accepted = get_uint(j, "accepted", 0);
  if (j.contains("rejected_at_least")) {
    expect.rejected_at_least = get_uint(j, "rejected_at_least", 0);
  }
  if (j.contains("final_token_index")) {
    expect.final_token_index = static_cast<std::uint32_t>(get_uint(j, "final_token_index", 0));
  }
  expect.forgeries_accepted_zero = get_bool(j, "forgeries_accepted_zero", true);
  expect.all_genuine_accepted = get_bool(j, "all_genuine_accepted", true);
  return expect;
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) bad_scenario("not valid JSON");
  if (!j.is_object()) bad_scenario("top level must be an object");

  Scenario sc;
  sc.name = get_string(j, "name", "");
  if (sc.name.empty()) bad_scenario("\"name\" is required");
  sc.rng_seed = get_uint(j, "rng_seed", 0);
  sc.chain_length = static_cast<std::uint32_t>(get_uint(j, "chain_length", 0));
  if (sc.chain_length < 2) bad_scenario("chain_length must be >= 2");
  sc.retransmit_timeout_ticks =
      static_cast<std::uint32_t>(get_uint(j, "retransmit_timeout_ticks", 3));
  if (sc.retransmit_timeout_ticks == 0) bad_scenario("retransmit_timeout_ticks must be >= 1");

  const json& payloads = require_field(j, "payloads");
  if (!payloads.is_array() || payloads.empty()) {
    bad_scenario("\"payloads\" must be a non-empty array");
  }
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    sc.payloads.push_back(parse_payload(payloads[i], i));
  }
  if (sc.payloads.size() > sc.chain_length - 1) {
    bad_scenario("a chain of length " + std::to_string(sc.chain_length) + " supports only " +
                 std::to_string(sc.chain_length - 1) + " updates, got " +
                 std::to_string(sc.payloads.size()) + " payloads");
  }

  if (auto it = j.find("script"); it != j.end()) {
    if (!it->is_array()) bad_scenario("\"script\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      sc.script.push_back(parse_action((*it)[i], i));
    }
  }
  if (auto it = j.find("stochastic"); it != j.end()) {
    sc.stochastic = parse_stochastic(*it);
  }
  if (!sc.script.empty() && sc.stochastic) {
    bad_scenario("\"script\" and \"stochastic\" are mutually exclusive");
  }
  if (auto it = j.find("expect"); it != j.end()) {
    sc.expect = parse_expect(*it);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::vector<std::uint8_t> raw;
  try {
    raw = detail::read_file(file);
  } catch (const IoError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return parse_scenario(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

std::string Transcript::to_jsonl() const {
  using ordered = nlohmann::ordered_json;
  std::string out;
  for (const Event& ev : events) {
    ordered line;
    line["tick"] = ev.tick;
    line["event"] = event_kind_name(ev.kind);
    if (!ev.action.empty()) line["action"] = ev.action;
    if (ev.ordinal != 0) line["ordinal"] = ev.ordinal;
    if (ev.kind == EventKind::decision) {
      line["genuine"] = ev.genuine;
      line["accepted"] = ev.accepted;
    }
    if (!ev.reason.empty()) line["reason"] = ev.reason;
    if (!ev.detail.empty()) line["detail"] = ev.detail;
    out += line.dump();
    out += '\n';
  }
  ordered summary;
  summary["summary"] = true;
  summary["scenario"] = scenario_name;
  summary["rng_seed"] = rng_seed;
  summary["issued"] = counters.issued;
  summary["delivered"] = counters.delivered;
  summary["accepted"] = counters.accepted;
  summary["rejected"] = counters.rejected;
  summary["rejected_by_reason"] = counters.rejected_by_reason;
  summary["forgeries_accepted"] = counters.forgeries_accepted;
  summary["adversarial_actions"] = counters.adversarial_actions;
  summary["retransmissions"] = counters.retransmissions;
  summary["cs_payload_digests"] = counters.cs_payload_digests;
  summary["cs_token_chain_hashes"] = counters.cs_token_chain_hashes;
  summary["final_token"] = to_hex(final_token.bytes);
  summary["final_token_index"] = final_token_index;
  summary["assertions_passed"] = assertions_passed;
  summary["assertion_failures"] = assertion_failures;
  out += summary.dump();
  out += '\n';
  return out;
}

}  // namespace csum::sim
