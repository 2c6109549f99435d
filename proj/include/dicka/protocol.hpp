#pragma once

// End-to-end execution of the N-party DICKA protocol on simulated honest
// devices:
//   1. per round: source emits the noisy GHZ state, Alice draws T_i, parties
//      pick inputs and measure;
//   2. inputs are announced (they are public in the transcript);
//   3. error correction: Alice -> Bobs hash-verified reconciliation, and
//      each Bob discloses his test-round bits to Alice;
//   4. parameter estimation on the test rounds;
//   5. privacy amplification with a Toeplitz hash.
//
// Classical channels are authenticated and lossless. Every random choice
// comes from a named substream of the configured seed, so a transcript is a
// pure function of the configuration.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dicka/bitstring.hpp"
#include "dicka/errors.hpp"
#include "dicka/game.hpp"
#include "dicka/hashing.hpp"
#include "dicka/keyrate.hpp"
#include "dicka/quantum.hpp"
#include "dicka/rng.hpp"

namespace dicka::protocol {

struct ProtocolConfig {
  int n_parties = 3;
  std::int64_t n_rounds = 10000;
  double test_prob = 0.05;
  double threshold = 0.8;
  double qber = 0.0;
  keyrate::EpsilonBudget eps;
  std::uint64_t seed = 0;
  keyrate::FormulaVariant variant = keyrate::FormulaVariant::main;
  /// Explicit final key length; unset means the finite-size formula decides.
  std::optional<std::int64_t> key_length;

  void validate() const {
    if (n_parties < 3 || n_parties > quantum::kMaxQubits) {
      throw ConfigError("n_parties must lie in [3, " + std::to_string(quantum::kMaxQubits) + "]");
    }
    if (n_rounds < 0) throw ConfigError("n_rounds must be non-negative");
    if (!(test_prob > 0.0 && test_prob <= 1.0)) throw ConfigError("test_prob must lie in (0, 1]");
    if (!(threshold > keyrate::kClassicalBound && threshold < keyrate::kTsirelson)) {
      throw ConfigError("threshold must lie strictly between 3/4 and 1/2 + 1/(2 sqrt 2)");
    }
    if (!(qber >= 0.0 && qber < 0.5)) throw ConfigError("qber must lie in [0, 1/2)");
    try {
      eps.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (key_length && (*key_length < 0 || *key_length > n_rounds)) {
      throw ConfigError("key_length must lie in [0, n_rounds]");
    }
  }

  keyrate::RateParams rate_params() const {
    keyrate::RateParams p;
    p.n_parties = n_parties;
    p.mu = test_prob;
    p.delta = threshold;
    p.qber = qber;
    p.n_rounds = std::max<std::int64_t>(n_rounds, 1);
    p.eps = eps;
    p.variant = variant;
    return p;
  }

  bool operator==(const ProtocolConfig&) const = default;
};

enum class Score { lose = 0, win = 1, untested = 2 };

struct RoundRecord {
  int t = 0;       // test flag T_i
  int x = 0;       // Alice's input
  int y1 = 2;      // Bob1's input
  int a_out = 0;   // Alice's output
  BitString b_outs;  // Bob_k's output at position k - 1
  Score c = Score::untested;

  bool operator==(const RoundRecord&) const = default;
};

enum class AbortReason { ec_failure, parameter_estimation };

inline std::string to_string(AbortReason r) {
  return r == AbortReason::ec_failure ? "ec_failure" : "parameter_estimation";
}

/// Classical error-correction messages.
struct EcMessages {
  hashing::ToeplitzSeed alice_seed;      // part of O_A
  BitString alice_tag;                   // part of O_A
  std::vector<BitString> bob_disclosures;  // O_(k): Bob_k's test-round bits
  std::vector<bool> bob_verified;          // per-Bob tag check result

  bool operator==(const EcMessages&) const = default;
};

struct KeyMaterial {
  BitString raw_key;
  BitString final_key;

  bool operator==(const KeyMaterial&) const = default;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<RoundRecord> rounds;
  EcMessages ec;
  std::int64_t tests = 0;
  std::int64_t wins = 0;
  bool pe_vacuous = false;
  std::optional<hashing::ToeplitzSeed> pa_seed;
  std::optional<AbortReason> abort;
  /// Party-ordered key material (0 = Alice); present iff not aborted.
  std::vector<KeyMaterial> keys;

  std::int64_t key_length() const {
    return keys.empty() ? 0 : static_cast<std::int64_t>(keys.front().final_key.size());
  }
  bool keys_identical() const {
    for (const auto& k : keys) {
      if (!(k.final_key == keys.front().final_key)) return false;
    }
    return true;
  }
  std::optional<double> empirical_win_rate() const {
    if (tests == 0) return std::nullopt;
    return static_cast<double>(wins) / static_cast<double>(tests);
  }

  bool operator==(const Transcript&) const = default;
};

/// Source of the per-round state. It has no access to measurement records.
class Source {
 public:
  Source(int n_parties, double qber)
      : state_(quantum::depolarize_each(quantum::make_ghz(n_parties),
                                        quantum::NoiseModel(keyrate::qber_to_pdep(qber)))) {}

  const quantum::MixedState& emit() const noexcept { return state_; }

 private:
  quantum::MixedState state_;
};

/// Joint outcome distributions of the honest devices for every input
/// combination the protocol uses: the key-generation inputs (0, 2, 0, ..., 0)
/// and the four test combinations (x, y, 1, ..., 1).
class HonestDevices {
 public:
  explicit HonestDevices(const quantum::MixedState& state) : n_(state.n_qubits()) {
    using quantum::Role;
    using quantum::setting_observable;
    std::vector<quantum::Observable> key_obs{setting_observable(Role::alice, 0), setting_observable(Role::bob1, 2)};
    for (int k = 2; k < n_; ++k) key_obs.push_back(setting_observable(Role::bob_k, 0));
    key_dist_ = quantum::joint_distribution(state, key_obs);
    const auto bundle = game::honest_settings();
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) test_dist_[2 * x + y] = quantum::joint_distribution(state, bundle.for_questions(n_, x, y));
    }
  }

  int n_parties() const noexcept { return n_; }

  const std::vector<double>& distribution(int t, int x, int y) const {
    return t == 0 ? key_dist_ : test_dist_[static_cast<std::size_t>(2 * x + y)];
  }

 private:
  int n_;
  std::vector<double> key_dist_;
  std::array<std::vector<double>, 4> test_dist_;
};

/// Protocol state between phases: the public transcript plus the parties'
/// private registers.
struct Session {
  Transcript transcript;
  std::vector<BitString> bob_raw_keys;        // Bob_k's guess of Alice's string
  std::vector<BitString> alice_test_guesses;  // Alice's guess G_(k)

  int n_parties() const noexcept { return transcript.config.n_parties; }
  std::size_t n_rounds() const noexcept { return transcript.rounds.size(); }
  Rng root_rng() const { return Rng(transcript.config.seed); }

  BitString alice_string() const {
    BitString s(n_rounds());
    for (std::size_t i = 0; i < n_rounds(); ++i) s.set(i, transcript.rounds[i].a_out != 0);
    return s;
  }
  BitString bob_string(int k) const {
    BitString s(n_rounds());
    for (std::size_t i = 0; i < n_rounds(); ++i) s.set(i, transcript.rounds[i].b_outs[static_cast<std::size_t>(k - 1)]);
    return s;
  }
};

/// Steps 1 and 2: state distribution, input choice, measurement and the
/// public announcement of all inputs.
inline Session measure_rounds(const ProtocolConfig& config) {
  config.validate();
  Session session;
  session.transcript.config = config;
  const Source source(config.n_parties, config.qber);
  const HonestDevices devices(source.emit());
  const Rng root(config.seed);
  const int n = config.n_parties;

  auto& rounds = session.transcript.rounds;
  rounds.reserve(static_cast<std::size_t>(config.n_rounds));
  for (std::int64_t i = 0; i < config.n_rounds; ++i) {
    Rng rng = root.split(Stream::rounds, static_cast<std::uint64_t>(i));
    RoundRecord r;
    r.t = rng.bernoulli(config.test_prob) ? 1 : 0;
    if (r.t == 1) {
      r.x = rng.bit() ? 1 : 0;
      r.y1 = rng.bit() ? 1 : 0;
    }
    const auto& dist = devices.distribution(r.t, r.x, r.y1);
    const BitString bits = quantum::outcome_bits(quantum::sample_outcome(dist, rng), n);
    r.a_out = bits[0] ? 1 : 0;
    r.b_outs = BitString(static_cast<std::size_t>(n - 1));
    for (int k = 1; k < n; ++k) r.b_outs.set(static_cast<std::size_t>(k - 1), bits[static_cast<std::size_t>(k)]);
    rounds.push_back(std::move(r));
  }
  return session;
}

/// Length of Alice's verification tag, ceil(log2(1/eps'_EC)), capped at the
/// string length so the hash stays a compression.
inline std::size_t ec_tag_length(double eps_ec_prime, std::size_t n) {
  const auto bits = static_cast<std::size_t>(std::ceil(std::log2(1.0 / eps_ec_prime)));
  return std::min(bits, n);
}

/// Tampering applied to the reconciliation channel by a test harness:
/// bit positions to flip in each Bob's corrected string (index k - 1).
struct ChannelFaults {
  std::vector<std::vector<std::size_t>> flip_bob_guess;
};

/// Step 3. Each Bob's string is corrected to Alice's by an ideal correction
/// channel and then checked against Alice's Toeplitz tag; the information
/// cost is charged analytically by the key-length formula. Each Bob then
/// discloses his test-round outputs verbatim. A failed tag check at any Bob
/// aborts with ec_failure.
inline void reconcile(Session& s, const ChannelFaults* faults = nullptr) {
  auto& tr = s.transcript;
  const int n_parties = s.n_parties();
  const BitString alice = s.alice_string();
  Rng rng = s.root_rng().split(Stream::error_correction);

  tr.ec.alice_seed = hashing::ToeplitzSeed::random(alice.size(), ec_tag_length(tr.config.eps.ec_prime, alice.size()), rng);
  tr.ec.alice_tag = hashing::toeplitz_hash(tr.ec.alice_seed, alice);

  s.bob_raw_keys.clear();
  tr.ec.bob_verified.clear();
  for (int k = 1; k < n_parties; ++k) {
    const BitString own = s.bob_string(k);
    const BitString correction = alice ^ own;  // supplied by the ideal correction channel
    BitString guess = own ^ correction;
    if (faults && static_cast<std::size_t>(k - 1) < faults->flip_bob_guess.size()) {
      for (auto pos : faults->flip_bob_guess[static_cast<std::size_t>(k - 1)]) guess.flip(pos);
    }
    tr.ec.bob_verified.push_back(hashing::verify_hash(tr.ec.alice_seed, guess, tr.ec.alice_tag));
    s.bob_raw_keys.push_back(std::move(guess));
  }

  tr.ec.bob_disclosures.clear();
  for (int k = 1; k < n_parties; ++k) {
    BitString disclosed;
    for (const auto& r : tr.rounds) {
      if (r.t == 1) disclosed.push_back(r.b_outs[static_cast<std::size_t>(k - 1)]);
    }
    tr.ec.bob_disclosures.push_back(std::move(disclosed));
  }
  s.alice_test_guesses = tr.ec.bob_disclosures;

  for (bool ok : tr.ec.bob_verified) {
    if (!ok) {
      tr.abort = AbortReason::ec_failure;
      break;
    }
  }
}

/// Step 4. Scores every test round with the Parity-CHSH predicate using
/// Alice's output and her guesses of the Bobs' outputs; aborts iff
/// wins < delta * tests. No test rounds is a vacuous pass.
inline void estimate_parameters(Session& s) {
  auto& tr = s.transcript;
  if (tr.abort) return;
  const int n_parties = s.n_parties();
  std::size_t j = 0;
  tr.tests = 0;
  tr.wins = 0;
  for (auto& r : tr.rounds) {
    if (r.t == 0) {
      r.c = Score::untested;
      continue;
    }
    game::GameRound g{r.x, r.y1, r.a_out, s.alice_test_guesses[0][j] ? 1 : 0,
                      BitString(static_cast<std::size_t>(n_parties - 2))};
    for (int k = 2; k < n_parties; ++k) {
      g.b_rest.set(static_cast<std::size_t>(k - 2), s.alice_test_guesses[static_cast<std::size_t>(k - 1)][j]);
    }
    r.c = game::parity_chsh_wins(g) ? Score::win : Score::lose;
    ++tr.tests;
    tr.wins += r.c == Score::win ? 1 : 0;
    ++j;
  }
  tr.pe_vacuous = tr.tests == 0;
  if (static_cast<double>(tr.wins) < tr.config.threshold * static_cast<double>(tr.tests)) {
    tr.abort = AbortReason::parameter_estimation;
  }
}

/// Step 5. Alice draws and broadcasts a Toeplitz seed; every party hashes its
/// raw key down to `key_len` bits.
inline void amplify(Session& s, std::int64_t key_len) {
  auto& tr = s.transcript;
  if (tr.abort) throw PreconditionError("privacy amplification after abort");
  if (key_len < 0 || static_cast<std::size_t>(key_len) > s.n_rounds()) {
    throw LengthMismatch("key length " + std::to_string(key_len) + " exceeds the " +
                         std::to_string(s.n_rounds()) + " raw key bits");
  }
  Rng rng = s.root_rng().split(Stream::privacy_amplification);
  tr.pa_seed = hashing::ToeplitzSeed::random(s.n_rounds(), static_cast<std::size_t>(key_len), rng);

  tr.keys.clear();
  const BitString alice = s.alice_string();
  tr.keys.push_back({alice, hashing::toeplitz_hash(*tr.pa_seed, alice)});
  for (const auto& raw : s.bob_raw_keys) tr.keys.push_back({raw, hashing::toeplitz_hash(*tr.pa_seed, raw)});
}

/// Key length the run will use: the explicit override, else the clamped
/// finite-size formula.
inline std::int64_t planned_key_length(const ProtocolConfig& config) {
  if (config.key_length) return *config.key_length;
  if (config.n_rounds == 0) return 0;
  return std::min<std::int64_t>(keyrate::finite_key_length(config.rate_params()).l, config.n_rounds);
}

inline Transcript run_protocol(const ProtocolConfig& config) {
  Session s = measure_rounds(config);
  reconcile(s);
  estimate_parameters(s);
  if (!s.transcript.abort) amplify(s, planned_key_length(config));
  return std::move(s.transcript);
}

}  // namespace dicka::protocol
