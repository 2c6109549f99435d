#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dicka/bitstring.hpp"
#include "dicka/errors.hpp"
#include "dicka/quantum.hpp"

namespace dicka::game {

/// One round of the N-party Parity-CHSH game. b_rest holds the answers of
/// Bob2..Bob_{N-1} and is empty for N = 2.
struct GameRound {
  int x = 0;
  int y = 0;
  int a = 0;
  int b1 = 0;
  BitString b_rest;
};

/// Two-party CHSH predicate a + b = x y (mod 2).
constexpr bool chsh_wins(int x, int y, int a, int b) noexcept { return ((a ^ b) & 1) == ((x & y) & 1); }

/// a + b1 = x (y + parity(b_rest)) (mod 2).
inline bool parity_chsh_wins(const GameRound& r) {
  const int bbar = r.b_rest.parity() ? 1 : 0;
  return ((r.a ^ r.b1) & 1) == (r.x & ((r.y + bbar) & 1));
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    const std::int64_t g = std::gcd(n, d);
    return g == 0 ? Rational{0, 1} : Rational{n / g, d / g};
  }

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num * b.den == b.num * a.den;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    return a.num * b.den <=> b.num * a.den;
  }
};

/// Deterministic local strategy: Alice and Bob1 answer through lookup tables,
/// the remaining Bobs (fixed input) each answer a constant bit.
struct DeterministicStrategy {
  std::array<int, 2> alice_table{};
  std::array<int, 2> bob1_table{};
  BitString rest_bits;
};

inline constexpr int kMaxEnumerationParties = 6;

inline Rational strategy_value(const DeterministicStrategy& s) {
  int wins = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const GameRound r{x, y, s.alice_table[x], s.bob1_table[y], s.rest_bits};
      wins += parity_chsh_wins(r) ? 1 : 0;
    }
  }
  return Rational::make(wins, 4);
}

/// Best winning probability over all 4 * 4 * 2^(N-2) deterministic
/// strategies under uniform (x, y). Exact.
inline Rational classical_value(int n_parties) {
  if (n_parties < 2 || n_parties > kMaxEnumerationParties) {
    throw SizeOutOfRange("classical_value enumerates 2..6 parties, got " + std::to_string(n_parties));
  }
  const auto n_rest = static_cast<std::size_t>(n_parties - 2);
  Rational best{0, 1};
  for (int at = 0; at < 4; ++at) {
    for (int bt = 0; bt < 4; ++bt) {
      for (std::uint32_t rest = 0; rest < (1U << n_rest); ++rest) {
        DeterministicStrategy s{{at & 1, (at >> 1) & 1}, {bt & 1, (bt >> 1) & 1}, BitString(n_rest)};
        for (std::size_t k = 0; k < n_rest; ++k) s.rest_bits.set(k, (rest >> k) & 1U);
        best = std::max(best, strategy_value(s));
      }
    }
  }
  return best;
}

/// Observables used for the test rounds: Alice per x, Bob1 per y, and the
/// single observable every Bob_k (k >= 2) measures for his fixed input.
struct SettingsBundle {
  std::array<quantum::Observable, 2> alice;
  std::array<quantum::Observable, 2> bob1;
  quantum::Observable bob_rest;

  std::vector<quantum::Observable> for_questions(int n_parties, int x, int y) const {
    std::vector<quantum::Observable> v;
    v.reserve(static_cast<std::size_t>(n_parties));
    v.push_back(alice[static_cast<std::size_t>(x)]);
    v.push_back(bob1[static_cast<std::size_t>(y)]);
    for (int k = 2; k < n_parties; ++k) v.push_back(bob_rest);
    return v;
  }
};

/// Fixed input of Bob2..Bob_{N-1} in test rounds.
inline constexpr int kRestBobsTestInput = 1;

inline SettingsBundle honest_settings() {
  using quantum::Role;
  using quantum::setting_observable;
  return SettingsBundle{{setting_observable(Role::alice, 0), setting_observable(Role::alice, 1)},
                        {setting_observable(Role::bob1, 0), setting_observable(Role::bob1, 1)},
                        setting_observable(Role::bob_k, kRestBobsTestInput)};
}

/// Decodes a joint outcome index into a game round for questions (x, y).
inline GameRound round_from_outcome(std::size_t index, int n_parties, int x, int y) {
  const BitString bits = quantum::outcome_bits(index, n_parties);
  GameRound r{x, y, bits[0] ? 1 : 0, bits[1] ? 1 : 0, BitString(static_cast<std::size_t>(n_parties - 2))};
  for (int k = 2; k < n_parties; ++k) r.b_rest.set(static_cast<std::size_t>(k - 2), bits[static_cast<std::size_t>(k)]);
  return r;
}

/// Winning probability of the Parity-CHSH game on `state` with uniform (x, y).
inline double quantum_win_probability(const quantum::MixedState& state, const SettingsBundle& settings) {
  const int n = state.n_qubits();
  if (n < 2) throw DimensionMismatch("Parity-CHSH needs at least two parties");
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const auto obs = settings.for_questions(n, x, y);
      const auto dist = quantum::joint_distribution(state, obs);
      for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] != 0.0 && parity_chsh_wins(round_from_outcome(i, n, x, y))) total += dist[i];
      }
    }
  }
  return std::clamp(total / 4.0, 0.0, 1.0);
}

}  // namespace dicka::game
