#pragma once

// Flat `key = value` configuration files. Blank lines and lines starting
// with '#' are ignored; keys may appear once.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dicka/errors.hpp"
#include "dicka/keyrate.hpp"
#include "dicka/protocol.hpp"

namespace dicka::config {

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "n_parties", "n_rounds",  "test_prob",    "threshold",    "qber",       "eps_smooth",
      "eps_pa",    "eps_ea",    "eps_ec",       "eps_ec_prime", "eps_ec_tilde", "seed",
      "variant",   "key_length", "n_list",      "q_min",        "q_max",      "q_step"};
  return keys;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class KeyValues {
 public:
  static KeyValues parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      kv.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), /*allow_replace=*/false);
    }
    return kv;
  }

  static KeyValues parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
  }

  /// Adds or (with allow_replace) overrides a key.
  void set(const std::string& key, const std::string& value, bool allow_replace = true) {
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (!allow_replace && values_.count(key)) throw ConfigError("duplicate config key '" + key + "'");
    values_[key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, raw(key)); }
  std::int64_t get_int(const std::string& key) const { return to_int<std::int64_t>(key, raw(key)); }
  std::uint64_t get_u64(const std::string& key) const { return to_int<std::uint64_t>(key, raw(key)); }

  std::vector<int> get_int_list(const std::string& key) const {
    std::vector<int> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int<int>(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  static double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("value of '" + key + "' is not a number: '" + s + "'");
    }
    return v;
  }

  template <typename Int>
  static Int to_int(const std::string& key, const std::string& s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("value of '" + key + "' is not an integer: '" + s + "'");
    }
    return v;
  }

  std::map<std::string, std::string> values_;
};

inline keyrate::EpsilonBudget epsilon_budget(const KeyValues& kv) {
  keyrate::EpsilonBudget eps;
  eps.smooth = kv.get_double("eps_smooth");
  eps.pa = kv.get_double("eps_pa");
  eps.ea = kv.get_double("eps_ea");
  eps.ec = kv.get_double("eps_ec");
  eps.ec_prime = kv.get_double("eps_ec_prime");
  eps.ec_tilde = kv.get_double("eps_ec_tilde");
  try {
    eps.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return eps;
}

inline keyrate::FormulaVariant variant(const KeyValues& kv) {
  if (!kv.has("variant")) return keyrate::FormulaVariant::main;
  try {
    return keyrate::parse_variant(kv.raw("variant"));
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

inline protocol::ProtocolConfig protocol_config(const KeyValues& kv) {
  protocol::ProtocolConfig c;
  c.n_parties = static_cast<int>(kv.get_int("n_parties"));
  c.n_rounds = kv.get_int("n_rounds");
  c.test_prob = kv.get_double("test_prob");
  c.threshold = kv.get_double("threshold");
  c.qber = kv.get_double("qber");
  c.eps = epsilon_budget(kv);
  c.seed = kv.get_u64("seed");
  c.variant = variant(kv);
  if (kv.has("key_length") && kv.raw("key_length") != "auto") c.key_length = kv.get_int("key_length");
  c.validate();
  return c;
}

inline keyrate::RateParams rate_params(const KeyValues& kv) {
  keyrate::RateParams p;
  p.n_parties = static_cast<int>(kv.get_int("n_parties"));
  p.n_rounds = kv.get_int("n_rounds");
  p.mu = kv.get_double("test_prob");
  p.delta = kv.get_double("threshold");
  p.qber = kv.get_double("qber");
  p.eps = epsilon_budget(kv);
  p.variant = variant(kv);
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

}  // namespace dicka::config
