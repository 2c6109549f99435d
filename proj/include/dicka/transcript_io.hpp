#pragma once

// Text serialization of protocol transcripts.
//
//   dicka-transcript 1
//   config n_parties=3 n_rounds=4 ... seed=7 variant=main key_length=auto
//   rounds 4
//   0 1 1 0 0 1 1 1           <- i t x y1 a b1 .. b_{N-1} c   (c: 1 win, 0 lose, - untested)
//   ...
//   ec_alice in_len=4 out_len=4 seed=<hex> tag=<hex>
//   ec_bob k=1 len=1 disclosure=<hex> verified=1
//   pe tests=1 wins=1 vacuous=0
//   pa in_len=4 out_len=0 seed=<hex>      or   pa none
//   abort none                            or   abort ec_failure | parameter_estimation
//   key party=0 len=0 final=<hex>         (one per party, only without abort)
//
// Bit strings are lowercase hex of the packed little-endian layout described
// in bitstring.hpp. Doubles use 17 significant digits.

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dicka/bitstring.hpp"
#include "dicka/config.hpp"
#include "dicka/errors.hpp"
#include "dicka/format.hpp"
#include "dicka/protocol.hpp"

namespace dicka::io {

inline constexpr const char* kTranscriptMagic = "dicka-transcript";
inline constexpr int kTranscriptVersion = 1;

inline std::string config_line(const protocol::ProtocolConfig& c) {
  std::ostringstream os;
  os << "config n_parties=" << c.n_parties << " n_rounds=" << c.n_rounds
     << " test_prob=" << format_double(c.test_prob) << " threshold=" << format_double(c.threshold)
     << " qber=" << format_double(c.qber) << " eps_smooth=" << format_double(c.eps.smooth)
     << " eps_pa=" << format_double(c.eps.pa) << " eps_ea=" << format_double(c.eps.ea)
     << " eps_ec=" << format_double(c.eps.ec) << " eps_ec_prime=" << format_double(c.eps.ec_prime)
     << " eps_ec_tilde=" << format_double(c.eps.ec_tilde) << " seed=" << c.seed
     << " variant=" << keyrate::to_string(c.variant)
     << " key_length=" << (c.key_length ? std::to_string(*c.key_length) : std::string("auto"));
  return os.str();
}

inline void write_transcript(std::ostream& os, const protocol::Transcript& t) {
  using protocol::Score;
  os << kTranscriptMagic << ' ' << kTranscriptVersion << '\n';
  os << config_line(t.config) << '\n';
  os << "rounds " << t.rounds.size() << '\n';
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    os << i << ' ' << r.t << ' ' << r.x << ' ' << r.y1 << ' ' << r.a_out;
    for (std::size_t k = 0; k < r.b_outs.size(); ++k) os << ' ' << (r.b_outs[k] ? 1 : 0);
    os << ' ' << (r.c == Score::win ? "1" : r.c == Score::lose ? "0" : "-") << '\n';
  }
  os << "ec_alice in_len=" << t.ec.alice_seed.in_len << " out_len=" << t.ec.alice_seed.out_len
     << " seed=" << t.ec.alice_seed.diagonal_bits.to_hex() << " tag=" << t.ec.alice_tag.to_hex() << '\n';
  for (std::size_t k = 0; k < t.ec.bob_disclosures.size(); ++k) {
    os << "ec_bob k=" << k + 1 << " len=" << t.ec.bob_disclosures[k].size()
       << " disclosure=" << t.ec.bob_disclosures[k].to_hex()
       << " verified=" << (k < t.ec.bob_verified.size() && t.ec.bob_verified[k] ? 1 : 0) << '\n';
  }
  os << "pe tests=" << t.tests << " wins=" << t.wins << " vacuous=" << (t.pe_vacuous ? 1 : 0) << '\n';
  if (t.pa_seed) {
    os << "pa in_len=" << t.pa_seed->in_len << " out_len=" << t.pa_seed->out_len
       << " seed=" << t.pa_seed->diagonal_bits.to_hex() << '\n';
  } else {
    os << "pa none\n";
  }
  os << "abort " << (t.abort ? protocol::to_string(*t.abort) : std::string("none")) << '\n';
  for (std::size_t p = 0; p < t.keys.size(); ++p) {
    os << "key party=" << p << " len=" << t.keys[p].final_key.size() << " final=" << t.keys[p].final_key.to_hex()
       << '\n';
  }
}

inline std::string transcript_to_string(const protocol::Transcript& t) {
  std::ostringstream os;
  write_transcript(os, t);
  return os.str();
}

namespace detail {

struct Fields {
  std::string tag;
  std::map<std::string, std::string> kv;
  std::vector<std::string> positional;

  const std::string& at(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InvalidInput("transcript record '" + tag + "' lacks field '" + key + "'");
    return it->second;
  }
  std::size_t size_at(const std::string& key) const { return std::stoull(at(key)); }
};

inline Fields split_fields(const std::string& line) {
  std::istringstream is(line);
  Fields f;
  is >> f.tag;
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      f.positional.push_back(tok);
    } else {
      f.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return f;
}

inline std::string next_line(std::istream& in, const char* expected) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(std::string("transcript truncated before '") + expected + "'");
  return line;
}

inline Fields expect(std::istream& in, const std::string& tag) {
  Fields f = split_fields(next_line(in, tag.c_str()));
  if (f.tag != tag) throw InvalidInput("expected transcript record '" + tag + "', found '" + f.tag + "'");
  return f;
}

}  // namespace detail

/// Reads a transcript written by write_transcript. Key material carries only
/// the final keys; raw keys are party-private and not serialized.
inline protocol::Transcript read_transcript(std::istream& in) {
  using detail::expect;
  protocol::Transcript t;

  const auto head = expect(in, kTranscriptMagic);
  if (head.positional.size() != 1 || head.positional[0] != std::to_string(kTranscriptVersion)) {
    throw InvalidInput("unsupported transcript version");
  }

  const auto cfg = expect(in, "config");
  config::KeyValues kv;
  for (const auto& [k, v] : cfg.kv) kv.set(k, v);
  t.config = config::protocol_config(kv);
  const int n = t.config.n_parties;

  const auto rounds = expect(in, "rounds");
  const std::size_t n_rounds = std::stoull(rounds.positional.at(0));
  t.rounds.reserve(n_rounds);
  for (std::size_t i = 0; i < n_rounds; ++i) {
    std::istringstream is(detail::next_line(in, "round"));
    std::size_t idx = 0;
    protocol::RoundRecord r;
    is >> idx >> r.t >> r.x >> r.y1 >> r.a_out;
    r.b_outs = BitString(static_cast<std::size_t>(n - 1));
    for (int k = 0; k < n - 1; ++k) {
      int b = 0;
      is >> b;
      r.b_outs.set(static_cast<std::size_t>(k), b != 0);
    }
    std::string c;
    is >> c;
    if (!is || idx != i) throw InvalidInput("malformed round record " + std::to_string(i));
    r.c = c == "1" ? protocol::Score::win : c == "0" ? protocol::Score::lose : protocol::Score::untested;
    t.rounds.push_back(std::move(r));
  }

  const auto ec = expect(in, "ec_alice");
  const std::size_t in_len = ec.size_at("in_len");
  const std::size_t out_len = ec.size_at("out_len");
  t.ec.alice_seed = hashing::ToeplitzSeed(
      in_len, out_len, BitString::from_hex(ec.at("seed"), hashing::ToeplitzSeed::diagonal_length(in_len, out_len)));
  t.ec.alice_tag = BitString::from_hex(ec.at("tag"), out_len);
  for (int k = 1; k < n; ++k) {
    const auto bob = expect(in, "ec_bob");
    t.ec.bob_disclosures.push_back(BitString::from_hex(bob.at("disclosure"), bob.size_at("len")));
    t.ec.bob_verified.push_back(bob.at("verified") == "1");
  }

  const auto pe = expect(in, "pe");
  t.tests = std::stoll(pe.at("tests"));
  t.wins = std::stoll(pe.at("wins"));
  t.pe_vacuous = pe.at("vacuous") == "1";

  const auto pa = expect(in, "pa");
  if (pa.positional.empty()) {
    const std::size_t pin = pa.size_at("in_len");
    const std::size_t pout = pa.size_at("out_len");
    t.pa_seed = hashing::ToeplitzSeed(
        pin, pout, BitString::from_hex(pa.at("seed"), hashing::ToeplitzSeed::diagonal_length(pin, pout)));
  }

  const auto ab = expect(in, "abort");
  const std::string reason = ab.positional.at(0);
  if (reason == "ec_failure") {
    t.abort = protocol::AbortReason::ec_failure;
  } else if (reason == "parameter_estimation") {
    t.abort = protocol::AbortReason::parameter_estimation;
  } else if (reason != "none") {
    throw InvalidInput("unknown abort reason '" + reason + "'");
  }

  if (!t.abort) {
    for (int p = 0; p < n; ++p) {
      const auto key = expect(in, "key");
      t.keys.push_back({BitString(), BitString::from_hex(key.at("final"), key.size_at("len"))});
    }
  }
  return t;
}

/// Run summary as a JSON object.
inline nlohmann::ordered_json summary_json(const protocol::Transcript& t) {
  nlohmann::ordered_json j;
  j["n_parties"] = t.config.n_parties;
  j["n_rounds"] = t.config.n_rounds;
  j["seed"] = t.config.seed;
  j["variant"] = keyrate::to_string(t.config.variant);
  j["abort"] = t.abort ? nlohmann::ordered_json(protocol::to_string(*t.abort)) : nlohmann::ordered_json(nullptr);
  j["tests"] = t.tests;
  j["wins"] = t.wins;
  j["pe_vacuous"] = t.pe_vacuous;
  const auto rate = t.empirical_win_rate();
  j["empirical_win_rate"] = rate ? nlohmann::ordered_json(*rate) : nlohmann::ordered_json(nullptr);
  j["key_length"] = t.key_length();
  j["keys_identical"] = !t.abort && t.keys_identical();
  auto keys = nlohmann::ordered_json::array();
  for (const auto& k : t.keys) keys.push_back(k.final_key.to_hex());
  j["final_keys"] = keys;
  return j;
}

}  // namespace dicka::io
