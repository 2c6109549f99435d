// dicka: command-line front end for the DICKA simulator and key-rate engine.
//
//   dicka simulate --config run.conf [--seed S] [--out transcript.txt] [--summary summary.json]
//   dicka keylen   --config run.conf [--paper-variant appendix] [--format csv]
//   dicka rates    [--config sweep.conf] [--out rates.csv]
//   dicka compare  [--config sweep.conf]
//   dicka game     --set n_parties=3 --set qber=0
//
// Exit codes: 0 success, 1 tool error (bad flags, malformed config),
// 2 protocol abort (simulate only).

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dicka/config.hpp"
#include "dicka/format.hpp"
#include "dicka/game.hpp"
#include "dicka/keyrate.hpp"
#include "dicka/protocol.hpp"
#include "dicka/rates.hpp"
#include "dicka/transcript_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAbort = 2;

struct RunSpec {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string output_path = "-";
  std::string summary_path;
  std::string format;
  std::string paper_variant;
};

dicka::config::KeyValues load_config(const RunSpec& spec) {
  auto kv = spec.config_path.empty() ? dicka::config::KeyValues{} : dicka::config::KeyValues::load(spec.config_path);
  for (const auto& o : spec.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw dicka::ConfigError("--set expects key=value, got '" + o + "'");
    kv.set(dicka::config::trim(o.substr(0, eq)), dicka::config::trim(o.substr(eq + 1)));
  }
  if (spec.seed) kv.set("seed", std::to_string(*spec.seed));
  if (!spec.paper_variant.empty()) kv.set("variant", spec.paper_variant);
  return kv;
}

/// Writes to `path`, or stdout for "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dicka::ConfigError("cannot open output file '" + path + "'");
  fn(out);
}

void print_kv(std::ostream& os, const nlohmann::ordered_json& j, const std::string& format) {
  if (format == "csv") {
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      os << (first ? "" : ",") << k;
      first = false;
    }
    os << '\n';
    first = true;
    for (const auto& [k, v] : j.items()) {
      os << (first ? "" : ",");
      if (v.is_number_float()) {
        os << dicka::format_double(v.get<double>());
      } else if (v.is_string()) {
        os << v.get<std::string>();
      } else {
        os << v.dump();
      }
      first = false;
    }
    os << '\n';
  } else {
    os << j.dump(2) << '\n';
  }
}

int cmd_simulate(const RunSpec& spec) {
  const auto kv = load_config(spec);
  const auto cfg = dicka::config::protocol_config(kv);
  const auto transcript = dicka::protocol::run_protocol(cfg);
  const auto summary = dicka::io::summary_json(transcript);

  with_output(spec.output_path, [&](std::ostream& os) { dicka::io::write_transcript(os, transcript); });
  const bool transcript_on_stdout = spec.output_path.empty() || spec.output_path == "-";
  if (!spec.summary_path.empty()) {
    with_output(spec.summary_path, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  } else {
    (transcript_on_stdout ? std::cerr : std::cout) << summary.dump(2) << '\n';
  }
  return transcript.abort ? kExitAbort : kExitOk;
}

int cmd_keylen(const RunSpec& spec) {
  const auto kv = load_config(spec);
  const auto params = dicka::config::rate_params(kv);
  const auto b = dicka::keyrate::finite_key_length(params);
  nlohmann::ordered_json j;
  j["variant"] = dicka::keyrate::to_string(params.variant);
  j["n_rounds"] = params.n_rounds;
  j["entropy_term"] = b.entropy_term;
  j["second_order"] = -b.second_order;
  j["smoothing_term"] = b.smoothing_term;
  j["pa_term"] = -b.pa_term;
  j["leak_alice"] = -b.leak_alice;
  j["leak_bobs"] = -b.leak_bobs;
  j["v_tilde"] = b.v_tilde;
  j["p_opt"] = b.p_opt_chosen;
  j["delta_opt"] = b.p_opt_chosen / params.mu;
  j["raw_l"] = b.raw;
  j["l"] = b.l;
  with_output(spec.output_path, [&](std::ostream& os) { print_kv(os, j, spec.format.empty() ? "kv-json" : spec.format); });
  return kExitOk;
}

std::vector<int> party_list(const dicka::config::KeyValues& kv) {
  return kv.has("n_list") ? kv.get_int_list("n_list") : std::vector<int>{3, 4, 5, 6, 7};
}

int cmd_rates(const RunSpec& spec) {
  const auto kv = load_config(spec);
  dicka::rates::QberGrid grid;
  if (kv.has("q_min")) grid.q_min = kv.get_double("q_min");
  if (kv.has("q_max")) grid.q_max = kv.get_double("q_max");
  if (kv.has("q_step")) grid.q_step = kv.get_double("q_step");
  std::vector<dicka::rates::RateRow> rows;
  try {
    rows = dicka::rates::rate_table(party_list(kv), grid);
  } catch (const dicka::DomainError& e) {
    throw dicka::ConfigError(e.what());
  }
  if (spec.format == "kv-json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back({{"N", r.n_parties}, {"Q", r.qber}, {"r_cka", r.r_cka}, {"r_diqkd", r.r_diqkd}});
    with_output(spec.output_path, [&](std::ostream& os) { os << arr.dump(2) << '\n'; });
  } else {
    with_output(spec.output_path, [&](std::ostream& os) { dicka::rates::write_rate_csv(os, rows); });
  }
  return kExitOk;
}

int cmd_compare(const RunSpec& spec) {
  const auto kv = load_config(spec);
  std::vector<dicka::rates::Comparison> rows;
  for (int n : party_list(kv)) {
    if (n < 2) throw dicka::ConfigError("n_list entries must be >= 2");
    rows.push_back(dicka::rates::compare(n));
  }
  with_output(spec.output_path, [&](std::ostream& os) { dicka::rates::write_compare_csv(os, rows); });
  return kExitOk;
}

int cmd_game(const RunSpec& spec) {
  const auto kv = load_config(spec);
  const int n = kv.has("n_parties") ? static_cast<int>(kv.get_int("n_parties")) : 3;
  const double q = kv.has("qber") ? kv.get_double("qber") : 0.0;
  if (n < 2 || n > dicka::game::kMaxEnumerationParties) {
    throw dicka::ConfigError("game supports 2..6 parties, got " + std::to_string(n));
  }
  if (!(q >= 0.0 && q < 0.5)) throw dicka::ConfigError("qber must lie in [0, 1/2)");
  const auto classical = dicka::game::classical_value(n);
  const auto state = dicka::quantum::depolarize_each(dicka::quantum::make_ghz(n),
                                                     dicka::quantum::NoiseModel(dicka::keyrate::qber_to_pdep(q)));
  nlohmann::ordered_json j;
  j["n_parties"] = n;
  j["qber"] = q;
  j["classical_value"] = classical.str();
  j["quantum_win_probability"] = dicka::game::quantum_win_probability(state, dicka::game::honest_settings());
  j["pexp_formula"] = dicka::keyrate::pexp_formula(n, q);
  with_output(spec.output_path, [&](std::ostream& os) { print_kv(os, j, spec.format.empty() ? "kv-json" : spec.format); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent conference key agreement simulator"};
  app.require_subcommand(1);
  RunSpec spec;

  auto add_common = [&spec](CLI::App* sub) {
    sub->add_option("--config", spec.config_path, "flat key = value config file");
    sub->add_option("--set", spec.overrides, "override a config key (key=value), repeatable");
    sub->add_option("--seed", spec.seed, "RNG seed (overrides config)");
    sub->add_option("--out", spec.output_path, "output path, '-' for stdout");
    sub->add_option("--format", spec.format, "output format")->check(CLI::IsMember({"csv", "kv-json"}));
    sub->add_option("--paper-variant", spec.paper_variant, "key-length formula variant")
        ->check(CLI::IsMember({"main", "appendix"}));
  };

  auto* simulate = app.add_subcommand("simulate", "run the protocol end to end");
  add_common(simulate);
  simulate->add_option("--summary", spec.summary_path, "write the run summary (JSON) here");
  auto* keylen = app.add_subcommand("keylen", "finite-size key length breakdown");
  add_common(keylen);
  auto* rates = app.add_subcommand("rates", "asymptotic rate table as CSV");
  add_common(rates);
  auto* compare = app.add_subcommand("compare", "crossover and zero-rate QBER per N");
  add_common(compare);
  auto* game = app.add_subcommand("game", "classical and quantum Parity-CHSH values");
  add_common(game);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*simulate) return cmd_simulate(spec);
    if (*keylen) return cmd_keylen(spec);
    if (*rates) return cmd_rates(spec);
    if (*compare) return cmd_compare(spec);
    if (*game) return cmd_game(spec);
  } catch (const std::exception& e) {
    std::cerr << "dicka: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
