#pragma once

// Closed-form key-rate numerics: entropic functions, the min-tradeoff
// function and its tangent, the finite-size key length with its inner
// optimization, leakage and completeness bounds, asymptotic rates.
//
// All logarithms are base 2 except the Hoeffding exponential in the
// completeness bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "dicka/errors.hpp"

namespace dicka::keyrate {

/// Maximum quantum winning probability of CHSH (and of Parity-CHSH).
inline const double kTsirelson = 0.5 + 0.5 / std::numbers::sqrt2;
inline constexpr double kClassicalBound = 0.75;

/// Which form of the second-order coefficient and privacy
/// amplification penalty to use.
///   main:     slope term fhat'(p_opt)/mu + 1, PA penalty 2 log(1/eps_PA)
///   appendix: slope term fhat'(p_opt) + 1,    PA penalty   log(1/eps_PA)
enum class FormulaVariant { main, appendix };

inline std::string to_string(FormulaVariant v) { return v == FormulaVariant::main ? "main" : "appendix"; }

inline FormulaVariant parse_variant(const std::string& s) {
  if (s == "main") return FormulaVariant::main;
  if (s == "appendix") return FormulaVariant::appendix;
  throw InvalidInput("unknown formula variant '" + s + "' (expected main or appendix)");
}

struct EpsilonBudget {
  double smooth = 1e-8;    // smoothing parameter
  double pa = 1e-8;        // privacy amplification
  double ea = 1e-8;        // entropy accumulation
  double ec = 2e-8;        // error correction abort, = ec_tilde + ec_prime
  double ec_prime = 1e-8;  // error correction guess failure
  double ec_tilde = 1e-8;  // smoothing of the error correction leakage

  void validate() const {
    auto open_unit = [](double v, const char* name) {
      if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
    };
    open_unit(smooth, "eps_smooth");
    open_unit(pa, "eps_pa");
    open_unit(ea, "eps_ea");
    open_unit(ec, "eps_ec");
    open_unit(ec_prime, "eps_ec_prime");
    open_unit(ec_tilde, "eps_ec_tilde");
    if (std::abs(ec - (ec_tilde + ec_prime)) > 1e-12 * ec) {
      throw DomainError("eps_ec must equal eps_ec_tilde + eps_ec_prime");
    }
  }

  bool operator==(const EpsilonBudget&) const = default;
};

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary entropy argument outside [0, 1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

/// 1 - sqrt(1 - t^2) without cancellation for small t.
inline double one_minus_sqrt_one_minus_sq(double t) {
  const double t2 = t * t;
  return t2 / (1.0 + std::sqrt(1.0 - t2));
}

/// Entropy certified by a Parity-CHSH winning probability p_w, before the
/// (1 - mu/2) prefactor: 1 - h(1/2 + 1/2 sqrt((4 p_w - 2)^2 - 1)).
/// Zero at and below the classical bound.
inline double certified_entropy(double p_w) {
  if (!(p_w >= 0.0) || p_w > kTsirelson + 1e-12) {
    throw DomainError("winning probability " + std::to_string(p_w) + " outside [0, Tsirelson]");
  }
  const double s = 4.0 * std::min(p_w, kTsirelson) - 2.0;
  const double arg = s * s - 1.0;
  if (p_w <= kClassicalBound || arg <= 0.0) return 0.0;
  return 1.0 - binary_entropy(0.5 + 0.5 * std::min(1.0, std::sqrt(arg)));
}

/// d/dp_w of certified_entropy on the open interval (3/4, Tsirelson).
/// With s = 4p-2, r = sqrt(s^2-1): (4 s / ln 2) * atanh(r) / r.
inline double certified_entropy_derivative(double p_w) {
  if (!(p_w > kClassicalBound && p_w < kTsirelson)) {
    throw DomainError("derivative of the certified entropy needs p_w in (3/4, Tsirelson)");
  }
  const double s = 4.0 * p_w - 2.0;
  const double r = std::sqrt(s * s - 1.0);
  const double ratio = r < 1e-8 ? 1.0 + r * r / 3.0 : std::atanh(r) / r;
  return 4.0 * s / std::numbers::ln2 * ratio;
}

/// Min-tradeoff function in terms of the winning probability:
/// (1 - mu/2) * certified_entropy(p_w).
inline double min_tradeoff_fhat(double p_w, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("test probability mu must lie in (0, 1]");
  return (1.0 - mu / 2.0) * certified_entropy(p_w);
}

/// Min-tradeoff function of the winning frequency x = q(1) = mu * p_w.
inline double fhat_of_frequency(double x, double mu) { return min_tradeoff_fhat(x / mu, mu); }

/// d fhat_of_frequency / dx, analytic.
inline double fhat_derivative(double x, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("test probability mu must lie in (0, 1]");
  return (1.0 - mu / 2.0) * certified_entropy_derivative(x / mu) / mu;
}

inline void check_p_opt(double p_opt, double mu) {
  if (!(p_opt > mu * kClassicalBound && p_opt < mu * kTsirelson)) {
    throw DomainError("p_opt must lie in (mu*3/4, mu*Tsirelson)");
  }
}

/// Affine tangent of fhat_of_frequency at p_opt, evaluated at q1 = q(1).
inline double tangent_f(double q1, double p_opt, double mu) {
  check_p_opt(p_opt, mu);
  const double slope = fhat_derivative(p_opt, mu);
  return slope * (q1 - p_opt) + fhat_of_frequency(p_opt, mu);
}

inline double smoothing_term(double eps) { return 3.0 * std::log2(one_minus_sqrt_one_minus_sq(eps / 4.0)); }

inline double pa_penalty(double eps_pa, FormulaVariant variant) {
  const double one = std::log2(1.0 / eps_pa);
  return variant == FormulaVariant::main ? 2.0 * one : one;
}

/// Second-order coefficient of the entropy accumulation bound.
inline double v_tilde(double p_opt, double mu, double eps, double eps_ea,
                      FormulaVariant variant = FormulaVariant::main) {
  if (!(eps > 0.0 && eps < 1.0) || !(eps_ea > 0.0 && eps_ea < 1.0)) {
    throw DomainError("eps and eps_EA must lie in (0, 1)");
  }
  check_p_opt(p_opt, mu);
  double slope = fhat_derivative(p_opt, mu);
  if (variant == FormulaVariant::main) slope /= mu;
  const double first = 2.0 * (std::log2(13.0) + slope + 1.0) * std::sqrt(1.0 - 2.0 * std::log2(eps * eps_ea));
  const double inner = eps_ea * eps_ea * one_minus_sqrt_one_minus_sq(eps / 4.0);
  const double second = 2.0 * std::log2(7.0) * std::sqrt(-std::log2(inner));
  return first + second;
}

struct RateParams {
  int n_parties = 3;
  double mu = 0.05;
  double delta = 0.8;
  double qber = 0.0;
  std::int64_t n_rounds = 1;
  EpsilonBudget eps;
  FormulaVariant variant = FormulaVariant::main;

  void validate() const {
    if (n_parties < 2) throw DomainError("need at least two parties");
    if (!(mu > 0.0 && mu <= 1.0)) throw DomainError("test probability mu must lie in (0, 1]");
    if (!(qber >= 0.0 && qber < 0.5)) throw DomainError("QBER must lie in [0, 1/2)");
    if (n_rounds < 1) throw DomainError("number of rounds must be positive");
    if (!(delta > kClassicalBound && delta < kTsirelson)) {
      throw DomainError("threshold delta must lie in (3/4, Tsirelson)");
    }
    eps.validate();
  }
};

struct Leakage {
  double alice = 0.0;     // leak_EC(O_A)
  double per_bob = 0.0;   // leak_EC(O_(k)), each Bob
};

/// Error-correction leakage bounds for the depolarizing honest implementation,
/// including the finite-size AEP corrections.
inline Leakage leak_ec_bounds(const RateParams& p) {
  const double n = static_cast<double>(p.n_rounds);
  const double et = p.eps.ec_tilde;
  const double root = std::sqrt(n) * 4.0 * std::log2(2.0 * std::numbers::sqrt2 + 1.0) *
                      std::sqrt(2.0 * std::log2(8.0 / (et * et)));
  const double constant = std::log2(8.0 / (et * et) + 2.0 / (2.0 - et));
  const double corrections = root + constant;
  Leakage out;
  out.alice = n * ((1.0 - p.mu) * binary_entropy(p.qber) + p.mu) + corrections;
  out.per_bob = n * p.mu + corrections;
  return out;
}

struct KeyLengthBreakdown {
  double entropy_term = 0.0;    // n (f(q_hat, p_opt) - mu)
  double second_order = 0.0;    // v_tilde sqrt(n), subtracted
  double smoothing_term = 0.0;  // 3 log(1 - sqrt(1 - (eps/4)^2)), signed (negative)
  double pa_term = 0.0;         // PA penalty, subtracted
  double leak_alice = 0.0;      // subtracted
  double leak_bobs = 0.0;       // (N-1) leak per Bob, subtracted
  double v_tilde = 0.0;
  double p_opt_chosen = 0.0;
  double raw = 0.0;             // signed sum of the terms above
  std::int64_t l = 0;           // max(0, floor(raw))
};

namespace detail {

/// Part of the key length that depends on the tangent point delta_opt.
inline double tangent_objective(const RateParams& p, double delta_opt) {
  const double n = static_cast<double>(p.n_rounds);
  const double p_opt = p.mu * delta_opt;
  const double f = tangent_f(p.mu * p.delta, p_opt, p.mu);
  return (f - p.mu) * n - v_tilde(p_opt, p.mu, p.eps.smooth, p.eps.ea, p.variant) * std::sqrt(n);
}

}  // namespace detail

inline constexpr int kOptimizerGridPoints = 2000;
inline constexpr double kOptimizerTolerance = 1e-10;

/// Finite-size key length, maximized over the tangent point delta_opt =
/// p_opt / mu in (3/4, Tsirelson): global grid search followed by
/// golden-section refinement around the best grid cell.
inline KeyLengthBreakdown finite_key_length(const RateParams& p) {
  p.validate();
  const double lo = kClassicalBound;
  const double hi = kTsirelson;
  const double step = (hi - lo) / kOptimizerGridPoints;
  auto grid = [&](int k) { return lo + (k + 0.5) * step; };

  int best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kOptimizerGridPoints; ++k) {
    const double v = detail::tangent_objective(p, grid(k));
    if (v > best) {
      best = v;
      best_k = k;
    }
  }

  double a = best_k > 0 ? grid(best_k - 1) : lo + 0.25 * step;
  double b = best_k + 1 < kOptimizerGridPoints ? grid(best_k + 1) : hi - 0.25 * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = detail::tangent_objective(p, c);
  double fd = detail::tangent_objective(p, d);
  while (b - a > kOptimizerTolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = detail::tangent_objective(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = detail::tangent_objective(p, d);
    }
  }
  double delta_opt = 0.5 * (a + b);
  if (detail::tangent_objective(p, delta_opt) < best) delta_opt = grid(best_k);

  const double n = static_cast<double>(p.n_rounds);
  const double p_opt = p.mu * delta_opt;
  const Leakage leak = leak_ec_bounds(p);

  KeyLengthBreakdown out;
  out.p_opt_chosen = p_opt;
  out.entropy_term = n * (tangent_f(p.mu * p.delta, p_opt, p.mu) - p.mu);
  out.v_tilde = v_tilde(p_opt, p.mu, p.eps.smooth, p.eps.ea, p.variant);
  out.second_order = out.v_tilde * std::sqrt(n);
  out.smoothing_term = smoothing_term(p.eps.smooth);
  out.pa_term = pa_penalty(p.eps.pa, p.variant);
  out.leak_alice = leak.alice;
  out.leak_bobs = static_cast<double>(p.n_parties - 1) * leak.per_bob;
  out.raw = out.entropy_term - out.second_order + out.smoothing_term - out.pa_term - out.leak_alice -
            out.leak_bobs;
  out.l = out.raw > 0.0 ? static_cast<std::int64_t>(std::floor(out.raw)) : 0;
  return out;
}

/// Upper bound on the abort probability of the honest implementation:
/// (N-1)(2 eps_EC + eps'_EC) + (1 - mu (1 - exp[-2 (p_exp - delta)^2]))^n.
inline double completeness_bound(const RateParams& p, double p_exp) {
  if (!(p_exp > p.delta)) throw PreconditionError("completeness bound requires p_exp > delta");
  const double gap = p_exp - p.delta;
  const double per_round = p.mu * -std::expm1(-2.0 * gap * gap);
  const double pe_term = std::exp(static_cast<double>(p.n_rounds) * std::log1p(-per_round));
  return static_cast<double>(p.n_parties - 1) * (2.0 * p.eps.ec + p.eps.ec_prime) + pe_term;
}

inline void check_qber(double q) {
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("QBER must lie in [0, 1/2)");
}

/// Depolarizing probability per qubit giving bit error rate Q between Alice
/// and each Bob: Q = (2p - p^2)/2.
inline double qber_to_pdep(double q) {
  check_qber(q);
  return 1.0 - std::sqrt(1.0 - 2.0 * q);
}

inline double pdep_to_qber(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("depolarizing probability outside [0, 1]");
  return (2.0 * p - p * p) / 2.0;
}

/// Reference closed form of the honest winning probability:
/// 1/2 + (1-p)^N/(2 sqrt2) + (1-p)^2 (1 - (1-p)^(N-2)) / (8 sqrt2).
inline double pexp_formula(int n_parties, double q) {
  const double keep = 1.0 - qber_to_pdep(q);
  const double s2 = std::numbers::sqrt2;
  return 0.5 + std::pow(keep, n_parties) / (2.0 * s2) +
         keep * keep * (1.0 - std::pow(keep, n_parties - 2)) / (8.0 * s2);
}

/// Born-rule winning probability of the depolarized GHZ state under the
/// honest settings: x = 0 rounds see only the two-body ZZ marginal, x = 1
/// rounds the full N-body X correlator.
inline double pexp_exact(int n_parties, double q) {
  const double keep = 1.0 - qber_to_pdep(q);
  return 0.5 + (keep * keep + std::pow(keep, n_parties)) / (4.0 * std::numbers::sqrt2);
}

/// Asymptotic DICKA rate; may be negative.
inline double asymptotic_rate_cka(int n_parties, double q) {
  check_qber(q);
  const double root = std::sqrt(1.0 - 2.0 * q);
  const double s2 = std::numbers::sqrt2;
  const double inner = std::pow(root, n_parties) / (2.0 * s2) +
                       (1.0 - 2.0 * q) * (1.0 - std::pow(root, n_parties - 2)) / (8.0 * s2);
  const double arg = 16.0 * inner * inner - 1.0;
  const double certified = arg > 0.0 ? 1.0 - binary_entropy(0.5 + 0.5 * std::min(1.0, std::sqrt(arg))) : 0.0;
  return certified - binary_entropy(q);
}

/// Asymptotic rate of N-1 independent DIQKD links, per round of all links.
inline double asymptotic_rate_diqkd(int n_parties, double q) {
  check_qber(q);
  if (n_parties < 2) throw DomainError("need at least two parties");
  const double arg = 2.0 * (1.0 - 2.0 * q) * (1.0 - 2.0 * q) - 1.0;
  const double certified = arg > 0.0 ? 1.0 - binary_entropy(0.5 + 0.5 * std::min(1.0, std::sqrt(arg))) : 0.0;
  return (certified - binary_entropy(q)) / static_cast<double>(n_parties - 1);
}

}  // namespace dicka::keyrate
