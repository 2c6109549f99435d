#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dicka/keyrate.hpp"

namespace k = dicka::keyrate;
using k::FormulaVariant;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

k::RateParams base_params() {
  k::RateParams p;
  p.n_parties = 3;
  p.mu = 0.05;
  p.delta = 0.8;
  p.qber = 0.02;
  p.n_rounds = 100000000;
  return p;
}

}  // namespace

TEST(BinaryEntropy, Examples) {
  EXPECT_EQ(k::binary_entropy(0.0), 0.0);
  EXPECT_EQ(k::binary_entropy(1.0), 0.0);
  EXPECT_DOUBLE_EQ(k::binary_entropy(0.5), 1.0);
  EXPECT_NEAR(k::binary_entropy(0.11), 0.49991595816452799564, 1e-15);
  EXPECT_THROW(k::binary_entropy(1.5), dicka::DomainError);
}

TEST(MinTradeoff, BoundaryValues) {
  EXPECT_EQ(k::min_tradeoff_fhat(0.75, 0.3), 0.0);
  EXPECT_EQ(k::min_tradeoff_fhat(0.6, 0.3), 0.0);
  const double mu = 0.2;
  EXPECT_NEAR(k::min_tradeoff_fhat(k::kTsirelson, mu) / (1.0 - mu / 2.0), 1.0, 1e-12);
  EXPECT_NEAR(k::min_tradeoff_fhat(k::kTsirelson, 1e-9), 1.0, 1e-9);
  EXPECT_THROW(k::min_tradeoff_fhat(0.9, 0.1), dicka::DomainError);
  EXPECT_THROW(k::min_tradeoff_fhat(0.8, 0.0), dicka::DomainError);
}

TEST(MinTradeoff, HighPrecisionValue) {
  const double v = k::min_tradeoff_fhat(0.83, 0.01);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_LT(rel_err(v, 0.63393275635873285761), 1e-12);
}

TEST(MinTradeoff, DerivativeMatchesFiniteDifference) {
  for (double mu : {0.01, 0.05, 0.3, 1.0}) {
    for (int i = 1; i < 40; ++i) {
      const double pw = 0.75 + (k::kTsirelson - 0.75) * (0.01 + 0.98 * i / 40.0);
      const double x = mu * pw;
      const double hstep = 1e-6 * x;
      const double fd = (k::fhat_of_frequency(x + hstep, mu) - k::fhat_of_frequency(x - hstep, mu)) / (2 * hstep);
      EXPECT_LT(rel_err(k::fhat_derivative(x, mu), fd), 1e-6) << "mu=" << mu << " pw=" << pw;
    }
  }
  EXPECT_LT(rel_err(k::fhat_derivative(0.04, 0.05), 162.60087118075015457), 1e-12);
}

TEST(Tangent, TangencyAndSupportLine) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double mu = 0.01 + 0.99 * u(gen);
    const double lo = mu * 0.75;
    const double hi = mu * k::kTsirelson;
    const double p_opt = lo + (hi - lo) * (0.02 + 0.96 * u(gen));
    EXPECT_NEAR(k::tangent_f(p_opt, p_opt, mu), k::fhat_of_frequency(p_opt, mu), 1e-10);
    for (int i = 0; i <= 1000; ++i) {
      const double q1 = lo + (hi - lo) * i / 1000.0;
      ASSERT_LE(k::tangent_f(q1, p_opt, mu), k::fhat_of_frequency(q1, mu) + 1e-10)
          << "mu=" << mu << " p_opt=" << p_opt << " q1=" << q1;
    }
  }
  EXPECT_THROW(k::tangent_f(0.04, 0.03, 0.05), dicka::DomainError);
}

TEST(VTilde, HighPrecisionValuesAndPositivity) {
  EXPECT_LT(rel_err(k::v_tilde(0.04, 0.05, 1e-6, 1e-6, FormulaVariant::main), 58573.469651355425507), 1e-10);
  EXPECT_LT(rel_err(k::v_tilde(0.04, 0.05, 1e-6, 1e-6, FormulaVariant::appendix), 3058.0126434488644191), 1e-10);
  for (double mu : {0.01, 0.5, 1.0}) {
    EXPECT_GT(k::v_tilde(mu * 0.8, mu, 1e-8, 1e-8), 0.0);
    EXPECT_GT(k::v_tilde(mu * 0.8, mu, 1e-8, 1e-8, FormulaVariant::appendix), 0.0);
  }
}

TEST(Leakage, HighPrecisionValues) {
  k::RateParams p;
  p.qber = 0.05;
  p.mu = 0.05;
  p.n_rounds = 1000000;
  p.eps.ec_tilde = 1e-8;
  const auto leak = k::leak_ec_bounds(p);
  EXPECT_LT(rel_err(leak.alice, 404230.22885011607757), 1e-12);
  EXPECT_LT(rel_err(leak.per_bob, 132153.11958995775524), 1e-12);
}

TEST(Leakage, ZeroNoiseNoTestsLeavesOnlyCorrections) {
  k::RateParams p;
  p.qber = 0.0;
  p.mu = 0.0;
  p.n_rounds = 1000;
  const auto leak = k::leak_ec_bounds(p);
  EXPECT_DOUBLE_EQ(leak.alice, leak.per_bob);
  EXPECT_GT(leak.alice, 0.0);
}

TEST(FiniteKey, AccountingIdentity) {
  const auto b = k::finite_key_length(base_params());
  const double sum = b.entropy_term - b.second_order + b.smoothing_term - b.pa_term - b.leak_alice - b.leak_bobs;
  EXPECT_DOUBLE_EQ(b.raw, sum);
  EXPECT_EQ(b.l, b.raw > 0 ? static_cast<std::int64_t>(std::floor(b.raw)) : 0);
  EXPECT_LT(b.smoothing_term, 0.0);
}

TEST(FiniteKey, FullTestingGivesNoKey) {
  auto p = base_params();
  p.mu = 1.0;
  p.n_rounds = 1000000000000LL;
  const auto b = k::finite_key_length(p);
  EXPECT_LE(b.entropy_term, 0.0);
  EXPECT_EQ(b.l, 0);
}

TEST(FiniteKey, MonotoneInQberAndEpsilon) {
  auto p = base_params();
  p.n_rounds = 10000000000LL;
  double prev = k::finite_key_length(p).raw;
  for (double q : {0.025, 0.03, 0.035}) {
    p.qber = q;
    const double raw = k::finite_key_length(p).raw;
    EXPECT_LT(raw, prev);
    prev = raw;
  }
  p = base_params();
  p.n_rounds = 10000000000LL;
  prev = k::finite_key_length(p).raw;
  for (double e : {1e-10, 1e-12}) {
    p.eps = {e, e, e, 2 * e, e, e};
    const double raw = k::finite_key_length(p).raw;
    EXPECT_LT(raw, prev);
    prev = raw;
  }
}

TEST(FiniteKey, OptimizerBeatsFixedTangentPoints) {
  const auto p = base_params();
  const auto b = k::finite_key_length(p);
  for (int i = 1; i < 50; ++i) {
    const double d = 0.75 + (k::kTsirelson - 0.75) * i / 50.0;
    EXPECT_GE(b.entropy_term - b.second_order + 1e-6 * std::abs(b.entropy_term),
              k::detail::tangent_objective(p, d));
  }
}

TEST(FiniteKey, VariantChangesOnlySecondOrderAndPa) {
  auto p = base_params();
  const auto m = k::finite_key_length(p);
  p.variant = FormulaVariant::appendix;
  const auto a = k::finite_key_length(p);
  EXPECT_DOUBLE_EQ(m.leak_alice, a.leak_alice);
  EXPECT_DOUBLE_EQ(m.leak_bobs, a.leak_bobs);
  EXPECT_DOUBLE_EQ(m.smoothing_term, a.smoothing_term);
  EXPECT_DOUBLE_EQ(m.pa_term, 2 * a.pa_term);
  EXPECT_GT(m.v_tilde, a.v_tilde);
}

TEST(FiniteKey, RejectsInvalidParams) {
  auto p = base_params();
  p.delta = 0.75;
  EXPECT_THROW(k::finite_key_length(p), dicka::DomainError);
  p = base_params();
  p.eps.ec = 5e-8;
  EXPECT_THROW(k::finite_key_length(p), dicka::DomainError);
}

TEST(Completeness, HighPrecisionValue) {
  k::RateParams p;
  p.n_parties = 3;
  p.mu = 0.05;
  p.n_rounds = 100000;
  p.delta = 0.8;
  p.eps.ec = 1e-8;
  p.eps.ec_prime = 1e-8;
  EXPECT_LT(rel_err(k::completeness_bound(p, 0.85), 6.001473620132920082e-8), 1e-12);
}

TEST(Completeness, Limits) {
  k::RateParams p;
  p.n_rounds = 1000;
  p.delta = 0.8;
  const double floor_term = 2.0 * (2.0 * p.eps.ec + p.eps.ec_prime);
  EXPECT_NEAR(k::completeness_bound(p, 0.8 + 1e-9) - floor_term, 1.0, 1e-9);
  p.n_rounds = 1000000000000LL;
  EXPECT_NEAR(k::completeness_bound(p, 0.85), floor_term, 1e-20);
  EXPECT_THROW(k::completeness_bound(p, 0.8), dicka::PreconditionError);
}

TEST(NoiseMapping, Examples) {
  EXPECT_EQ(k::qber_to_pdep(0.0), 0.0);
  EXPECT_NEAR(k::qber_to_pdep(0.5 - 1e-12), 1.0, 1e-5);
  EXPECT_NEAR(k::pdep_to_qber(k::qber_to_pdep(0.037)), 0.037, 1e-15);
  EXPECT_THROW(k::qber_to_pdep(0.5), dicka::DomainError);
  for (int n = 2; n <= 7; ++n) EXPECT_NEAR(k::pexp_formula(n, 0.0), k::kTsirelson, 1e-15);
  EXPECT_NEAR(k::pexp_formula(3, 0.5 - 1e-14), 0.5, 1e-6);
  EXPECT_LT(rel_err(k::pexp_formula(3, 0.05), 0.80595139560534030326), 1e-13);
}

TEST(AsymptoticRates, NoiselessValues) {
  for (int n = 2; n <= 8; ++n) {
    EXPECT_NEAR(k::asymptotic_rate_cka(n, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(k::asymptotic_rate_diqkd(n, 0.0), 1.0 / (n - 1), 1e-12);
  }
}
