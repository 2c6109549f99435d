#pragma once

// Exact N-qubit state simulation: GHZ preparation, per-qubit depolarizing
// noise, Born-rule outcome distributions and seeded outcome sampling.
//
// Qubit k belongs to party k (0 = Alice, 1 = Bob1, ...). In a basis index it
// occupies bit (N - 1 - k), so |q0 q1 ... q_{N-1}> reads left to right.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dicka/bitstring.hpp"
#include "dicka/errors.hpp"
#include "dicka/rng.hpp"

namespace dicka::quantum {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 12;

inline void check_qubit_count(int n_qubits, int min_qubits = 1) {
  if (n_qubits < min_qubits || n_qubits > kMaxQubits) {
    throw SizeOutOfRange("qubit count " + std::to_string(n_qubits) + " outside [" +
                         std::to_string(min_qubits) + ", " + std::to_string(kMaxQubits) + "]");
  }
}

class PureState {
 public:
  PureState(int n_qubits, Eigen::VectorXcd amplitudes)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    check_qubit_count(n_qubits_);
    if (amplitudes_.size() != (Eigen::Index{1} << n_qubits_)) {
      throw DimensionMismatch("amplitude vector length must be 2^n_qubits");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
      throw InvalidInput("pure state is not normalized");
    }
  }

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }

 private:
  int n_qubits_;
  Eigen::VectorXcd amplitudes_;
};

/// Density operator. Construction checks dimension, unit trace and
/// hermiticity; positivity is O(d^3) and is checked on demand.
class MixedState {
 public:
  MixedState(int n_qubits, Eigen::MatrixXcd matrix)
      : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
    check_qubit_count(n_qubits_);
    const Eigen::Index d = Eigen::Index{1} << n_qubits_;
    if (matrix_.rows() != d || matrix_.cols() != d) {
      throw DimensionMismatch("density matrix must be 2^n x 2^n");
    }
    if (std::abs(matrix_.trace() - cplx(1.0, 0.0)) > 1e-12) {
      throw InvalidInput("density matrix trace differs from 1");
    }
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidInput("density matrix is not Hermitian");
    }
  }

  static MixedState from_pure(const PureState& psi) {
    const auto& a = psi.amplitudes();
    return MixedState(psi.n_qubits(), a * a.adjoint());
  }

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  bool is_psd(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }

 private:
  int n_qubits_;
  Eigen::MatrixXcd matrix_;
};

enum class Basis { Z, X, ZplusX, ZminusX };

inline std::string to_string(Basis b) {
  switch (b) {
    case Basis::Z: return "Z";
    case Basis::X: return "X";
    case Basis::ZplusX: return "ZplusX";
    case Basis::ZminusX: return "ZminusX";
  }
  return "?";
}

/// Two-outcome qubit observable cos(t) Z + sin(t) X. Eigenvalue +1 maps to
/// outcome bit 0 and -1 to bit 1.
class Observable {
 public:
  explicit Observable(Basis label) : label_(label) {
    const double t = angle(label);
    const double c = std::cos(t / 2.0);
    const double s = std::sin(t / 2.0);
    // Columns are the +1 and -1 eigenvectors.
    eigvecs_ << c, -s, s, c;
    matrix_ << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
  }

  Basis label() const noexcept { return label_; }
  const Eigen::Matrix2cd& matrix() const noexcept { return matrix_; }
  /// Column b is the eigenvector of outcome bit b.
  const Eigen::Matrix2cd& eigenvectors() const noexcept { return eigvecs_; }

  Eigen::Matrix2cd projector(int bit) const {
    const Eigen::Vector2cd v = eigvecs_.col(bit);
    return v * v.adjoint();
  }

  friend bool operator==(const Observable& a, const Observable& b) { return a.label_ == b.label_; }

 private:
  static double angle(Basis b) {
    constexpr double quarter = 0.78539816339744830962;  // pi / 4
    switch (b) {
      case Basis::Z: return 0.0;
      case Basis::X: return 2.0 * quarter;
      case Basis::ZplusX: return quarter;
      case Basis::ZminusX: return -quarter;
    }
    return 0.0;
  }

  Basis label_;
  Eigen::Matrix2cd matrix_;
  Eigen::Matrix2cd eigvecs_;
};

struct NoiseModel {
  double p_dep = 0.0;

  explicit NoiseModel(double p = 0.0) : p_dep(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("depolarizing probability must lie in [0, 1]");
  }
};

inline PureState make_ghz(int n_qubits) {
  check_qubit_count(n_qubits, 2);
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
  amps(0) = amps(d - 1) = cplx(1.0 / std::sqrt(2.0), 0.0);
  return PureState(n_qubits, std::move(amps));
}

/// Applies rho -> (1-p) rho + p Tr_q(rho) (x) I/2 on qubit q, in place.
inline void depolarize_qubit(Eigen::MatrixXcd& rho, int n_qubits, int qubit, double p) {
  const Eigen::Index mask = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const Eigen::Index d = rho.rows();
  const double keep = 1.0 - p;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j & mask) continue;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i & mask) continue;
      const cplx r00 = rho(i, j);
      const cplx r11 = rho(i | mask, j | mask);
      const cplx mixed = 0.5 * p * (r00 + r11);
      rho(i, j) = keep * r00 + mixed;
      rho(i | mask, j | mask) = keep * r11 + mixed;
      rho(i, j | mask) *= keep;
      rho(i | mask, j) *= keep;
    }
  }
}

inline MixedState depolarize_each(const MixedState& state, const NoiseModel& noise) {
  Eigen::MatrixXcd rho = state.matrix();
  if (noise.p_dep != 0.0) {
    for (int q = 0; q < state.n_qubits(); ++q) depolarize_qubit(rho, state.n_qubits(), q, noise.p_dep);
  }
  return MixedState(state.n_qubits(), std::move(rho));
}

inline MixedState depolarize_each(const PureState& state, const NoiseModel& noise) {
  return depolarize_each(MixedState::from_pure(state), noise);
}

enum class Role { alice, bob1, bob_k };

/// Honest-device observable for a party's input.
///   Alice: 0 -> Z, 1 -> X.
///   Bob1:  0 -> (Z+X)/sqrt2, 1 -> (Z-X)/sqrt2, 2 -> Z.
///   Bob_k, k >= 2: 0 -> Z, 1 -> X.
inline Observable setting_observable(Role role, int input) {
  switch (role) {
    case Role::alice:
    case Role::bob_k:
      if (input == 0) return Observable(Basis::Z);
      if (input == 1) return Observable(Basis::X);
      break;
    case Role::bob1:
      if (input == 0) return Observable(Basis::ZplusX);
      if (input == 1) return Observable(Basis::ZminusX);
      if (input == 2) return Observable(Basis::Z);
      break;
  }
  throw InvalidInput("input " + std::to_string(input) + " outside the party's input domain");
}

/// Outcome distribution over {0,1}^N. Entry index follows the qubit layout:
/// party k's bit is bit (N - 1 - k) of the index.
inline std::vector<double> joint_distribution(const MixedState& state,
                                              std::span<const Observable> settings) {
  const int n = state.n_qubits();
  if (settings.size() != static_cast<std::size_t>(n)) {
    throw DimensionMismatch("need one observable per qubit: got " + std::to_string(settings.size()) +
                            " for " + std::to_string(n) + " qubits");
  }
  // Rotate every qubit into its measurement eigenbasis: rho -> W rho W^dagger
  // with W = V^dagger; the diagonal then holds the outcome probabilities.
  Eigen::MatrixXcd rho = state.matrix();
  const Eigen::Index d = rho.rows();
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd w = settings[static_cast<std::size_t>(q)].eigenvectors().adjoint();
    const Eigen::Index mask = Eigen::Index{1} << (n - 1 - q);
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r & mask) continue;
        const cplx a = rho(r, c);
        const cplx b = rho(r | mask, c);
        rho(r, c) = w(0, 0) * a + w(0, 1) * b;
        rho(r | mask, c) = w(1, 0) * a + w(1, 1) * b;
      }
    }
    const Eigen::Matrix2cd wa = w.adjoint();
    for (Eigen::Index c = 0; c < d; ++c) {
      if (c & mask) continue;
      for (Eigen::Index r = 0; r < d; ++r) {
        const cplx a = rho(r, c);
        const cplx b = rho(r, c | mask);
        rho(r, c) = a * wa(0, 0) + b * wa(1, 0);
        rho(r, c | mask) = a * wa(0, 1) + b * wa(1, 1);
      }
    }
  }
  std::vector<double> probs(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) probs[static_cast<std::size_t>(i)] = std::max(0.0, rho(i, i).real());
  return probs;
}

inline std::vector<double> joint_distribution(const MixedState& state,
                                              std::initializer_list<Observable> settings) {
  const std::vector<Observable> v(settings);
  return joint_distribution(state, std::span<const Observable>(v));
}

/// Inverse-CDF draw of one outcome index from `dist` using one uniform of `rng`.
inline std::size_t sample_outcome(std::span<const double> dist, Rng& rng) {
  if (dist.empty()) throw DimensionMismatch("empty distribution");
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > 0.0) last_positive = i;
    cumulative += dist[i];
    if (u < cumulative) return i;
  }
  // Rounding left the total slightly below u.
  return last_positive;
}

inline std::size_t sample_outcome(std::span<const double> dist, std::uint64_t seed) {
  Rng rng(seed);
  return sample_outcome(dist, rng);
}

/// Party-ordered bits of an outcome index: result[k] is party k's bit.
inline BitString outcome_bits(std::size_t index, int n_qubits) {
  BitString bits(static_cast<std::size_t>(n_qubits));
  for (int k = 0; k < n_qubits; ++k) bits.set(static_cast<std::size_t>(k), (index >> (n_qubits - 1 - k)) & 1U);
  return bits;
}

inline std::size_t outcome_index(const BitString& bits) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) index = (index << 1) | (bits[k] ? 1U : 0U);
  return index;
}

}  // namespace dicka::quantum
