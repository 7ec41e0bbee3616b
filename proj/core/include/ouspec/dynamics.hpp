#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "ouspec/noise.hpp"

namespace ouspec {

/// Hard cap on probe size: 2^12 = 4096 keeps dense eigensolves sub-second.
inline constexpr int kMaxQubits = 12;

/// Pure state of an N-qubit probe: unit-norm amplitudes over the 2^N
/// computational basis states, bit q of the index holding qubit q.
class ProbeState {
 public:
  /// Requires unit norm within 1e-12; use normalized() for raw amplitudes.
  ProbeState(int n_qubits, Eigen::VectorXcd amplitudes);

  /// Rescales to unit norm; rejects the zero vector.
  static ProbeState normalized(int n_qubits, Eigen::VectorXcd amplitudes);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

 private:
  int n_qubits_;
  Eigen::VectorXcd amplitudes_;
};

/// N-qubit density matrix: Hermitian (1e-12 entrywise) with unit trace
/// (1e-10). Positivity is validated where a spectrum is computed.
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, Eigen::MatrixXcd matrix);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

 private:
  int n_qubits_;
  Eigen::MatrixXcd matrix_;
};

/// Collective phase weights s_x = N - 2 popcount(x): basis state |x> acquires
/// phase s_x * (omega0 t + phi(t)) under the common environment, so matrix
/// element (x, y) dephases with Delta = s_x - s_y.
struct DephasingWeights {
  int n_qubits;
  std::vector<int> weights;
};

DephasingWeights weight_vector(int n_qubits);

/// Noise, interaction time, and bare qubit frequency for one evolution.
/// omega0 only rotates coherences and never enters the gamma sensitivity; it
/// defaults to 0.
struct EvolutionSpec {
  NoiseParams params;
  double t;
  double omega0;

  EvolutionSpec(NoiseParams params, double t, double omega0 = 0.0);
};

/// (|0...0> + |1...1>) / sqrt(2).
ProbeState ghz_state(int n_qubits);

/// Common-environment Gaussian dephasing of a pure initial state:
///   rho_xy(t) = psi_x conj(psi_y) e^{-i omega0 (s_x - s_y) t}
///               e^{-(s_x - s_y)^2 beta(t) / 2}.
DensityMatrix dephase_common(const ProbeState& psi0, const EvolutionSpec& spec);

/// Entrywise analytic gamma derivative of dephase_common: each coherence is
/// scaled by -(s_x - s_y)^2 dbeta_dgamma / 2. Hermitian with zero diagonal.
Eigen::MatrixXcd dephase_derivative(const ProbeState& psi0, const EvolutionSpec& spec);

/// dephase_common and dephase_derivative in one pass (the decay factors are
/// shared); this is the hot path of every scan and optimizer.
std::pair<DensityMatrix, Eigen::MatrixXcd> dephase_with_derivative(const ProbeState& psi0,
                                                                   const EvolutionSpec& spec);

/// Same dephasing map applied to an arbitrary (possibly mixed) initial state.
DensityMatrix dephase_common_density(const DensityMatrix& rho0, const EvolutionSpec& spec);
Eigen::MatrixXcd dephase_derivative_density(const DensityMatrix& rho0, const EvolutionSpec& spec);

/// Monte Carlo oracle for dephase_common: averages U(phi) rho U(phi)^dag over
/// sampled OU trajectories, U diagonal with phases e^{-i (omega0 t + phi) s_x}.
DensityMatrix mc_evolve_common(const ProbeState& psi0, const EvolutionSpec& spec,
                               std::size_t n_traj, std::uint64_t seed,
                               const MCOptions& opts = {});

/// Quantum Fisher information for gamma, closed forms. Both vanish at t = 0
/// (no information before any evolution) and decay to 0 as t -> inf.
/// Separable probe of N independent qubits:
///   H = 4 N (dbeta_dgamma)^2 / (e^{4 beta} - 1).
double qfi_sep_closed(int n_qubits, const EvolutionSpec& spec);
/// GHZ probe: H = 4 N^4 (dbeta_dgamma)^2 / (e^{4 N^2 beta} - 1).
double qfi_ghz_closed(int n_qubits, const EvolutionSpec& spec);

/// GHZ probe mixed with white noise at preparation,
/// rho(0) = p |GHZ><GHZ| + (1 - p) I / 2^N:
///   H = 2^{N+2} N^4 [(2^N - 2) p + 2] p^2 (dbeta_dgamma)^2 /
///       ([(2^N - 2) p + 2]^2 e^{4 N^2 beta} - 4^N p^2).
double qfi_depolarized(int n_qubits, double p, const EvolutionSpec& spec);

/// GHZ probe with its preparation coherence scaled by delta in [0, 1]:
///   H = 4 N^4 delta^2 (dbeta_dgamma)^2 / (e^{4 N^2 beta} - delta^2).
double qfi_dephased(int n_qubits, double delta, const EvolutionSpec& spec);

/// The degraded initial states behind the two formulas above.
DensityMatrix depolarized_ghz(int n_qubits, double p);
DensityMatrix dephased_ghz(int n_qubits, double delta);

double purity_depolarized(int n_qubits, double p);
double purity_dephased(double delta);

/// Outcome probabilities {p+, p-} of the two-outcome projective measurement
/// onto (|0...0> +- |1...1>) / sqrt(2) after GHZ evolution:
///   p+- = (1 +- e^{-2 N^2 beta}) / 2.
std::pair<double, double> binary_outcome_probs(int n_qubits, const EvolutionSpec& spec);

/// Classical Fisher information of that measurement; equals qfi_ghz_closed
/// for all t, so the binary readout already saturates the quantum bound.
double binary_measurement_fisher(int n_qubits, const EvolutionSpec& spec);

}  // namespace ouspec
