#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ouspec/dynamics.hpp"

namespace ouspec {

struct EigenSystem {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // matching columns
};

/// Full spectrum of a density matrix. Throws std::invalid_argument when an
/// eigenvalue is below -1e-10 (not a physical state).
EigenSystem diagonalize(const DensityMatrix& rho);

/// Quantum Fisher information from the spectral decomposition:
///   H = 2 sum_{n,m} |<m| drho |n>|^2 / (lambda_n + lambda_m)
/// over pairs with lambda_n + lambda_m above the cutoff. A negative cutoff
/// selects the default 1e-12 * lambda_max. drho must be Hermitian (the
/// parameter derivative of rho); agreement with the closed forms is exact to
/// solver precision, not a discretization.
double qfi_general(const DensityMatrix& rho, const Eigen::MatrixXcd& drho,
                   double eig_cutoff = -1.0);

/// State and its gamma derivative evaluated through the dephasing map, fed to
/// qfi_general. Convenience wrapper for scans over pure initial states.
double qfi_of_state(const ProbeState& psi0, const EvolutionSpec& spec, double eig_cutoff = -1.0);

/// Pure state drawn from the Haar measure: complex standard normal
/// amplitudes, normalized. Deterministic in the seed.
ProbeState haar_random_state(int n_qubits, std::uint64_t seed);

/// Coefficients a_k, k = 0..floor(N/2), of the excitation-symmetric family
///   |Phi> proportional to sum_k a_k sum_{popcount(x) in {k, N-k}} |x>.
/// a must be real with the assembled state normalized; a_0 = 1/sqrt(2) (rest
/// zero) is the GHZ state.
class FamilyCoefficients {
 public:
  FamilyCoefficients(int n_qubits, Eigen::VectorXd a);

  /// Rescales a so the assembled state has unit norm; rejects all-zero a.
  static FamilyCoefficients normalized(int n_qubits, Eigen::VectorXd a);

  int n_qubits() const { return n_qubits_; }
  const Eigen::VectorXd& a() const { return a_; }

 private:
  int n_qubits_;
  Eigen::VectorXd a_;
};

ProbeState phi_family_state(const FamilyCoefficients& coeffs);

struct FamilyOptions {
  int max_iterations = 2000;  // per simplex run
  int threads = 0;            // restarts in parallel; 0 = all hardware threads
};

struct FamilyOptimum {
  FamilyCoefficients coeffs;
  double t_opt;
  double qfi;
  /// True when the best simplex run stopped at the iteration cap instead of
  /// converging; the value is still the best one seen.
  bool hit_iteration_cap;
};

/// Maximizes qfi_of_state jointly over family coefficients and log time with
/// Nelder-Mead restarts. The GHZ state at its own optimal time is always
/// restart 0, so the result is never below the GHZ maximum. Restart starting
/// points are seeded deterministically; ties resolve to the lowest restart
/// index, so the output is reproducible for any thread count.
FamilyOptimum optimize_family(int n_qubits, const NoiseParams& params, int n_restarts,
                              std::uint64_t seed, const FamilyOptions& opts = {});

}  // namespace ouspec
