#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ouspec/analysis.hpp"

namespace ouspec {

/// One simulated estimation run: M repetitions of preparing a GHZ probe,
/// evolving for t_meas, and reading out the two-outcome parity measurement.
/// The outcome count is binomial with success probability p+(gamma_true).
struct ExperimentConfig {
  int n_qubits = 1;
  double gamma_true = 1.0;
  double coupling = 1.0;
  /// Measurement time; negative selects the GHZ-optimal time at gamma_true.
  /// t_meas = 0 is honored literally (the readout then carries no
  /// information: p+ = 1).
  double t_meas = -1.0;
  /// Uniform prior support; <= 0 selects [gamma_true / 5, 5 gamma_true].
  double prior_lo = 0.0;
  double prior_hi = 0.0;
  int grid_points = 2000;
  long n_measurements = 10000;
  int n_repetitions = 100;
  std::uint64_t seed = 0;
  int threads = 0;

  /// Copy with defaults filled in; validates everything. All operations below
  /// resolve their input first, so callers may leave the defaults at 0.
  ExperimentConfig resolved() const;
};

/// Posterior density over gamma on a uniform grid; weights are a normalized
/// density: sum(weights) * cell = 1.
struct PosteriorGrid {
  Eigen::VectorXd gammas;
  Eigen::VectorXd weights;

  double cell() const { return gammas.size() > 1 ? gammas(1) - gammas(0) : 1.0; }
};

struct PosteriorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Number of + outcomes in config.n_measurements Bernoulli draws at
/// p+(gamma_true); deterministic in config.seed.
long simulate_outcomes(const ExperimentConfig& config);

/// Posterior from k observed + outcomes under the binomial likelihood
/// p+^k (1-p+)^(M-k) against the uniform prior. The log likelihood is
/// max-shifted before exponentiation so M ~ 1e8 stays finite.
PosteriorGrid posterior(long k_plus, const ExperimentConfig& config);

PosteriorMoments estimate(const PosteriorGrid& post);

struct ErrorCurvePoint {
  long n_measurements = 0;
  /// Mean over repetitions of sqrt(posterior variance) / posterior mean.
  double epsilon_posterior = 0.0;
  /// Relative spread of the posterior means across repetitions (0 when
  /// n_repetitions < 2).
  double epsilon_ensemble = 0.0;
  /// Cramer-Rao floor 1 / (gamma sqrt(M max_t H)).
  double epsilon_cr = 0.0;
};

/// Repeats the simulate -> posterior -> estimate pipeline n_repetitions
/// times per measurement count. Repetition r of count M draws from a
/// substream derived from (M, r), so the table is reproducible for any
/// thread count and any subset of counts is consistent with the full run.
std::vector<ErrorCurvePoint> error_curve(const ExperimentConfig& config,
                                         const std::vector<long>& measurement_counts);

/// Relative Cramer-Rao bound on estimating gamma from M probes read out at
/// the time-optimal QFI: 1 / (gamma sqrt(M max_t H)).
double cr_bound(int n_qubits, double gamma, double coupling, long n_measurements,
                ProbeKind probe);

}  // namespace ouspec
