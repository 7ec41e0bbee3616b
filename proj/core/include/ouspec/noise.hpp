#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ouspec {

/// Parameters of the Ornstein-Uhlenbeck frequency noise B(t): spectral width
/// `gamma` (inverse correlation time) and coupling strength `coupling`, both
/// in inverse-time units. The stationary autocorrelation is
///   K(t, t') = (gamma * coupling / 2) * exp(-gamma * |t - t'|),
/// so the Lorentzian power spectrum has half width gamma and the variance of
/// B is gamma * coupling / 2.
struct NoiseParams {
  double gamma;
  double coupling;

  NoiseParams(double gamma, double coupling);
};

/// One realization of B on a uniform time grid; values[k] = B(k * dt),
/// values.size() == n_steps + 1.
struct OUTrajectory {
  double dt = 0.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate with its standard error of the mean.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct MCOptions {
  /// Bound on the integration step: gamma * dt <= max_gamma_dt.
  double max_gamma_dt = 0.01;
  /// Steps below the first requested time, so short times are still resolved.
  std::size_t min_steps = 16;
  /// Worker threads; 0 means all hardware threads. Results are identical for
  /// every thread count.
  int threads = 0;
};

/// Accumulated dephasing exponent
///   beta(t) = (coupling / gamma) * (exp(-gamma t) + gamma t - 1),
/// the double integral of K over [0, t]^2 divided by the noise variance
/// normalization. A phase m * phi(t), phi(t) = int_0^t B(s) ds, dephases as
/// <exp(i m phi)> = exp(-m^2 beta / 2). Evaluated by a series for
/// gamma * t < 1e-3, where the closed form cancels catastrophically.
double beta(const NoiseParams& params, double t);

/// Analytic d beta / d gamma =
/// (coupling / gamma^2) * (1 - (1 + gamma t) exp(-gamma t)).
double dbeta_dgamma(const NoiseParams& params, double t);

/// Exact-discretization OU path: B(0) drawn from the stationary law
/// N(0, gamma * coupling / 2), then
///   B_{k+1} = B_k e^{-gamma dt} + sigma sqrt(1 - e^{-2 gamma dt}) xi_k
/// with sigma^2 = gamma * coupling / 2 and xi_k standard normal. The update
/// matches the continuous process at the grid points for any dt.
OUTrajectory sample_ou_trajectory(const NoiseParams& params, double dt,
                                  std::size_t n_steps, std::uint64_t seed);

/// Monte Carlo estimate of Re <exp(i m phi(t))> over n_traj independent
/// trajectories, with phi accumulated by the trapezoidal rule. Requires
/// t > 0, m != 0, n_traj >= 2.
MCEstimate mc_characteristic(const NoiseParams& params, double t, int m,
                             std::size_t n_traj, std::uint64_t seed,
                             const MCOptions& opts = {});

/// mc_characteristic at every point of a strictly increasing positive grid,
/// sharing trajectories across grid points: each trajectory is walked once to
/// t_grid.back() and sampled where it crosses a grid time. Entries at
/// different times are therefore correlated, but each one has the same law as
/// a standalone mc_characteristic call.
std::vector<MCEstimate> mc_characteristic_curve(const NoiseParams& params,
                                                const std::vector<double>& t_grid, int m,
                                                std::size_t n_traj, std::uint64_t seed,
                                                const MCOptions& opts = {});

/// Extension seam for other stationary Gaussian dephasing kernels. Only the
/// OU kernel ships; downstream code consumes this interface or the free
/// functions above and never assumes a specific kernel shape.
class NoiseKernel {
 public:
  virtual ~NoiseKernel() = default;
  virtual double beta(double t) const = 0;
  virtual double dbeta_dgamma(double t) const = 0;
  virtual OUTrajectory sample_trajectory(double dt, std::size_t n_steps,
                                         std::uint64_t seed) const = 0;
};

class OUKernel final : public NoiseKernel {
 public:
  explicit OUKernel(NoiseParams params) : params_(params) {}

  double beta(double t) const override { return ouspec::beta(params_, t); }
  double dbeta_dgamma(double t) const override { return ouspec::dbeta_dgamma(params_, t); }
  OUTrajectory sample_trajectory(double dt, std::size_t n_steps,
                                 std::uint64_t seed) const override {
    return sample_ou_trajectory(params_, dt, n_steps, seed);
  }

  const NoiseParams& params() const { return params_; }

 private:
  NoiseParams params_;
};

}  // namespace ouspec
