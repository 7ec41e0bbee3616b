#include "ouspec/bayes.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ouspec/parallel.hpp"
#include "ouspec/random.hpp"

namespace ouspec {

namespace {

EvolutionSpec measurement_spec(const ExperimentConfig& c, double gamma) {
  return EvolutionSpec(NoiseParams(gamma, c.coupling), c.t_meas);
}

}  // namespace

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  if (c.n_qubits < 1 || c.n_qubits > kMaxQubits)
    throw std::domain_error("ExperimentConfig: probe size must be between 1 and 12 qubits");
  const NoiseParams params(c.gamma_true, c.coupling);

  if (c.t_meas < 0.0) {
    auto curve = [&](double t) { return qfi_ghz_closed(c.n_qubits, EvolutionSpec(params, t)); };
    c.t_meas = maximize_over_time(curve, 1.0 / c.gamma_true).t_opt;
  } else if (!std::isfinite(c.t_meas)) {
    throw std::domain_error("ExperimentConfig: t_meas must be finite");
  }

  if (c.prior_lo <= 0.0) c.prior_lo = c.gamma_true / 5.0;
  if (c.prior_hi <= 0.0) c.prior_hi = 5.0 * c.gamma_true;
  if (!std::isfinite(c.prior_lo) || !std::isfinite(c.prior_hi) || c.prior_lo <= 0.0 ||
      c.prior_lo >= c.prior_hi)
    throw std::domain_error("ExperimentConfig: prior must satisfy 0 < lo < hi");
  if (c.gamma_true <= c.prior_lo || c.gamma_true >= c.prior_hi)
    throw std::domain_error("ExperimentConfig: gamma_true must lie inside the prior support");

  if (c.grid_points < 100) throw std::domain_error("ExperimentConfig: need at least 100 grid points");
  if (c.n_measurements < 0) throw std::domain_error("ExperimentConfig: negative measurement count");
  if (c.n_repetitions < 1) throw std::domain_error("ExperimentConfig: need at least 1 repetition");
  return c;
}

long simulate_outcomes(const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  const double p_plus = binary_outcome_probs(c.n_qubits, measurement_spec(c, c.gamma_true)).first;
  if (p_plus >= 1.0) return c.n_measurements;  // t_meas = 0: the + outcome is certain
  auto rng = make_rng(c.seed);
  return std::binomial_distribution<long>(c.n_measurements, p_plus)(rng);
}

PosteriorGrid posterior(long k_plus, const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  if (k_plus < 0 || k_plus > c.n_measurements)
    throw std::invalid_argument("posterior: outcome count must lie in [0, n_measurements]");

  PosteriorGrid grid;
  grid.gammas.resize(c.grid_points);
  grid.weights.resize(c.grid_points);
  const double step = (c.prior_hi - c.prior_lo) / (c.grid_points - 1);
  const double k = static_cast<double>(k_plus);
  const double mk = static_cast<double>(c.n_measurements - k_plus);

  double max_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.grid_points; ++i) {
    const double gamma = c.prior_lo + i * step;
    grid.gammas(i) = gamma;
    const auto [pp, pm] = binary_outcome_probs(c.n_qubits, measurement_spec(c, gamma));
    // k log p+ + (M - k) log p-, with 0 log 0 = 0.
    double ll = 0.0;
    ll += k == 0.0 ? 0.0 : k * std::log(pp);
    ll += mk == 0.0 ? 0.0 : mk * std::log(pm);
    grid.weights(i) = ll;
    max_ll = std::max(max_ll, ll);
  }
  if (!std::isfinite(max_ll)) throw std::runtime_error("posterior: likelihood vanished on the whole grid");

  double sum = 0.0;
  for (int i = 0; i < c.grid_points; ++i) {
    grid.weights(i) = std::exp(grid.weights(i) - max_ll);
    sum += grid.weights(i);
  }
  grid.weights /= sum * step;
  return grid;
}

PosteriorMoments estimate(const PosteriorGrid& post) {
  if (post.gammas.size() < 2 || post.gammas.size() != post.weights.size())
    throw std::invalid_argument("estimate: malformed posterior grid");
  const double cell = post.cell();
  const double mean = (post.weights.array() * post.gammas.array()).sum() * cell;
  const double var =
      (post.weights.array() * (post.gammas.array() - mean).square()).sum() * cell;
  return {mean, std::max(0.0, var)};
}

std::vector<ErrorCurvePoint> error_curve(const ExperimentConfig& config,
                                         const std::vector<long>& measurement_counts) {
  const ExperimentConfig base = config.resolved();
  if (measurement_counts.empty())
    throw std::invalid_argument("error_curve: need at least one measurement count");
  for (std::size_t j = 0; j < measurement_counts.size(); ++j)
    if (measurement_counts[j] < 1 ||
        (j > 0 && measurement_counts[j] <= measurement_counts[j - 1]))
      throw std::invalid_argument("error_curve: measurement counts must be positive and increasing");

  const std::size_t n_counts = measurement_counts.size();
  const std::size_t reps = static_cast<std::size_t>(base.n_repetitions);
  std::vector<double> eps_post(n_counts * reps), means(n_counts * reps);

  parallel_for_each(n_counts * reps, base.threads, [&](std::size_t item) {
    const std::size_t j = item / reps;
    const std::size_t r = item % reps;
    ExperimentConfig c = base;
    c.n_measurements = measurement_counts[j];
    // Substream keyed by the count value, not its index, so any subset of
    // counts reproduces the matching rows of the full run.
    c.seed = derive_seed(derive_seed(base.seed, static_cast<std::uint64_t>(c.n_measurements)), r);
    const auto moments = estimate(posterior(simulate_outcomes(c), c));
    eps_post[item] = std::sqrt(moments.variance) / moments.mean;
    means[item] = moments.mean;
  });

  std::vector<ErrorCurvePoint> out(n_counts);
  for (std::size_t j = 0; j < n_counts; ++j) {
    ErrorCurvePoint pt;
    pt.n_measurements = measurement_counts[j];
    double sum_eps = 0.0, sum_mean = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      sum_eps += eps_post[j * reps + r];
      sum_mean += means[j * reps + r];
    }
    pt.epsilon_posterior = sum_eps / static_cast<double>(reps);
    const double mean_of_means = sum_mean / static_cast<double>(reps);
    if (reps > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = means[j * reps + r] - mean_of_means;
        ss += d * d;
      }
      pt.epsilon_ensemble = std::sqrt(ss / static_cast<double>(reps - 1)) / mean_of_means;
    }
    pt.epsilon_cr = cr_bound(base.n_qubits, base.gamma_true, base.coupling,
                             measurement_counts[j], ProbeKind::ghz);
    out[j] = pt;
  }
  return out;
}

double cr_bound(int n_qubits, double gamma, double coupling, long n_measurements,
                ProbeKind probe) {
  if (n_measurements < 1) throw std::domain_error("cr_bound: need at least 1 measurement");
  const NoiseParams params(gamma, coupling);
  auto curve = [&](double t) {
    const EvolutionSpec spec(params, t);
    return probe == ProbeKind::ghz ? qfi_ghz_closed(n_qubits, spec)
                                   : qfi_sep_closed(n_qubits, spec);
  };
  const double h_max = maximize_over_time(curve, 1.0 / gamma).h_max;
  return 1.0 / (gamma * std::sqrt(static_cast<double>(n_measurements) * h_max));
}

}  // namespace ouspec
