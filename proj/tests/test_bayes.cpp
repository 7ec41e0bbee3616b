#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ouspec/bayes.hpp"
#include "ouspec/dynamics.hpp"
#include "ouspec/random.hpp"

using namespace ouspec;

namespace {

ExperimentConfig reference_config() {
  ExperimentConfig c;
  c.n_qubits = 2;
  c.gamma_true = 10.0;
  c.n_measurements = 10000;
  c.seed = 4242;
  return c;
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("configuration resolution fills defaults and validates") {
  const auto c = reference_config().resolved();
  CHECK(c.prior_lo == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c.prior_hi == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(c.t_meas > 0.0);  // resolved to the GHZ-optimal time

  ExperimentConfig bad = reference_config();
  bad.prior_lo = 5.0;
  bad.prior_hi = 4.0;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
  bad = reference_config();
  bad.prior_lo = 11.0;  // gamma_true outside the support
  bad.prior_hi = 20.0;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
  bad = reference_config();
  bad.grid_points = 50;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
  bad = reference_config();
  bad.n_measurements = -1;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
  bad = reference_config();
  bad.n_repetitions = 0;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
  bad = reference_config();
  bad.n_qubits = 0;
  CHECK_THROWS_AS(bad.resolved(), std::domain_error);
}

TEST_CASE("outcome simulation is deterministic and concentrates at p+") {
  auto c = reference_config();
  const long k = simulate_outcomes(c);
  CHECK(simulate_outcomes(c) == k);
  c.seed = 4243;
  const long k2 = simulate_outcomes(c);
  CHECK(k2 != k);  // extremely unlikely to coincide

  const auto resolved = c.resolved();
  const auto [pp, pm] = binary_outcome_probs(
      resolved.n_qubits, EvolutionSpec(NoiseParams(resolved.gamma_true, 1.0), resolved.t_meas));
  const double m = static_cast<double>(resolved.n_measurements);
  for (long kk : {k, k2})
    CHECK(std::abs(kk / m - pp) <= 4.0 * std::sqrt(pp * pm / m));
}

TEST_CASE("a zero-duration measurement always fires the + outcome") {
  auto c = reference_config();
  c.t_meas = 0.0;
  CHECK(simulate_outcomes(c) == c.n_measurements);
}

TEST_CASE("posterior is a normalized density") {
  const auto c = reference_config();
  const auto post = posterior(simulate_outcomes(c), c);
  REQUIRE(post.gammas.size() == c.grid_points);
  CHECK(std::abs(post.weights.sum() * post.cell() - 1.0) < 1e-10);
  CHECK(post.weights.minCoeff() >= 0.0);
  CHECK(post.gammas(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(post.gammas(post.gammas.size() - 1) == doctest::Approx(50.0).epsilon(1e-15));

  CHECK_THROWS_AS(posterior(-1, c), std::invalid_argument);
  CHECK_THROWS_AS(posterior(c.n_measurements + 1, c), std::invalid_argument);
}

TEST_CASE("zero measurements leave the prior untouched") {
  auto c = reference_config();
  c.n_measurements = 0;
  const auto post = posterior(0, c);
  // Each of the n grid points is one cell of width step, so the flat density
  // is 1 / (n step), a factor (n-1)/n below 1 / (hi - lo).
  const double flat = 1.0 / (post.weights.size() * post.cell());
  for (int i = 0; i < post.weights.size(); ++i)
    CHECK(post.weights(i) == doctest::Approx(flat).epsilon(1e-12));
  CHECK(flat == doctest::Approx(1.0 / 48.0).epsilon(1e-3));
  const auto m = estimate(post);
  CHECK(m.mean == doctest::Approx(26.0).epsilon(1e-12));
  // Discrete grid variance of a flat density carries a (n+1)/(n-1) factor.
  CHECK(m.variance == doctest::Approx(48.0 * 48.0 / 12.0).epsilon(2e-3));
}

TEST_CASE("posterior mode sits at the maximum-likelihood grid point") {
  const auto c = reference_config().resolved();
  const long k = simulate_outcomes(c);
  const auto post = posterior(k, c);
  int mode = 0;
  post.weights.maxCoeff(&mode);

  int best = 0;
  double best_ll = -1e308;
  for (int i = 0; i < post.gammas.size(); ++i) {
    const auto [pp, pm] = binary_outcome_probs(
        c.n_qubits, EvolutionSpec(NoiseParams(post.gammas(i), c.coupling), c.t_meas));
    const double ll = k * std::log(pp) + (c.n_measurements - k) * std::log(pm);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  CHECK(mode == best);
  // With 10^4 measurements the posterior sd is ~0.4, so the mode lands within
  // a few percent of the true width (this bound is ~5 sd).
  CHECK(post.gammas(mode) == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("credible intervals cover the true width") {
  const auto base = reference_config();
  int covered = 0;
  for (int r = 0; r < 100; ++r) {
    auto c = base;
    c.seed = derive_seed(base.seed, r);
    const auto m = estimate(posterior(simulate_outcomes(c), c));
    if (std::abs(m.mean - base.gamma_true) <= 3.0 * std::sqrt(m.variance)) ++covered;
  }
  CHECK(covered >= 99);
}

TEST_CASE("posterior error tracks the Cramer-Rao bound") {
  auto c = reference_config();
  c.n_repetitions = 40;
  const auto curve = error_curve(c, {100, 1000, 10000});
  REQUIRE(curve.size() == 3);
  for (const auto& pt : curve) {
    CHECK(pt.epsilon_posterior > 0.0);
    CHECK(pt.epsilon_ensemble > 0.0);
    CHECK(pt.epsilon_cr > 0.0);
  }
  // Monotone improvement with measurement count.
  CHECK(curve[1].epsilon_posterior < curve[0].epsilon_posterior);
  CHECK(curve[2].epsilon_posterior < curve[1].epsilon_posterior);
  // At M = 10^4 the posterior width has converged onto the bound.
  CHECK(curve[2].epsilon_posterior / curve[2].epsilon_cr == doctest::Approx(1.0).epsilon(0.2));
  // The bound itself scales as 1 / sqrt(M).
  CHECK(curve[1].epsilon_cr == doctest::Approx(curve[0].epsilon_cr / std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("error curve is reproducible and subset-consistent") {
  auto c = reference_config();
  c.n_repetitions = 10;
  c.threads = 1;
  const auto full = error_curve(c, {100, 1000});
  auto c3 = c;
  c3.threads = 3;
  const auto parallel = error_curve(c3, {100, 1000});
  CHECK(full[0].epsilon_posterior == parallel[0].epsilon_posterior);
  CHECK(full[1].epsilon_ensemble == parallel[1].epsilon_ensemble);

  const auto tail = error_curve(c, {1000});
  CHECK(tail[0].epsilon_posterior == full[1].epsilon_posterior);
  CHECK(tail[0].epsilon_ensemble == full[1].epsilon_ensemble);
  CHECK(tail[0].epsilon_cr == full[1].epsilon_cr);
}

TEST_CASE("error curve validates its inputs") {
  const auto c = reference_config();
  CHECK_THROWS_AS(error_curve(c, {}), std::invalid_argument);
  CHECK_THROWS_AS(error_curve(c, {100, 100}), std::invalid_argument);
  CHECK_THROWS_AS(error_curve(c, {1000, 100}), std::invalid_argument);
  CHECK_THROWS_AS(error_curve(c, {0, 100}), std::invalid_argument);
}

TEST_CASE("relative bound is identical for both probes on one qubit") {
  const double ghz = cr_bound(1, 10.0, 1.0, 1000, ProbeKind::ghz);
  const double sep = cr_bound(1, 10.0, 1.0, 1000, ProbeKind::separable);
  CHECK(ghz == doctest::Approx(sep).epsilon(1e-10));
  CHECK_THROWS_AS(cr_bound(1, 10.0, 1.0, 0, ProbeKind::ghz), std::domain_error);
}

}  // TEST_SUITE
