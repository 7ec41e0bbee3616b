#include "ouspec/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "ouspec/optimize.hpp"

namespace ouspec {

namespace {

MaximizationResult max_closed_form(int n_qubits, const NoiseParams& params, ProbeKind probe) {
  auto curve = [&](double t) {
    const EvolutionSpec spec(params, t);
    return probe == ProbeKind::ghz ? qfi_ghz_closed(n_qubits, spec)
                                   : qfi_sep_closed(n_qubits, spec);
  };
  return maximize_over_time(curve, 1.0 / params.gamma);
}

MaximizationResult max_mixed(int n_qubits, const NoiseParams& params, MixingModel model,
                             double mixing) {
  auto curve = [&](double t) {
    const EvolutionSpec spec(params, t);
    return model == MixingModel::depolarized ? qfi_depolarized(n_qubits, mixing, spec)
                                             : qfi_dephased(n_qubits, mixing, spec);
  };
  return maximize_over_time(curve, 1.0 / params.gamma);
}

}  // namespace

MaximizationResult maximize_over_time(const std::function<double(double)>& qfi_curve,
                                      double t_seed) {
  const ScalarMaxResult r = golden_section_maximize(qfi_curve, t_seed);
  return {r.x_opt, r.f_opt, r.bracket_lo, r.bracket_hi, r.n_evals};
}

RatioPoint qfi_ratio_point(int n_qubits, double gamma, double coupling) {
  const NoiseParams params(gamma, coupling);
  const auto sep = max_closed_form(n_qubits, params, ProbeKind::separable);
  const auto ghz = max_closed_form(n_qubits, params, ProbeKind::ghz);
  return {n_qubits, gamma, sep.t_opt, sep.h_max, ghz.t_opt, ghz.h_max, ghz.h_max / sep.h_max};
}

double qfi_ratio(int n_qubits, double gamma, double coupling) {
  return qfi_ratio_point(n_qubits, gamma, coupling).ratio;
}

ThresholdResult threshold_gamma0(int n_qubits, double coupling) {
  if (n_qubits < 2)
    throw std::invalid_argument("threshold_gamma0: need at least 2 qubits for a crossover");
  (void)NoiseParams(1.0, coupling);  // validates coupling up front

  auto excess = [&](double log_gamma) {
    return qfi_ratio(n_qubits, std::exp(log_gamma), coupling) - 1.0;
  };

  // Decade scan for a sign change; R_N is increasing in gamma and crosses 1
  // between the slow-noise (1/N^2) and fast-noise (N^2) regimes.
  const double ln10 = std::log(10.0);
  double lo = std::log(coupling) - 3.0 * ln10;
  double hi = lo;
  double f_lo = excess(lo);
  bool bracketed = false;
  for (int d = 1; d <= 6 && !bracketed; ++d) {
    hi = std::log(coupling) + (d - 3.0) * ln10;
    const double f_hi = excess(hi);
    if (f_lo < 0.0 && f_hi >= 0.0) {
      bracketed = true;
    } else {
      lo = hi;
      f_lo = f_hi;
    }
  }
  if (!bracketed)
    throw std::runtime_error("threshold_gamma0: no crossing in [1e-3, 1e3] * coupling");

  int iterations = 0;
  while (hi - lo > 1e-9 && iterations < 200) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = std::exp(0.5 * (lo + hi));
  return {root, qfi_ratio(n_qubits, root, coupling) - 1.0, iterations};
}

PurityThreshold threshold_purity(int n_qubits, double gamma, MixingModel model, double coupling) {
  if (n_qubits < 2)
    throw std::invalid_argument("threshold_purity: need at least 2 qubits for a crossover");
  const NoiseParams params(gamma, coupling);
  const double h_sep = max_closed_form(n_qubits, params, ProbeKind::separable).h_max;

  // Excess advantage of the degraded GHZ probe; increasing in the mixing
  // parameter. At mixing -> 0 the probe carries no gamma information at all.
  auto excess = [&](double mixing) { return max_mixed(n_qubits, params, model, mixing).h_max / h_sep - 1.0; };

  const double at_pure = excess(1.0);
  if (at_pure <= 0.0)
    throw std::domain_error(
        "threshold_purity: no advantage region (gamma is at or below the crossover gamma0)");

  double lo = 0.0, hi = 1.0;  // excess(0) = -1 analytically: H_mixed vanishes
  int iterations = 0;
  while (hi - lo > 1e-10 && iterations < 200) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = 0.5 * (lo + hi);
  const double purity = model == MixingModel::depolarized ? purity_depolarized(n_qubits, root)
                                                          : purity_dephased(root);
  return {root, purity, std::abs(excess(root)), iterations};
}

std::vector<double> qsnr_invariance_scan(double gamma_tilde, const std::vector<double>& couplings,
                                         int n_qubits, ProbeKind probe) {
  if (!std::isfinite(gamma_tilde) || gamma_tilde <= 0.0)
    throw std::domain_error("qsnr_invariance_scan: gamma_tilde must be finite and > 0");
  std::vector<double> out;
  out.reserve(couplings.size());
  for (double coupling : couplings) {
    const NoiseParams params(gamma_tilde * coupling, coupling);
    const auto best = max_closed_form(n_qubits, params, probe);
    // gamma^2 H_gamma = gamma_tilde^2 (coupling^2 H_gamma), the squared
    // signal-to-noise ratio in the dimensionless width gamma_tilde.
    out.push_back(params.gamma * params.gamma * best.h_max);
  }
  return out;
}

}  // namespace ouspec
