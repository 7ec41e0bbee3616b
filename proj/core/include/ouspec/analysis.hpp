#pragma once

#include <functional>
#include <vector>

#include "ouspec/dynamics.hpp"

namespace ouspec {

enum class ProbeKind { separable, ghz };
enum class MixingModel { depolarized, dephased };

struct MaximizationResult {
  double t_opt = 0.0;
  double h_max = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int n_evals = 0;
};

/// Peak of a QFI-vs-time curve. The curve must vanish at t -> 0 and
/// t -> inf with a single interior maximum, which every probe here
/// satisfies. Bracketing starts from t_seed (pass 1/gamma: the peak tracks
/// the noise correlation time). Throws std::runtime_error when the curve is
/// numerically zero everywhere reachable.
MaximizationResult maximize_over_time(const std::function<double(double)>& qfi_curve,
                                      double t_seed);

struct RatioPoint {
  int n_qubits = 0;
  double gamma = 0.0;
  double t_opt_sep = 0.0;
  double h_sep_max = 0.0;
  double t_opt_ghz = 0.0;
  double h_ghz_max = 0.0;
  double ratio = 0.0;  // h_ghz_max / h_sep_max
};

/// Time-optimized QFI of the GHZ and separable probes and their ratio
/// R_N(gamma). R_N -> 1/N for gamma -> 0 and -> N (up to the slowly
/// approached limit) for gamma -> inf.
RatioPoint qfi_ratio_point(int n_qubits, double gamma, double coupling = 1.0);
double qfi_ratio(int n_qubits, double gamma, double coupling = 1.0);

struct ThresholdResult {
  double value = 0.0;
  double residual = 0.0;  // objective value left at the root
  int iterations = 0;
};

/// Spectral width gamma0(N) where R_N crosses 1: below it the separable
/// probe wins, above it the GHZ probe wins. Found by a decade scan over
/// [1e-3, 1e3] * coupling followed by bisection in log gamma to 1e-9
/// relative width. Requires n_qubits >= 2.
ThresholdResult threshold_gamma0(int n_qubits, double coupling = 1.0);

struct PurityThreshold {
  double mixing_param = 0.0;  // p or delta at the advantage boundary
  double purity = 0.0;        // tr rho^2 at that parameter
  double residual = 0.0;      // |H_mix_max / H_sep_max - 1| at the root
  int iterations = 0;
};

/// Minimum preparation quality at which the degraded GHZ probe still beats N
/// independent qubits: bisects the mixing parameter on (0, 1] for the root
/// of max_t H_mixed = max_t H_sep and reports it with the matching purity.
/// Requires a gamma where the ideal GHZ probe wins (gamma > gamma0(N));
/// throws std::domain_error("no advantage region") otherwise.
PurityThreshold threshold_purity(int n_qubits, double gamma, MixingModel model,
                                 double coupling = 1.0);

/// Scaled sensitivity gamma^2 max_t H evaluated at gamma = gamma_tilde *
/// coupling for each coupling. Equals gamma_tilde^2 times the QFI of the
/// rescaled width gamma_tilde, which depends on gamma_tilde only, so all
/// entries agree to optimizer precision; a direct probe of the scale
/// invariance of the estimation problem.
std::vector<double> qsnr_invariance_scan(double gamma_tilde, const std::vector<double>& couplings,
                                         int n_qubits, ProbeKind probe);

}  // namespace ouspec
