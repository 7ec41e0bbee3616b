#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ouspec {

struct ScalarMaxResult {
  double x_opt = 0.0;
  double f_opt = 0.0;
  /// Bracket the maximum was isolated in; x_opt lies strictly inside.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int n_evals = 0;
};

/// Maximizes a unimodal positive-peaked function on (0, inf). Starting from
/// x_seed the routine scans a geometric ladder (factor 2, both directions)
/// for a strictly positive value, walks uphill until a bracket
/// a < b < c with f(b) >= max(f(a), f(c)) is found, then golden-section
/// refines to relative x tolerance rel_tol. Throws std::runtime_error when f
/// is numerically zero over 60 doublings in both directions (no peak to
/// find), or std::invalid_argument for a nonpositive seed.
ScalarMaxResult golden_section_maximize(const std::function<double(double)>& f, double x_seed,
                                        double rel_tol = 1e-8);

struct NelderMeadOptions {
  int max_iterations = 2000;
  /// Converged when the simplex f spread is below
  /// f_spread_tol * (1 + |f_best|) and its diameter is below
  /// x_spread_tol * (1 + |x_best|_inf).
  double f_spread_tol = 1e-11;
  double x_spread_tol = 1e-8;
  /// Offset of the n axis-aligned companion vertices around the start point.
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f_max = 0.0;
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
};

/// Derivative-free simplex maximization (reflection / expansion / contraction
/// / shrink). The best vertex is never discarded, so f_max >= f(x0) always.
/// Deterministic for a deterministic objective.
NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0,
                                      const NelderMeadOptions& opts = {});

}  // namespace ouspec
