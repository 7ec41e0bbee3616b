// Acceptance gate: end-to-end checks of the toolkit's headline claims, one
// printed line each. Exits 0 only when every selected check passes.
//
// Usage: ouspec_acceptance --cli PATH_TO_CLI [--only 1,4,10]

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ouspec/ouspec.hpp"

using namespace ouspec;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

double peak_qfi(int n, const NoiseParams& p, ProbeKind kind, double* t_opt = nullptr) {
  auto curve = [&](double t) {
    const EvolutionSpec spec(p, t);
    return kind == ProbeKind::ghz ? qfi_ghz_closed(n, spec) : qfi_sep_closed(n, spec);
  };
  const auto r = maximize_over_time(curve, 1.0 / p.gamma);
  if (t_opt) *t_opt = r.t_opt;
  return r.h_max;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---- the ten checks ------------------------------------------------------

bool check_beta_oracle(std::string& detail) {
  const auto grid = linspace(0.01, 5.0, 20);
  double worst = 0.0;
  int i = 0;
  for (auto [gamma, coupling] : {std::pair{1.0, 1.0}, std::pair{5.0, 1.0}, std::pair{1.0, 3.0}}) {
    const NoiseParams p(gamma, coupling);
    const auto curve = mc_characteristic_curve(p, grid, 1, 100000, 20260101 + i++);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double target = std::exp(-0.5 * beta(p, grid[j]));
      const double z = std::abs(curve[j].mean - target) / curve[j].std_error;
      worst = std::max(worst, z);
    }
  }
  detail = "max |z| over 3 parameter sets x 20 times = " + fmt(worst) + " (bound 4)";
  return worst <= 4.0;
}

bool check_engine_consistency(std::string& detail) {
  Eigen::VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const ProbeState plus_state(1, plus);
  double worst = 0.0;
  for (double gamma : {0.1, 1.0, 10.0, 100.0}) {
    for (double t : {0.01, 0.1, 1.0}) {
      const EvolutionSpec spec(NoiseParams(gamma, 1.0), t);
      worst = std::max(worst, std::abs(qfi_of_state(plus_state, spec) /
                                           qfi_sep_closed(1, spec) - 1.0));
      for (int n = 2; n <= 5; ++n)
        worst = std::max(worst, std::abs(qfi_of_state(ghz_state(n), spec) /
                                             qfi_ghz_closed(n, spec) - 1.0));
    }
  }
  detail = "max relative gap engine vs closed forms (N = 1..5, 12-point grid) = " + fmt(worst) +
           " (bound 1e-8)";
  return worst <= 1e-8;
}

bool check_readout_optimality(std::string& detail) {
  double worst = 0.0;
  for (double gamma : logspace(0.1, 100.0, 20)) {
    for (double t : logspace(0.001, 10.0, 20)) {
      const EvolutionSpec spec(NoiseParams(gamma, 1.0), t);
      const double quantum = qfi_ghz_closed(3, spec);
      const double classical = binary_measurement_fisher(3, spec);
      if (quantum == 0.0) {
        if (classical != 0.0) worst = 1.0;
        continue;
      }
      worst = std::max(worst, std::abs(classical / quantum - 1.0));
    }
  }
  detail = "max relative gap two-outcome Fisher vs QFI on 400-point grid = " + fmt(worst) +
           " (bound 1e-10)";
  return worst <= 1e-10;
}

bool check_ratio_shape(std::string& detail) {
  double worst_asym = 0.0;
  int non_monotone = 0, worst_crossings = 1;
  for (int n : {2, 3, 4}) {
    const double lo = qfi_ratio(n, 1e-3);
    const double hi = qfi_ratio(n, 1e3);
    worst_asym = std::max(worst_asym, std::abs(lo * n - 1.0));
    worst_asym = std::max(worst_asym, std::abs(hi / n - 1.0));

    double prev = 0.0;
    int crossings = 0;
    bool first = true;
    for (double gamma : logspace(1e-3, 1e3, 40)) {
      const double r = qfi_ratio(n, gamma);
      if (!first) {
        if (r <= prev) ++non_monotone;
        if ((prev - 1.0) * (r - 1.0) < 0.0) ++crossings;
      }
      prev = r;
      first = false;
    }
    if (crossings != 1) worst_crossings = crossings;
  }
  detail = "asymptote deviation " + fmt(worst_asym) + " (bound 0.05), " +
           std::to_string(non_monotone) + " monotonicity violations, crossings of 1 per curve = " +
           std::to_string(worst_crossings);
  return worst_asym <= 0.05 && non_monotone == 0 && worst_crossings == 1;
}

bool check_coupling_invariance(std::string& detail) {
  const std::vector<double> couplings{0.1, 1.0, 10.0};
  double worst = 0.0;
  for (double gamma_tilde : {0.5, 10.0}) {
    for (auto kind : {ProbeKind::separable, ProbeKind::ghz}) {
      const auto vals = qsnr_invariance_scan(gamma_tilde, couplings, 3, kind);
      for (double v : vals) worst = std::max(worst, std::abs(v / vals[0] - 1.0));
    }
  }
  double worst_linear = 0.0;
  const double base = threshold_gamma0(2, 1.0).value;
  for (double coupling : {0.5, 2.0})
    worst_linear = std::max(
        worst_linear, std::abs(threshold_gamma0(2, coupling).value / (coupling * base) - 1.0));
  detail = "scaled-sensitivity spread " + fmt(worst) + " (bound 1e-6), crossover linearity " +
           fmt(worst_linear) + " (bound 1e-4)";
  return worst <= 1e-6 && worst_linear <= 1e-4;
}

bool check_random_state_extremality(std::string& detail) {
  const NoiseParams p(10.0, 1.0);
  double worst_excess = -1.0, worst_family = 0.0;
  for (int n : {2, 3}) {
    const double ghz_max = peak_qfi(n, p, ProbeKind::ghz);
    const std::size_t samples = 10000;
    std::vector<double> hmax(samples);
    parallel_for_each(samples, 0, [&](std::size_t s) {
      const auto psi = haar_random_state(n, derive_seed(1789, (n << 20) + s));
      auto curve = [&](double t) { return qfi_of_state(psi, EvolutionSpec(p, t)); };
      hmax[s] = maximize_over_time(curve, 0.1).h_max;
    });
    for (double h : hmax) worst_excess = std::max(worst_excess, (h - ghz_max) / ghz_max);
    const auto opt = optimize_family(n, p, 8, 271828);
    worst_family = std::max(worst_family, std::abs(opt.qfi / ghz_max - 1.0));
  }
  detail = "max Haar excess over GHZ = " + fmt(worst_excess) +
           " (bound 1e-6), family vs GHZ gap = " + fmt(worst_family) + " (bound 1e-6)";
  return worst_excess <= 1e-6 && worst_family <= 1e-6;
}

bool check_slow_noise_family(std::string& detail) {
  const NoiseParams p(0.01, 1.0);
  bool ok = true;
  std::string gains;
  for (int n : {2, 3}) {
    const double ghz_max = peak_qfi(n, p, ProbeKind::ghz);
    const auto opt = optimize_family(n, p, 8, 314159);
    ok = ok && opt.qfi >= ghz_max * (1.0 - 1e-12);
    if (!gains.empty()) gains += ", ";
    gains += "N=" + std::to_string(n) + ": +" + fmt((opt.qfi / ghz_max - 1.0) * 100.0) + "%";
  }
  detail = "family gain over GHZ at slow noise (" + gains + "); asserted >= 0 only";
  return ok;
}

bool check_posterior_saturation(std::string& detail) {
  const std::vector<long> counts{100, 1000, 10000, 100000};
  std::vector<std::vector<ErrorCurvePoint>> curves;
  for (int n : {1, 4}) {
    ExperimentConfig cfg;
    cfg.n_qubits = n;
    cfg.gamma_true = 10.0;
    cfg.coupling = 1.0;
    cfg.n_repetitions = 100;
    cfg.seed = 9001;
    curves.push_back(error_curve(cfg, counts));
  }
  double worst_ratio_lo = 10.0, worst_ratio_hi = 0.0;
  for (const auto& curve : curves) {
    const double ratio = curve.back().epsilon_posterior / curve.back().epsilon_cr;
    worst_ratio_lo = std::min(worst_ratio_lo, ratio);
    worst_ratio_hi = std::max(worst_ratio_hi, ratio);
  }
  bool ordered = true;
  for (std::size_t j = 0; j < counts.size(); ++j)
    ordered = ordered && curves[1][j].epsilon_posterior < curves[0][j].epsilon_posterior;
  detail = "posterior error / bound at M = 1e5 in [" + fmt(worst_ratio_lo) + ", " +
           fmt(worst_ratio_hi) + "] (required [0.8, 1.3]); 4-qubit curve below single-qubit: " +
           (ordered ? "yes" : "no");
  return worst_ratio_lo >= 0.8 && worst_ratio_hi <= 1.3 && ordered;
}

bool check_preparation_threshold_shape(std::string& detail) {
  double worst_end = 1.0, worst_reduction = 0.0;
  bool interior_min = true, decreasing = true;
  for (auto model : {MixingModel::depolarized, MixingModel::dephased}) {
    double prev_min = 2.0;
    for (int n : {2, 3, 4, 5}) {
      const double gamma0 = threshold_gamma0(n).value;
      const auto gammas = logspace(1.02 * gamma0, 1e6, 25);
      std::vector<double> mu;
      mu.reserve(gammas.size());
      for (double g : gammas) mu.push_back(threshold_purity(n, g, model).purity);
      worst_end = std::min({worst_end, mu.front(), mu.back()});
      const double inner = *std::min_element(mu.begin() + 1, mu.end() - 1);
      interior_min = interior_min && inner < mu.front() && inner < mu.back();
      decreasing = decreasing && inner < prev_min;
      prev_min = inner;
    }
  }
  for (int n : {2, 5}) {
    const EvolutionSpec spec(NoiseParams(3.0, 1.0), 0.2);
    const double ghz = qfi_ghz_closed(n, spec);
    worst_reduction = std::max(worst_reduction, std::abs(qfi_depolarized(n, 1.0, spec) / ghz - 1.0));
    worst_reduction = std::max(worst_reduction, std::abs(qfi_dephased(n, 1.0, spec) / ghz - 1.0));
  }
  detail = "threshold purity at scan ends >= " + fmt(worst_end) +
           " (bar 0.95), interior minimum: " + (interior_min ? "yes" : "no") +
           ", minimum decreases with N: " + (decreasing ? "yes" : "no") +
           ", ideal-preparation reduction gap " + fmt(worst_reduction) + " (bound 1e-12)";
  return worst_end >= 0.95 && interior_min && decreasing && worst_reduction <= 1e-12;
}

struct CliSpec {
  std::string cli;
  std::filesystem::path tmpdir;
};

bool run_cli(const CliSpec& env, const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = "\"" + env.cli + "\" " + args + " --out \"" + out.string() + "\"";
  return std::system(cmd.c_str()) == 0;
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str() && !sa.str().empty();
}

bool check_property_suite(const CliSpec& env, std::string& detail) {
  // Trace preservation and positivity across Haar inputs.
  double worst_trace = 0.0, min_eig = 1.0;
  const EvolutionSpec spec(NoiseParams(1.0, 1.0), 0.5);
  for (int s = 0; s < 1000; ++s) {
    const auto rho = dephase_common(haar_random_state(3, 5000 + s), spec);
    worst_trace = std::max(worst_trace, std::abs(rho.matrix().trace().real() - 1.0));
    const auto sys = diagonalize(rho);  // throws below -1e-10
    min_eig = std::min(min_eig, sys.eigenvalues.minCoeff());
  }
  if (worst_trace > 1e-12 || min_eig < -1e-10) {
    detail = "channel violates trace/positivity: trace gap " + fmt(worst_trace) + ", min eig " +
             fmt(min_eig);
    return false;
  }

  // The bare qubit frequency must not leak into the sensitivity.
  double worst_omega = 0.0;
  {
    const EvolutionSpec with(NoiseParams(2.0, 1.0), 0.4, 3.7);
    const EvolutionSpec without(NoiseParams(2.0, 1.0), 0.4, 0.0);
    for (const auto& psi : {ghz_state(3), haar_random_state(3, 99)})
      worst_omega = std::max(
          worst_omega, std::abs(qfi_of_state(psi, with) / qfi_of_state(psi, without) - 1.0));
  }
  if (worst_omega > 1e-8) {
    detail = "sensitivity depends on the bare frequency: gap " + fmt(worst_omega);
    return false;
  }

  // Analytic state derivative vs a central finite difference.
  double worst_fd = 0.0;
  {
    const double gamma = 2.0, h = 1e-5 * gamma;
    for (const auto& psi : {ghz_state(3), haar_random_state(2, 4)}) {
      const auto drho = dephase_derivative(psi, EvolutionSpec(NoiseParams(gamma, 1.3), 0.7));
      const auto hi = dephase_common(psi, EvolutionSpec(NoiseParams(gamma + h, 1.3), 0.7));
      const auto lo = dephase_common(psi, EvolutionSpec(NoiseParams(gamma - h, 1.3), 0.7));
      const Eigen::MatrixXcd fd = (hi.matrix() - lo.matrix()) / (2.0 * h);
      worst_fd = std::max(worst_fd, (drho - fd).cwiseAbs().maxCoeff() / drho.cwiseAbs().maxCoeff());
    }
  }
  if (worst_fd > 1e-4) {
    detail = "state derivative disagrees with finite differences: " + fmt(worst_fd);
    return false;
  }

  // Posterior normalization.
  {
    ExperimentConfig cfg;
    cfg.n_qubits = 2;
    cfg.gamma_true = 10.0;
    cfg.n_measurements = 2000;
    cfg.seed = 31;
    const auto post = posterior(simulate_outcomes(cfg), cfg);
    const double gap = std::abs(post.weights.sum() * post.cell() - 1.0);
    if (gap > 1e-10) {
      detail = "posterior normalization off by " + fmt(gap);
      return false;
    }
  }

  // Byte-reproducibility of every CLI subcommand (multi-threaded on purpose).
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"beta-check", "beta-check --quick --time 0 --time 0.5 --time 1 --threads 2"},
      {"qfi-scan", "qfi-scan --gamma-points 5 --threads 2"},
      {"ratio-scan", "ratio-scan --gamma-points 5 --n-qubits 2 --threads 2"},
      {"threshold", "threshold --n-qubits 2 --n-qubits 3"},
      {"haar-scan", "haar-scan --samples 25 --gamma 10 --n-qubits 2 --threads 4"},
      {"family-opt", "family-opt --gamma 10 --n-qubits 2 --restarts 3 --threads 2"},
      {"bayes-sim", "bayes-sim --quick --measurements 100 --measurements 1000 --threads 3"},
      {"robustness", "robustness --n-qubits 2 --gamma-points 6"},
      {"selftest", "selftest"},
  };
  for (const auto& [name, args] : runs) {
    const auto out1 = env.tmpdir / (name + ".1.csv");
    const auto out2 = env.tmpdir / (name + ".2.csv");
    if (!run_cli(env, args, out1) || !run_cli(env, args, out2)) {
      detail = "subcommand " + name + " exited nonzero";
      return false;
    }
    if (!same_bytes(out1, out2)) {
      detail = "subcommand " + name + " is not byte-reproducible";
      return false;
    }
  }

  detail = "trace gap " + fmt(worst_trace) + ", min eigenvalue " + fmt(min_eig) +
           ", frequency-independence gap " + fmt(worst_omega) + ", derivative FD gap " +
           fmt(worst_fd) + ", all 9 subcommands byte-reproducible";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: ouspec_acceptance --cli PATH [--only 1,2,...]\n";
      return 2;
    }
  }
  if (cli.empty()) {
    std::cerr << "usage: ouspec_acceptance --cli PATH [--only 1,2,...]\n";
    return 2;
  }

  auto selected = [&only](int id) {
    if (only.empty()) return true;
    std::stringstream ss(only);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty() && std::stoi(tok) == id) return true;
    return false;
  };

  CliSpec env;
  env.cli = cli;
  env.tmpdir = std::filesystem::temp_directory_path() /
               ("ouspec_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(env.tmpdir);

  struct Check {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Check> checks = {
      {1, "Monte Carlo decoherence oracle", check_beta_oracle},
      {2, "spectral engine vs closed forms", check_engine_consistency},
      {3, "two-outcome readout optimality", check_readout_optimality},
      {4, "probe-ratio asymptotes and crossing", check_ratio_shape},
      {5, "coupling invariance", check_coupling_invariance},
      {6, "random-state extremality", check_random_state_extremality},
      {7, "slow-noise family advantage", check_slow_noise_family},
      {8, "posterior errors saturate the bound", check_posterior_saturation},
      {9, "preparation-threshold shape", check_preparation_threshold_shape},
      {10, "property suite", [&env](std::string& d) { return check_property_suite(env, d); }},
  };

  int failures = 0, ran = 0;
  for (const auto& check : checks) {
    if (!selected(check.id)) continue;
    ++ran;
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = check.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d. %s: %s [%.1f s]\n", ok ? "PASS" : "FAIL", check.id, check.label,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  std::error_code ec;
  std::filesystem::remove_all(env.tmpdir, ec);

  std::printf("%d/%d checks passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
