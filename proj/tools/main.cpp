// ouspec: reproduces the spectral-width estimation analyses as CSV tables.
//
// Subcommands map one-to-one onto the library scans; every run with a fixed
// seed and fixed --threads is byte-reproducible, and output row order always
// follows input grid order regardless of execution order. Exit codes:
// 0 success, 1 internal error, 2 usage or validation error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ouspec/ouspec.hpp"

namespace {

using namespace ouspec;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

class CsvOutput {
 public:
  explicit CsvOutput(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open --out path: " + path);
    }
  }

  void row(const std::vector<std::string>& cells) {
    std::ostream& os = file_.is_open() ? file_ : std::cout;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
    if (!os) throw std::runtime_error("write to output stream failed");
  }

  void finish() {
    std::ostream& os = file_.is_open() ? file_ : std::cout;
    os.flush();
    if (!os) throw std::runtime_error("flush of output stream failed");
  }

 private:
  std::ofstream file_;
};

// Shared flag bundle; each subcommand registers only the members it uses.
struct Opts {
  double gamma = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  int gamma_points = 25;
  double coupling = 1.0;
  std::vector<int> n_qubits;
  double time = -1.0;
  std::vector<double> times;
  std::uint64_t seed = 0;
  long samples = 0;
  int restarts = 0;
  std::vector<long> measurements;
  int repetitions = 100;
  double prior_lo = 0.0;
  double prior_hi = 0.0;
  int grid_points = 2000;
  std::string model;
  std::string out;
  bool quick = false;
  int threads = 0;

  long effective_samples() const {
    return quick ? std::max<long>(samples / 10, 10) : samples;
  }
  int effective_repetitions() const {
    return quick ? std::max(repetitions / 10, 2) : repetitions;
  }
};

void add_out_flags(CLI::App* cmd, Opts& o) {
  cmd->add_option("--out", o.out, "Write CSV here instead of standard output");
  cmd->add_flag("--quick", o.quick, "Divide sample counts by 10 for a fast smoke run");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all hardware threads)")
      ->check(CLI::Range(0, 1024));
  // Handled by expand_config_args before parsing; registered for help/usage.
  cmd->add_option("--config", "Flat key=value file mirroring this subcommand's flags; "
                              "explicit flags win on conflict");
}

std::vector<std::string> split_tokens(const std::string& value) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : value) {
    if (ch == ' ' || ch == '\t' || ch == ',') {
      if (!cur.empty()) tokens.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

// Rewrites the argument list with the contents of --config FILE appended as
// ordinary flags. Keys already given on the command line are skipped, which
// is what makes explicit flags win. Bool keys accept true/false and 1/0.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open --config file: " + path);

  auto given = [&args](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const auto stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed config line " + std::to_string(lineno) + " in " +
                                  path + " (expected key=value)");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("empty key in config file " + path);
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value == "true" || value == "yes") {
      args.push_back(flag);
    } else if (value == "false" || value == "no") {
      // explicit off: nothing to add
    } else {
      for (const auto& tok : split_tokens(value)) {
        args.push_back(flag);
        args.push_back(tok);
      }
    }
  }
  return args;
}

void add_gamma_grid_flags(CLI::App* cmd, Opts& o, double lo_default, double hi_default,
                          int points_default) {
  o.gamma_min = lo_default;
  o.gamma_max = hi_default;
  o.gamma_points = points_default;
  cmd->add_option("--gamma-min", o.gamma_min, "Low end of the log gamma grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--gamma-max", o.gamma_max, "High end of the log gamma grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--gamma-points", o.gamma_points, "Number of log-spaced gamma points")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo < hi) && points > 1)
    throw std::invalid_argument("gamma grid needs gamma-min < gamma-max");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double ratio = hi / lo;
  for (int i = 0; i < points; ++i)
    g[i] = lo * std::pow(ratio, static_cast<double>(i) / (points - 1));
  return g;
}

// Single --gamma wins over the grid flags when the user sets it explicitly.
std::vector<double> gamma_grid(const CLI::App* cmd, const Opts& o) {
  if (cmd->count("--gamma") > 0) return {o.gamma};
  return log_grid(o.gamma_min, o.gamma_max, o.gamma_points);
}

MaximizationResult peak(int n, const NoiseParams& p, ProbeKind kind) {
  auto curve = [&](double t) {
    const EvolutionSpec spec(p, t);
    return kind == ProbeKind::ghz ? qfi_ghz_closed(n, spec) : qfi_sep_closed(n, spec);
  };
  return maximize_over_time(curve, 1.0 / p.gamma);
}

int cmd_beta_check(const Opts& o) {
  std::vector<double> grid = o.times;
  if (grid.empty()) {
    for (int i = 0; i < 20; ++i) grid.push_back(0.01 + (5.0 - 0.01) * i / 19.0);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("beta-check: --time values must be strictly increasing");
  const NoiseParams params(o.gamma, o.coupling);

  // t = 0 needs no trajectories: the characteristic function is exactly 1.
  std::vector<double> positive(grid.begin() + (grid.front() == 0.0 ? 1 : 0), grid.end());
  MCOptions mc;
  mc.threads = o.threads;
  std::vector<MCEstimate> estimates;
  if (!positive.empty())
    estimates = mc_characteristic_curve(params, positive, 1, o.effective_samples(), o.seed, mc);

  CsvOutput csv(o.out);
  csv.row({"t", "beta_analytic", "mc_mean", "mc_stderr", "z_score", "status"});
  std::size_t j = 0;
  for (double t : grid) {
    const double b = beta(params, t);
    double mean = 1.0, se = 0.0;
    if (t > 0.0) {
      mean = estimates[j].mean;
      se = estimates[j].std_error;
      ++j;
    }
    const double target = std::exp(-0.5 * b);
    const double z = se > 0.0 ? (mean - target) / se : 0.0;
    csv.row({fmt(t), fmt(b), fmt(mean), fmt(se), fmt(z), "ok"});
  }
  csv.finish();
  return 0;
}

int cmd_qfi_scan(const CLI::App* cmd, const Opts& o) {
  const auto gammas = gamma_grid(cmd, o);
  const double t = o.time;
  if (!(t >= 0.0)) throw std::invalid_argument("qfi-scan: --time must be >= 0");
  CsvOutput csv(o.out);
  csv.row({"gamma", "N", "time", "h_sep", "h_ghz", "status"});
  for (int n : o.n_qubits) {
    for (double g : gammas) {
      const EvolutionSpec spec(NoiseParams(g, o.coupling), t);
      csv.row({fmt(g), fmt(n), fmt(t), fmt(qfi_sep_closed(n, spec)), fmt(qfi_ghz_closed(n, spec)),
               "ok"});
    }
  }
  csv.finish();
  return 0;
}

int cmd_ratio_scan(const CLI::App* cmd, const Opts& o) {
  const auto gammas = gamma_grid(cmd, o);
  CsvOutput csv(o.out);
  csv.row({"gamma", "N", "h_sep_max", "t_opt_sep", "h_ghz_max", "t_opt_ghz", "ratio", "status"});
  for (int n : o.n_qubits) {
    for (double g : gammas) {
      const auto pt = qfi_ratio_point(n, g, o.coupling);
      csv.row({fmt(g), fmt(n), fmt(pt.h_sep_max), fmt(pt.t_opt_sep), fmt(pt.h_ghz_max),
               fmt(pt.t_opt_ghz), fmt(pt.ratio), "ok"});
    }
  }
  csv.finish();
  return 0;
}

int cmd_threshold(const Opts& o) {
  CsvOutput csv(o.out);
  csv.row({"N", "gamma0", "residual", "iterations", "status"});
  for (int n : o.n_qubits) {
    const auto th = threshold_gamma0(n, o.coupling);
    csv.row({fmt(n), fmt(th.value), fmt(th.residual), fmt(th.iterations), "ok"});
  }
  csv.finish();
  return 0;
}

int cmd_haar_scan(const CLI::App* cmd, const Opts& o) {
  const auto gammas = gamma_grid(cmd, o);
  const long samples = o.effective_samples();
  FamilyOptions fam;
  fam.threads = o.threads;

  CsvOutput csv(o.out);
  csv.row({"kind", "sample_id", "gamma", "N", "h_random_max", "ratio_vs_sep", "status"});
  std::uint64_t stream = 0;
  for (int n : o.n_qubits) {
    for (double g : gammas) {
      const NoiseParams params(g, o.coupling);
      const double sep_max = peak(n, params, ProbeKind::separable).h_max;
      const double ghz_max = peak(n, params, ProbeKind::ghz).h_max;

      std::vector<double> hmax(static_cast<std::size_t>(samples));
      parallel_for_each(hmax.size(), o.threads, [&](std::size_t s) {
        const auto psi = haar_random_state(n, derive_seed(o.seed, stream + s));
        auto curve = [&](double t) { return qfi_of_state(psi, EvolutionSpec(params, t)); };
        hmax[s] = maximize_over_time(curve, 1.0 / g).h_max;
      });
      stream += static_cast<std::uint64_t>(samples);

      for (long s = 0; s < samples; ++s)
        csv.row({"haar", fmt(s), fmt(g), fmt(n), fmt(hmax[static_cast<std::size_t>(s)]),
                 fmt(hmax[static_cast<std::size_t>(s)] / sep_max), "ok"});
      csv.row({"ghz", "-1", fmt(g), fmt(n), fmt(ghz_max), fmt(ghz_max / sep_max), "ok"});
      const auto opt = optimize_family(n, params, o.restarts, derive_seed(o.seed, 0xFA417ULL), fam);
      csv.row({"family", "-1", fmt(g), fmt(n), fmt(opt.qfi), fmt(opt.qfi / sep_max), "ok"});
    }
  }
  csv.finish();
  return 0;
}

int cmd_family_opt(const CLI::App* cmd, const Opts& o) {
  const auto gammas = gamma_grid(cmd, o);
  FamilyOptions fam;
  fam.threads = o.threads;
  CsvOutput csv(o.out);
  csv.row({"gamma", "N", "t_opt", "h_family", "h_ghz_max", "ratio_vs_ghz", "hit_iteration_cap",
           "coeffs", "status"});
  for (int n : o.n_qubits) {
    for (double g : gammas) {
      const NoiseParams params(g, o.coupling);
      const double ghz_max = peak(n, params, ProbeKind::ghz).h_max;
      const auto opt = optimize_family(n, params, o.restarts, o.seed, fam);
      std::string coeffs;
      for (Eigen::Index k = 0; k < opt.coeffs.a().size(); ++k) {
        if (k) coeffs += ' ';
        coeffs += fmt(opt.coeffs.a()(k));
      }
      csv.row({fmt(g), fmt(n), fmt(opt.t_opt), fmt(opt.qfi), fmt(ghz_max),
               fmt(opt.qfi / ghz_max), opt.hit_iteration_cap ? "1" : "0", coeffs, "ok"});
    }
  }
  csv.finish();
  return 0;
}

int cmd_bayes_sim(const Opts& o) {
  CsvOutput csv(o.out);
  csv.row({"N", "M", "epsilon_posterior", "epsilon_ensemble", "cr_epsilon", "n_repetitions",
           "status"});
  for (int n : o.n_qubits) {
    ExperimentConfig cfg;
    cfg.n_qubits = n;
    cfg.gamma_true = o.gamma;
    cfg.coupling = o.coupling;
    cfg.t_meas = o.time;  // negative = GHZ-optimal
    cfg.prior_lo = o.prior_lo;
    cfg.prior_hi = o.prior_hi;
    cfg.grid_points = o.grid_points;
    cfg.n_repetitions = o.effective_repetitions();
    cfg.seed = derive_seed(o.seed, static_cast<std::uint64_t>(n));
    cfg.threads = o.threads;
    for (const auto& pt : error_curve(cfg, o.measurements))
      csv.row({fmt(n), fmt(pt.n_measurements), fmt(pt.epsilon_posterior),
               fmt(pt.epsilon_ensemble), fmt(pt.epsilon_cr), fmt(cfg.n_repetitions), "ok"});
  }
  csv.finish();
  return 0;
}

int cmd_robustness(const CLI::App* cmd, const Opts& o) {
  std::vector<MixingModel> models;
  if (o.model.empty() || o.model == "depolarized") models.push_back(MixingModel::depolarized);
  if (o.model.empty() || o.model == "dephased") models.push_back(MixingModel::dephased);

  const bool explicit_grid =
      cmd->count("--gamma") > 0 || cmd->count("--gamma-min") > 0 || cmd->count("--gamma-max") > 0;

  CsvOutput csv(o.out);
  csv.row({"gamma", "N", "model", "mixing_param_threshold", "purity_threshold", "status"});
  for (int n : o.n_qubits) {
    // Default grid hugs the advantage region: just above gamma0(N) up to 1e6.
    std::vector<double> gammas;
    if (explicit_grid) {
      gammas = gamma_grid(cmd, o);
    } else {
      const double gamma0 = threshold_gamma0(n, o.coupling).value;
      gammas = log_grid(1.02 * gamma0, 1e6 * o.coupling, o.gamma_points);
    }
    for (auto model : models) {
      const char* name = model == MixingModel::depolarized ? "depolarized" : "dephased";
      for (double g : gammas) {
        try {
          const auto th = threshold_purity(n, g, model, o.coupling);
          csv.row({fmt(g), fmt(n), name, fmt(th.mixing_param), fmt(th.purity), "ok"});
        } catch (const std::domain_error&) {
          // No advantage at this gamma: keep the row, flag the status.
          csv.row({fmt(g), fmt(n), name, fmt(0.0), fmt(0.0), "no_advantage"});
        }
      }
    }
  }
  csv.finish();
  return 0;
}

int cmd_selftest(const Opts& o) {
  CsvOutput csv(o.out);
  csv.row({"check", "measured", "bound", "status"});
  bool all_ok = true;
  auto report = [&](const std::string& name, double measured, double bound) {
    const bool ok = measured <= bound;
    all_ok = all_ok && ok;
    csv.row({name, fmt(measured), fmt(bound), ok ? "ok" : "fail"});
  };

  {  // closed-form beta vs Simpson quadrature of the kernel double integral
    const NoiseParams p(1.0, 1.0);
    const double t = 1.0;
    const int steps = 4096;
    const double h = t / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double u = i * h;
      sum += w * (t - u) * 0.5 * std::exp(-u);
    }
    const double quad = 2.0 * sum * h / 3.0;
    report("beta_quadrature", std::abs(beta(p, t) / quad - 1.0), 1e-10);
  }
  {  // analytic gamma derivative vs central finite difference
    const double g = 3.0, h = 1e-6 * g;
    const double fd =
        (beta(NoiseParams(g + h, 2.0), 0.7) - beta(NoiseParams(g - h, 2.0), 0.7)) / (2.0 * h);
    report("dbeta_fd", std::abs(dbeta_dgamma(NoiseParams(g, 2.0), 0.7) / fd - 1.0), 1e-5);
  }
  {  // spectral engine vs closed form
    const EvolutionSpec spec(NoiseParams(10.0, 1.0), 0.1);
    const double engine = qfi_of_state(ghz_state(3), spec);
    report("engine_vs_closed", std::abs(engine / qfi_ghz_closed(3, spec) - 1.0), 1e-8);
  }
  {  // parity readout saturates the quantum bound
    const EvolutionSpec spec(NoiseParams(1.0, 1.0), 1.0);
    report("binary_fisher",
           std::abs(binary_measurement_fisher(2, spec) / qfi_ghz_closed(2, spec) - 1.0), 1e-10);
  }
  {  // degraded preparations reduce to the ideal formulas at p = delta = 1
    const EvolutionSpec spec(NoiseParams(5.0, 1.0), 0.2);
    const double ghz = qfi_ghz_closed(3, spec);
    report("depolarized_reduction", std::abs(qfi_depolarized(3, 1.0, spec) / ghz - 1.0), 1e-12);
    report("dephased_reduction", std::abs(qfi_dephased(3, 1.0, spec) / ghz - 1.0), 1e-12);
  }
  {  // posterior normalization
    ExperimentConfig cfg;
    cfg.n_qubits = 2;
    cfg.gamma_true = 10.0;
    cfg.n_measurements = 1000;
    cfg.seed = 1;
    const auto post = posterior(simulate_outcomes(cfg), cfg);
    report("posterior_norm", std::abs(post.weights.sum() * post.cell() - 1.0), 1e-10);
  }
  {  // scaled sensitivity is coupling-invariant
    const auto vals = qsnr_invariance_scan(10.0, {0.1, 1.0, 10.0}, 2, ProbeKind::ghz);
    double spread = 0.0;
    for (double v : vals) spread = std::max(spread, std::abs(v / vals[0] - 1.0));
    report("qsnr_invariance", spread, 1e-6);
  }
  {  // crossover root-finder residual
    report("threshold_residual", std::abs(threshold_gamma0(2, o.coupling).residual), 1e-6);
  }
  {  // Monte Carlo determinism
    const NoiseParams p(1.0, 1.0);
    const auto a = mc_characteristic(p, 1.0, 1, 10000, o.seed);
    const auto b = mc_characteristic(p, 1.0, 1, 10000, o.seed);
    report("mc_determinism", a.mean == b.mean && a.std_error == b.std_error ? 0.0 : 1.0, 0.0);
  }
  csv.finish();
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled-probe estimation toolkit for Ornstein-Uhlenbeck dephasing"};
  app.require_subcommand(1);

  Opts beta_o, qfi_o, ratio_o, thresh_o, haar_o, family_o, bayes_o, robust_o, self_o;

  auto* beta_cmd =
      app.add_subcommand("beta-check", "Compare the closed-form decoherence exponent to Monte Carlo");
  beta_o.gamma = 1.0;
  beta_o.samples = 100000;
  beta_o.seed = 12345;
  beta_cmd->add_option("--gamma", beta_o.gamma, "Spectral width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  beta_cmd->add_option("--coupling", beta_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  beta_cmd
      ->add_option("--time", beta_o.times,
                   "Grid time (repeatable, increasing); default 20 points on [0.01, 5]")
      ->check(CLI::NonNegativeNumber);
  beta_cmd->add_option("--samples", beta_o.samples, "Trajectories per run")
      ->check(CLI::Range(static_cast<long>(2), static_cast<long>(100000000)))
      ->capture_default_str();
  beta_cmd->add_option("--seed", beta_o.seed, "Random seed")->capture_default_str();
  add_out_flags(beta_cmd, beta_o);

  auto* qfi_cmd = app.add_subcommand("qfi-scan", "Tabulate closed-form QFI over a gamma grid");
  qfi_o.n_qubits = {1, 2, 3};
  qfi_o.time = 0.1;
  qfi_cmd->add_option("--gamma", qfi_o.gamma, "Single gamma instead of a grid")
      ->check(CLI::PositiveNumber);
  add_gamma_grid_flags(qfi_cmd, qfi_o, 0.1, 100.0, 25);
  qfi_cmd->add_option("--coupling", qfi_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  qfi_cmd->add_option("--n-qubits", qfi_o.n_qubits, "Probe sizes (repeatable)")
      ->check(CLI::Range(1, kMaxQubits))
      ->capture_default_str();
  qfi_cmd->add_option("--time", qfi_o.time, "Interaction time")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_out_flags(qfi_cmd, qfi_o);

  auto* ratio_cmd =
      app.add_subcommand("ratio-scan", "Time-optimized GHZ / separable QFI ratio over gamma");
  ratio_o.n_qubits = {2, 3, 4};
  ratio_cmd->add_option("--gamma", ratio_o.gamma, "Single gamma instead of a grid")
      ->check(CLI::PositiveNumber);
  add_gamma_grid_flags(ratio_cmd, ratio_o, 1e-3, 1e3, 40);
  ratio_cmd->add_option("--coupling", ratio_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ratio_cmd->add_option("--n-qubits", ratio_o.n_qubits, "Probe sizes (repeatable)")
      ->check(CLI::Range(1, kMaxQubits))
      ->capture_default_str();
  add_out_flags(ratio_cmd, ratio_o);

  auto* thresh_cmd =
      app.add_subcommand("threshold", "Crossover spectral width gamma0(N) where the ratio hits 1");
  thresh_o.n_qubits = {2, 3, 4, 5};
  thresh_cmd->add_option("--coupling", thresh_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  thresh_cmd->add_option("--n-qubits", thresh_o.n_qubits, "Probe sizes (repeatable, >= 2)")
      ->check(CLI::Range(2, kMaxQubits))
      ->capture_default_str();
  add_out_flags(thresh_cmd, thresh_o);

  auto* haar_cmd =
      app.add_subcommand("haar-scan", "Time-maximized QFI of Haar-random probes vs GHZ and family");
  haar_o.gamma = 10.0;
  haar_o.n_qubits = {2, 3};
  haar_o.samples = 1000;
  haar_o.restarts = 6;
  haar_o.seed = 7;
  haar_cmd->add_option("--gamma", haar_o.gamma, "Single gamma instead of a grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_gamma_grid_flags(haar_cmd, haar_o, 0.1, 100.0, 7);
  haar_cmd->add_option("--coupling", haar_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  haar_cmd->add_option("--n-qubits", haar_o.n_qubits, "Probe sizes (repeatable)")
      ->check(CLI::Range(1, kMaxQubits))
      ->capture_default_str();
  haar_cmd->add_option("--samples", haar_o.samples, "Haar samples per (gamma, N)")
      ->check(CLI::Range(static_cast<long>(1), static_cast<long>(10000000)))
      ->capture_default_str();
  haar_cmd->add_option("--restarts", haar_o.restarts, "Family optimizer restarts")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  haar_cmd->add_option("--seed", haar_o.seed, "Random seed")->capture_default_str();
  add_out_flags(haar_cmd, haar_o);

  auto* family_cmd =
      app.add_subcommand("family-opt", "Optimize the excitation-symmetric probe family");
  family_o.gamma = 10.0;
  family_o.n_qubits = {2, 3};
  family_o.restarts = 8;
  family_o.seed = 11;
  family_cmd->add_option("--gamma", family_o.gamma, "Single gamma instead of a grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_gamma_grid_flags(family_cmd, family_o, 0.1, 100.0, 7);
  family_cmd->add_option("--coupling", family_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  family_cmd->add_option("--n-qubits", family_o.n_qubits, "Probe sizes (repeatable)")
      ->check(CLI::Range(1, kMaxQubits))
      ->capture_default_str();
  family_cmd->add_option("--restarts", family_o.restarts, "Optimizer restarts")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  family_cmd->add_option("--seed", family_o.seed, "Random seed")->capture_default_str();
  add_out_flags(family_cmd, family_o);

  auto* bayes_cmd =
      app.add_subcommand("bayes-sim", "Bayesian estimation error vs the Cramer-Rao bound");
  bayes_o.gamma = 10.0;
  bayes_o.n_qubits = {1, 4};
  bayes_o.measurements = {100, 1000, 10000, 100000};
  bayes_o.seed = 2718;
  bayes_o.time = -1.0;
  bayes_cmd->add_option("--gamma", bayes_o.gamma, "True spectral width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bayes_cmd->add_option("--coupling", bayes_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bayes_cmd->add_option("--n-qubits", bayes_o.n_qubits, "Probe sizes (repeatable)")
      ->check(CLI::Range(1, kMaxQubits))
      ->capture_default_str();
  bayes_cmd->add_option("--time", bayes_o.time,
                        "Measurement time (negative = GHZ-optimal at gamma)");
  bayes_cmd
      ->add_option("--measurements", bayes_o.measurements,
                   "Measurement counts M (repeatable, increasing)")
      ->capture_default_str();
  bayes_cmd->add_option("--repetitions", bayes_o.repetitions, "Repetitions per M")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  bayes_cmd->add_option("--prior-lo", bayes_o.prior_lo, "Prior lower edge (0 = gamma / 5)")
      ->capture_default_str();
  bayes_cmd->add_option("--prior-hi", bayes_o.prior_hi, "Prior upper edge (0 = 5 gamma)")
      ->capture_default_str();
  bayes_cmd->add_option("--grid-points", bayes_o.grid_points, "Posterior grid resolution")
      ->check(CLI::Range(100, 10000000))
      ->capture_default_str();
  bayes_cmd->add_option("--seed", bayes_o.seed, "Random seed")->capture_default_str();
  add_out_flags(bayes_cmd, bayes_o);

  auto* robust_cmd = app.add_subcommand(
      "robustness", "Preparation-quality threshold of the GHZ advantage across gamma");
  robust_o.n_qubits = {2, 3, 4, 5};
  robust_cmd->add_option("--gamma", robust_o.gamma, "Single gamma instead of a grid")
      ->check(CLI::PositiveNumber);
  add_gamma_grid_flags(robust_cmd, robust_o, 0.0, 0.0, 25);
  robust_cmd->get_option("--gamma-min")->default_str("1.02 * gamma0(N)");
  robust_cmd->get_option("--gamma-max")->default_str("1e6 * coupling");
  robust_cmd->add_option("--coupling", robust_o.coupling, "Probe-environment coupling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  robust_cmd->add_option("--n-qubits", robust_o.n_qubits, "Probe sizes (repeatable, >= 2)")
      ->check(CLI::Range(2, kMaxQubits))
      ->capture_default_str();
  robust_cmd->add_option("--model", robust_o.model, "Restrict to one mixing model")
      ->check(CLI::IsMember({"depolarized", "dephased"}));
  add_out_flags(robust_cmd, robust_o);

  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in oracle checks");
  self_o.seed = 424242;
  self_o.coupling = 1.0;
  self_cmd->add_option("--seed", self_o.seed, "Random seed")->capture_default_str();
  add_out_flags(self_cmd, self_o);

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<const char*> argv2{argc > 0 ? argv[0] : "ouspec"};
  for (const auto& a : args) argv2.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv2.size()), argv2.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (beta_cmd->parsed()) return cmd_beta_check(beta_o);
    if (qfi_cmd->parsed()) return cmd_qfi_scan(qfi_cmd, qfi_o);
    if (ratio_cmd->parsed()) return cmd_ratio_scan(ratio_cmd, ratio_o);
    if (thresh_cmd->parsed()) return cmd_threshold(thresh_o);
    if (haar_cmd->parsed()) return cmd_haar_scan(haar_cmd, haar_o);
    if (family_cmd->parsed()) return cmd_family_opt(family_cmd, family_o);
    if (bayes_cmd->parsed()) return cmd_bayes_sim(bayes_o);
    if (robust_cmd->parsed()) return cmd_robustness(robust_cmd, robust_o);
    if (self_cmd->parsed()) return cmd_selftest(self_o);
    return 2;  // unreachable: require_subcommand(1)
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
