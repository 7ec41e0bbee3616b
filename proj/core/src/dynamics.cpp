#include "ouspec/dynamics.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ouspec/parallel.hpp"
#include "ouspec/random.hpp"

namespace ouspec {

namespace {

using cdouble = std::complex<double>;

void require_qubits(int n) {
  if (n < 1 || n > kMaxQubits)
    throw std::domain_error("probe size must be between 1 and 12 qubits");
}

void require_unit_interval(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0)
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

double pow4(int n) {
  const double d = n;
  return d * d * d * d;
}

// Decay-and-rotation multipliers per weight difference dw in [-2N, 2N]:
//   mult[dw]  = e^{-dw^2 beta / 2} e^{-i omega0 dw t}
//   dmult[dw] = mult[dw] * (-dw^2 dbeta_dgamma / 2)
// Built for dw >= 0 and mirrored by conjugation, so conj symmetry is exact
// and entrywise products keep Hermiticity to the input's precision.
struct PairTables {
  int off;
  std::vector<cdouble> mult;
  std::vector<cdouble> dmult;

  const cdouble& m(int dw) const { return mult[dw + off]; }
  const cdouble& dm(int dw) const { return dmult[dw + off]; }
};

PairTables make_tables(int n, const EvolutionSpec& spec) {
  const double b = beta(spec.params, spec.t);
  const double db = dbeta_dgamma(spec.params, spec.t);
  PairTables tab;
  tab.off = 2 * n;
  tab.mult.resize(4 * n + 1);
  tab.dmult.resize(4 * n + 1);
  for (int dw = 0; dw <= 2 * n; ++dw) {
    const cdouble m = std::polar(std::exp(-0.5 * dw * dw * b), -spec.omega0 * dw * spec.t);
    tab.mult[tab.off + dw] = m;
    tab.mult[tab.off - dw] = std::conj(m);
    const cdouble dm = m * (-0.5 * dw * dw * db);
    tab.dmult[tab.off + dw] = dm;
    tab.dmult[tab.off - dw] = std::conj(dm);
  }
  return tab;
}

template <typename Mult>
Eigen::MatrixXcd map_pure(const ProbeState& psi, const DephasingWeights& w, const Mult& mult,
                          bool derivative) {
  const auto& a = psi.amplitudes();
  const Eigen::Index d = a.size();
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index x = 0; x < d; ++x) {
    out(x, x) = derivative ? 0.0 : std::norm(a[x]);
    for (Eigen::Index y = x + 1; y < d; ++y) {
      const cdouble v = a[x] * std::conj(a[y]) * mult(w.weights[x] - w.weights[y]);
      out(x, y) = v;
      out(y, x) = std::conj(v);
    }
  }
  return out;
}

Eigen::MatrixXcd map_mixed(const Eigen::MatrixXcd& rho0, const DephasingWeights& w,
                           const PairTables& tab, bool derivative) {
  const Eigen::Index d = rho0.rows();
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index x = 0; x < d; ++x)
    for (Eigen::Index y = 0; y < d; ++y) {
      const int dw = w.weights[x] - w.weights[y];
      out(x, y) = rho0(x, y) * (derivative ? tab.dm(dw) : tab.m(dw));
    }
  return out;
}

}  // namespace

ProbeState::ProbeState(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  require_qubits(n_qubits_);
  if (amplitudes_.size() != Eigen::Index(1) << n_qubits_)
    throw std::invalid_argument("ProbeState: amplitude count must be 2^n_qubits");
  if (!amplitudes_.allFinite())
    throw std::invalid_argument("ProbeState: amplitudes must be finite");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("ProbeState: amplitudes must have unit norm");
}

ProbeState ProbeState::normalized(int n_qubits, Eigen::VectorXcd amplitudes) {
  if (!amplitudes.allFinite())
    throw std::invalid_argument("ProbeState: amplitudes must be finite");
  const double norm = amplitudes.norm();
  if (norm < 1e-150) throw std::invalid_argument("ProbeState: cannot normalize zero vector");
  return ProbeState(n_qubits, amplitudes / norm);
}

DensityMatrix::DensityMatrix(int n_qubits, Eigen::MatrixXcd matrix)
    : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
  require_qubits(n_qubits_);
  const Eigen::Index d = Eigen::Index(1) << n_qubits_;
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw std::invalid_argument("DensityMatrix: matrix must be 2^n x 2^n");
  if (!matrix_.allFinite()) throw std::invalid_argument("DensityMatrix: entries must be finite");
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("DensityMatrix: matrix must be Hermitian");
  if (std::abs(matrix_.trace() - 1.0) > 1e-10)
    throw std::invalid_argument("DensityMatrix: trace must be 1");
}

DephasingWeights weight_vector(int n_qubits) {
  require_qubits(n_qubits);
  const std::size_t d = std::size_t{1} << n_qubits;
  DephasingWeights w{n_qubits, std::vector<int>(d)};
  for (std::size_t x = 0; x < d; ++x)
    w.weights[x] = n_qubits - 2 * std::popcount(x);
  return w;
}

EvolutionSpec::EvolutionSpec(NoiseParams params, double t, double omega0)
    : params(params), t(t), omega0(omega0) {
  if (std::isnan(t) || t < 0.0 || std::isinf(t))
    throw std::domain_error("EvolutionSpec: t must be finite and >= 0");
  if (!std::isfinite(omega0)) throw std::domain_error("EvolutionSpec: omega0 must be finite");
}

ProbeState ghz_state(int n_qubits) {
  require_qubits(n_qubits);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
  a(0) = a(a.size() - 1) = 1.0 / std::sqrt(2.0);
  return ProbeState(n_qubits, std::move(a));
}

DensityMatrix dephase_common(const ProbeState& psi0, const EvolutionSpec& spec) {
  const auto w = weight_vector(psi0.n_qubits());
  const auto tab = make_tables(psi0.n_qubits(), spec);
  return DensityMatrix(psi0.n_qubits(),
                       map_pure(psi0, w, [&](int dw) { return tab.m(dw); }, false));
}

Eigen::MatrixXcd dephase_derivative(const ProbeState& psi0, const EvolutionSpec& spec) {
  const auto w = weight_vector(psi0.n_qubits());
  const auto tab = make_tables(psi0.n_qubits(), spec);
  return map_pure(psi0, w, [&](int dw) { return tab.dm(dw); }, true);
}

std::pair<DensityMatrix, Eigen::MatrixXcd> dephase_with_derivative(const ProbeState& psi0,
                                                                   const EvolutionSpec& spec) {
  const auto w = weight_vector(psi0.n_qubits());
  const auto tab = make_tables(psi0.n_qubits(), spec);
  return {DensityMatrix(psi0.n_qubits(),
                        map_pure(psi0, w, [&](int dw) { return tab.m(dw); }, false)),
          map_pure(psi0, w, [&](int dw) { return tab.dm(dw); }, true)};
}

DensityMatrix dephase_common_density(const DensityMatrix& rho0, const EvolutionSpec& spec) {
  const auto w = weight_vector(rho0.n_qubits());
  const auto tab = make_tables(rho0.n_qubits(), spec);
  return DensityMatrix(rho0.n_qubits(), map_mixed(rho0.matrix(), w, tab, false));
}

Eigen::MatrixXcd dephase_derivative_density(const DensityMatrix& rho0, const EvolutionSpec& spec) {
  const auto w = weight_vector(rho0.n_qubits());
  const auto tab = make_tables(rho0.n_qubits(), spec);
  return map_mixed(rho0.matrix(), w, tab, true);
}

DensityMatrix mc_evolve_common(const ProbeState& psi0, const EvolutionSpec& spec,
                               std::size_t n_traj, std::uint64_t seed, const MCOptions& opts) {
  const int n = psi0.n_qubits();
  if (spec.t == 0.0) return dephase_common(psi0, spec);
  if (n_traj < 2) throw std::domain_error("mc_evolve_common: need at least 2 trajectories");

  const auto n_steps = std::max<std::size_t>(
      opts.min_steps,
      static_cast<std::size_t>(std::ceil(spec.params.gamma * spec.t / opts.max_gamma_dt)));
  const double dt = spec.t / static_cast<double>(n_steps);
  const double sigma = std::sqrt(spec.params.gamma * spec.params.coupling / 2.0);
  const double decay = std::exp(-spec.params.gamma * dt);
  const double kick = sigma * std::sqrt(-std::expm1(-2.0 * spec.params.gamma * dt));

  // Sampled mean of e^{-i dw (omega0 t + phi)} for dw = 1..2N; dw = 0 is 1
  // exactly and negative dw follow by conjugation.
  const std::size_t n_blocks = (n_traj + kParallelBlock - 1) / kParallelBlock;
  std::vector<std::vector<cdouble>> partial(n_blocks, std::vector<cdouble>(2 * n, 0.0));

  parallel_blocks(n_traj, opts.threads, [&](std::size_t begin, std::size_t end, std::size_t block) {
    auto& acc = partial[block];
    for (std::size_t i = begin; i < end; ++i) {
      std::normal_distribution<double> normal;
      auto rng = make_rng(seed, i);
      double b = sigma * normal(rng);
      double phase = 0.0;
      for (std::size_t k = 0; k < n_steps; ++k) {
        const double b_next = b * decay + kick * normal(rng);
        phase += 0.5 * dt * (b + b_next);
        b = b_next;
      }
      const cdouble step = std::polar(1.0, -(spec.omega0 * spec.t + phase));
      cdouble cur = 1.0;
      for (int dw = 1; dw <= 2 * n; ++dw) {
        cur *= step;
        acc[dw - 1] += cur;
      }
    }
  });

  std::vector<cdouble> mean(2 * n + 1, 1.0);
  for (int dw = 1; dw <= 2 * n; ++dw) {
    cdouble s = 0.0;
    for (const auto& p : partial) s += p[dw - 1];
    mean[dw] = s / static_cast<double>(n_traj);
  }
  auto mult = [&](int dw) { return dw >= 0 ? mean[dw] : std::conj(mean[-dw]); };

  const auto w = weight_vector(n);
  return DensityMatrix(n, map_pure(psi0, w, mult, false));
}

double qfi_sep_closed(int n_qubits, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  if (spec.t == 0.0) return 0.0;
  const double db = dbeta_dgamma(spec.params, spec.t);
  const double den = std::expm1(4.0 * beta(spec.params, spec.t));
  if (den == 0.0) return 0.0;
  return 4.0 * n_qubits * db * db / den;
}

double qfi_ghz_closed(int n_qubits, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  if (spec.t == 0.0) return 0.0;
  const double db = dbeta_dgamma(spec.params, spec.t);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  const double den = std::expm1(4.0 * nn * beta(spec.params, spec.t));
  if (den == 0.0) return 0.0;
  return 4.0 * nn * nn * db * db / den;
}

double qfi_depolarized(int n_qubits, double p, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  require_unit_interval(p, "depolarization weight p");
  if (spec.t == 0.0 || p == 0.0) return 0.0;
  const double db = dbeta_dgamma(spec.params, spec.t);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  const double two_n = std::ldexp(1.0, n_qubits);
  const double a = (two_n - 2.0) * p + 2.0;
  // Denominator a^2 e^x - 4^N p^2 regrouped as a^2 (e^x - 1) + (a - 2^N p)(a + 2^N p)
  // with a - 2^N p = 2 (1 - p), which is exact and avoids cancellation.
  const double den =
      a * a * std::expm1(4.0 * nn * beta(spec.params, spec.t)) + 2.0 * (1.0 - p) * (a + two_n * p);
  if (den == 0.0) return 0.0;
  return 4.0 * two_n * pow4(n_qubits) * a * p * p * db * db / den;
}

double qfi_dephased(int n_qubits, double delta, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  require_unit_interval(delta, "coherence scale delta");
  if (spec.t == 0.0 || delta == 0.0) return 0.0;
  const double db = dbeta_dgamma(spec.params, spec.t);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  // e^x - delta^2 = (e^x - 1) + (1 - delta)(1 + delta), exact at delta = 1.
  const double den =
      std::expm1(4.0 * nn * beta(spec.params, spec.t)) + (1.0 - delta) * (1.0 + delta);
  if (den == 0.0) return 0.0;
  return 4.0 * pow4(n_qubits) * delta * delta * db * db / den;
}

DensityMatrix depolarized_ghz(int n_qubits, double p) {
  require_qubits(n_qubits);
  require_unit_interval(p, "depolarization weight p");
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  Eigen::MatrixXcd m = (1.0 - p) / static_cast<double>(d) *
                       Eigen::MatrixXcd::Identity(d, d);
  m(0, 0) += p / 2.0;
  m(d - 1, d - 1) += p / 2.0;
  m(0, d - 1) += p / 2.0;
  m(d - 1, 0) += p / 2.0;
  return DensityMatrix(n_qubits, std::move(m));
}

DensityMatrix dephased_ghz(int n_qubits, double delta) {
  require_qubits(n_qubits);
  require_unit_interval(delta, "coherence scale delta");
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  m(0, 0) = m(d - 1, d - 1) = 0.5;
  m(0, d - 1) = m(d - 1, 0) = delta / 2.0;
  return DensityMatrix(n_qubits, std::move(m));
}

double purity_depolarized(int n_qubits, double p) {
  require_qubits(n_qubits);
  require_unit_interval(p, "depolarization weight p");
  const double two_n = std::ldexp(1.0, n_qubits);
  return p * p + (1.0 - p * p) / two_n;
}

double purity_dephased(double delta) {
  require_unit_interval(delta, "coherence scale delta");
  return 0.5 * (1.0 + delta * delta);
}

std::pair<double, double> binary_outcome_probs(int n_qubits, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  const double z = 2.0 * nn * beta(spec.params, spec.t);
  return {0.5 * (1.0 + std::exp(-z)), -0.5 * std::expm1(-z)};
}

double binary_measurement_fisher(int n_qubits, const EvolutionSpec& spec) {
  require_qubits(n_qubits);
  if (spec.t == 0.0) return 0.0;
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  const double z = 2.0 * nn * beta(spec.params, spec.t);
  const double q = std::exp(-z);
  const auto [pp, pm] = binary_outcome_probs(n_qubits, spec);
  if (pm == 0.0 || q == 0.0) return 0.0;
  const double dp = nn * dbeta_dgamma(spec.params, spec.t) * q;
  return dp * dp / (pp * pm);
}

}  // namespace ouspec
