#include "ouspec/qfi.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ouspec/optimize.hpp"
#include "ouspec/parallel.hpp"
#include "ouspec/random.hpp"

namespace ouspec {

namespace {

// Binomial row C(n, 0..n); n <= 12 so everything is exact in double.
std::vector<double> binomial_row(int n) {
  std::vector<double> row(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
  return row;
}

// Squared norm of the assembled family state for unit coefficients of class k.
std::vector<double> family_class_sizes(int n) {
  const auto binom = binomial_row(n);
  std::vector<double> sizes(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k)
    sizes[k] = k == n - k ? binom[k] : binom[k] + binom[n - k];
  return sizes;
}

}  // namespace

EigenSystem diagonalize(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("diagonalize: eigensolver failed to converge");
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("diagonalize: matrix has a significantly negative eigenvalue");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double qfi_general(const DensityMatrix& rho, const Eigen::MatrixXcd& drho, double eig_cutoff) {
  const Eigen::Index d = rho.dim();
  if (drho.rows() != d || drho.cols() != d)
    throw std::invalid_argument("qfi_general: drho dimension mismatch");
  if (!drho.allFinite()) throw std::invalid_argument("qfi_general: drho must be finite");
  const double scale = std::max(1.0, drho.cwiseAbs().maxCoeff());
  if ((drho - drho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("qfi_general: drho must be Hermitian");

  const EigenSystem es = diagonalize(rho);
  const double cutoff = eig_cutoff < 0.0 ? 1e-12 * es.eigenvalues.maxCoeff() : eig_cutoff;

  // A_{mn} = <m| drho |n> in the eigenbasis of rho.
  const Eigen::MatrixXcd a = es.eigenvectors.adjoint() * drho * es.eigenvectors;
  double h = 0.0;
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index m = 0; m < d; ++m) {
      const double den = es.eigenvalues(n) + es.eigenvalues(m);
      if (den > cutoff) h += std::norm(a(m, n)) / den;
    }
  return 2.0 * h;
}

double qfi_of_state(const ProbeState& psi0, const EvolutionSpec& spec, double eig_cutoff) {
  const auto [rho, drho] = dephase_with_derivative(psi0, spec);
  return qfi_general(rho, drho, eig_cutoff);
}

ProbeState haar_random_state(int n_qubits, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::domain_error("haar_random_state: probe size must be between 1 and 12 qubits");
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd a(Eigen::Index(1) << n_qubits);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    a(i) = std::complex<double>(re, im);
  }
  return ProbeState::normalized(n_qubits, std::move(a));
}

FamilyCoefficients::FamilyCoefficients(int n_qubits, Eigen::VectorXd a)
    : n_qubits_(n_qubits), a_(std::move(a)) {
  if (n_qubits_ < 1 || n_qubits_ > kMaxQubits)
    throw std::domain_error("FamilyCoefficients: probe size must be between 1 and 12 qubits");
  if (a_.size() != n_qubits_ / 2 + 1)
    throw std::invalid_argument("FamilyCoefficients: need floor(N/2) + 1 coefficients");
  if (!a_.allFinite()) throw std::invalid_argument("FamilyCoefficients: coefficients must be finite");
  const auto sizes = family_class_sizes(n_qubits_);
  double norm_sq = 0.0;
  for (Eigen::Index k = 0; k < a_.size(); ++k) norm_sq += a_(k) * a_(k) * sizes[k];
  if (std::abs(norm_sq - 1.0) > 1e-12)
    throw std::invalid_argument("FamilyCoefficients: assembled state must have unit norm");
}

FamilyCoefficients FamilyCoefficients::normalized(int n_qubits, Eigen::VectorXd a) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::domain_error("FamilyCoefficients: probe size must be between 1 and 12 qubits");
  if (a.size() != n_qubits / 2 + 1)
    throw std::invalid_argument("FamilyCoefficients: need floor(N/2) + 1 coefficients");
  if (!a.allFinite()) throw std::invalid_argument("FamilyCoefficients: coefficients must be finite");
  const auto sizes = family_class_sizes(n_qubits);
  double norm_sq = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) norm_sq += a(k) * a(k) * sizes[k];
  if (norm_sq < 1e-300)
    throw std::invalid_argument("FamilyCoefficients: cannot normalize zero coefficients");
  return FamilyCoefficients(n_qubits, a / std::sqrt(norm_sq));
}

ProbeState phi_family_state(const FamilyCoefficients& coeffs) {
  const int n = coeffs.n_qubits();
  Eigen::VectorXcd v(Eigen::Index(1) << n);
  for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
    const int k = std::min<int>(std::popcount(x), n - static_cast<int>(std::popcount(x)));
    v(static_cast<Eigen::Index>(x)) = coeffs.a()(k);
  }
  return ProbeState(n, std::move(v));
}

FamilyOptimum optimize_family(int n_qubits, const NoiseParams& params, int n_restarts,
                              std::uint64_t seed, const FamilyOptions& opts) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::domain_error("optimize_family: probe size must be between 1 and 12 qubits");
  if (n_restarts < 1) throw std::domain_error("optimize_family: need at least 1 restart");

  const int n_coeffs = n_qubits / 2 + 1;
  const auto ghz_max = golden_section_maximize(
      [&](double t) { return qfi_ghz_closed(n_qubits, EvolutionSpec(params, t)); },
      1.0 / params.gamma);
  const double log_t0 = std::log(ghz_max.x_opt);

  // Variables: n_coeffs raw family coefficients (renormalized inside) plus
  // log t. Degenerate coefficient vectors and out-of-range times score -inf.
  auto objective = [&](std::span<const double> x) -> double {
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), n_coeffs);
    if (a.cwiseAbs().maxCoeff() < 1e-9) return -std::numeric_limits<double>::infinity();
    const double t = std::exp(x[n_coeffs]);
    if (!(t > 0.0) || !std::isfinite(t)) return -std::numeric_limits<double>::infinity();
    const auto psi = phi_family_state(FamilyCoefficients::normalized(n_qubits, std::move(a)));
    return qfi_of_state(psi, EvolutionSpec(params, t));
  };

  // Restart 0 is the GHZ point itself; the rest are random coefficient
  // vectors around a spread of times.
  std::vector<std::vector<double>> starts(n_restarts, std::vector<double>(n_coeffs + 1, 0.0));
  starts[0][0] = 1.0;
  starts[0][n_coeffs] = log_t0;
  for (int r = 1; r < n_restarts; ++r) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    double max_abs = 0.0;
    for (int k = 0; k < n_coeffs; ++k) {
      starts[r][k] = normal(rng);
      max_abs = std::max(max_abs, std::abs(starts[r][k]));
    }
    if (max_abs < 1e-6) starts[r][0] = 1.0;
    starts[r][n_coeffs] = log_t0 + shift(rng);
  }

  NelderMeadOptions nm;
  nm.max_iterations = opts.max_iterations;
  std::vector<NelderMeadResult> runs(n_restarts);
  parallel_for_each(n_restarts, opts.threads,
                    [&](std::size_t r) { runs[r] = nelder_mead_maximize(objective, starts[r], nm); });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].f_max > runs[best].f_max) best = r;

  Eigen::VectorXd a =
      Eigen::Map<const Eigen::VectorXd>(runs[best].x.data(), n_coeffs);
  auto coeffs = FamilyCoefficients::normalized(n_qubits, std::move(a));
  // The state is defined up to a sign; make the first significant coefficient
  // positive so outputs are canonical.
  for (Eigen::Index k = 0; k < coeffs.a().size(); ++k) {
    if (std::abs(coeffs.a()(k)) > 1e-12) {
      if (coeffs.a()(k) < 0.0)
        coeffs = FamilyCoefficients(n_qubits, -coeffs.a());
      break;
    }
  }

  return FamilyOptimum{coeffs, std::exp(runs[best].x[n_coeffs]), runs[best].f_max,
                       !runs[best].converged};
}

}  // namespace ouspec
