#include "ouspec/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ouspec {

ScalarMaxResult golden_section_maximize(const std::function<double(double)>& f, double x_seed,
                                        double rel_tol) {
  if (!std::isfinite(x_seed) || x_seed <= 0.0)
    throw std::invalid_argument("golden_section_maximize: seed must be finite and > 0");

  int n_evals = 0;
  auto eval = [&](double x) {
    ++n_evals;
    const double v = f(x);
    if (std::isnan(v)) throw std::runtime_error("golden_section_maximize: objective returned NaN");
    return v;
  };

  // Find any strictly positive value on the geometric ladder around the seed.
  double xb = x_seed;
  double fb = eval(xb);
  if (!(fb > 0.0)) {
    bool found = false;
    double up = x_seed, down = x_seed;
    for (int k = 0; k < 60 && !found; ++k) {
      up *= 2.0;
      if (double v = eval(up); v > 0.0) {
        xb = up;
        fb = v;
        found = true;
        break;
      }
      down *= 0.5;
      if (double v = eval(down); v > 0.0) {
        xb = down;
        fb = v;
        found = true;
      }
    }
    if (!found)
      throw std::runtime_error(
          "golden_section_maximize: objective is numerically zero over the scanned range");
  }

  // Walk the geometric triple uphill until the middle point dominates.
  double xa = 0.5 * xb, xc = 2.0 * xb;
  double fa = eval(xa), fc = eval(xc);
  int guard = 0;
  while (fc > fb) {
    if (++guard > 200)
      throw std::runtime_error("golden_section_maximize: failed to bracket a maximum");
    xa = xb;
    fa = fb;
    xb = xc;
    fb = fc;
    xc *= 2.0;
    fc = eval(xc);
  }
  while (fa > fb) {
    if (++guard > 200)
      throw std::runtime_error("golden_section_maximize: failed to bracket a maximum");
    xc = xb;
    fc = fb;
    xb = xa;
    fb = fa;
    xa *= 0.5;
    fa = eval(xa);
  }

  ScalarMaxResult result;
  result.bracket_lo = xa;
  result.bracket_hi = xc;
  result.x_opt = xb;
  result.f_opt = fb;

  // Golden-section refinement; only strict improvements move the optimum, so
  // it stays strictly inside (bracket_lo, bracket_hi).
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = xc - invphi * (xc - xa);
  double x2 = xa + invphi * (xc - xa);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 200 && (xc - xa) > rel_tol * 0.5 * (xa + xc); ++it) {
    if (f1 < f2) {
      xa = x1;
      x1 = x2;
      f1 = f2;
      x2 = xa + invphi * (xc - xa);
      f2 = eval(x2);
      if (f2 > result.f_opt) {
        result.f_opt = f2;
        result.x_opt = x2;
      }
    } else {
      xc = x2;
      x2 = x1;
      f2 = f1;
      x1 = xc - invphi * (xc - xa);
      f1 = eval(x1);
      if (f1 > result.f_opt) {
        result.f_opt = f1;
        result.x_opt = x1;
      }
    }
  }
  result.n_evals = n_evals;
  return result;
}

NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0, const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead_maximize: empty start point");

  using Point = std::vector<double>;
  std::vector<Point> vertex(dim + 1, Point(x0.begin(), x0.end()));
  for (std::size_t j = 0; j < dim; ++j) vertex[j + 1][j] += opts.initial_step;

  int n_evals = 0;
  auto eval = [&](const Point& p) {
    ++n_evals;
    const double v = f(p);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };

  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(vertex[i]);

  std::vector<std::size_t> order(dim + 1);
  auto sort_desc = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
  };

  NelderMeadResult result;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    sort_desc();
    const std::size_t best = order[0], worst = order[dim], second_worst = order[dim - 1];

    double f_spread = fv[best] - fv[worst];
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        x_spread = std::max(x_spread, std::abs(vertex[order[i]][j] - vertex[best][j]));
    double x_scale = 0.0;
    for (std::size_t j = 0; j < dim; ++j) x_scale = std::max(x_scale, std::abs(vertex[best][j]));
    if (f_spread <= opts.f_spread_tol * (1.0 + std::abs(fv[best])) &&
        x_spread <= opts.x_spread_tol * (1.0 + x_scale)) {
      result.converged = true;
      break;
    }

    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += vertex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      Point p(dim);
      for (std::size_t j = 0; j < dim; ++j)
        p[j] = centroid[j] + coeff * (centroid[j] - vertex[worst][j]);
      return p;
    };

    Point reflected = blend(1.0);
    const double fr = eval(reflected);
    if (fr > fv[best]) {
      Point expanded = blend(2.0);
      const double fe = eval(expanded);
      if (fe > fr) {
        vertex[worst] = std::move(expanded);
        fv[worst] = fe;
      } else {
        vertex[worst] = std::move(reflected);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr > fv[second_worst]) {
      vertex[worst] = std::move(reflected);
      fv[worst] = fr;
      continue;
    }

    const bool outside = fr > fv[worst];
    Point contracted = blend(outside ? 0.5 : -0.5);
    const double fc = eval(contracted);
    if ((outside && fc >= fr) || (!outside && fc > fv[worst])) {
      vertex[worst] = std::move(contracted);
      fv[worst] = fc;
      continue;
    }

    // Shrink everything toward the best vertex.
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j)
        vertex[i][j] = vertex[best][j] + 0.5 * (vertex[i][j] - vertex[best][j]);
      fv[i] = eval(vertex[i]);
    }
  }

  sort_desc();
  result.x = vertex[order[0]];
  result.f_max = fv[order[0]];
  result.iterations = it;
  result.n_evals = n_evals;
  return result;
}

}  // namespace ouspec
