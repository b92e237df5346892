#include "gibbslik/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gibbslik {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> project(std::span<const double> x, std::span<const double> lo,
                            std::span<const double> hi) {
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  return p;
}

// Gradient components pointing out of the box at an active bound do not
// count towards convergence.
double projected_grad_norm(std::span<const double> x, std::span<const double> g,
                           std::span<const double> lo, std::span<const double> hi) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= lo[i] && gi < 0.0) gi = 0.0;
    if (x[i] >= hi[i] && gi > 0.0) gi = 0.0;
    m = std::max(m, std::abs(gi));
  }
  return m;
}
}  // namespace

double maximize_by_score_root(const std::function<double(double)>& score, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("maximize_by_score_root: empty bracket");
  double s_lo = score(lo);
  if (s_lo <= 0.0) return lo;
  double s_hi = score(hi);
  if (s_hi >= 0.0) return hi;
  for (int i = 0; i < 200 && lo < hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OptimResult maximize_box_bfgs(
    const std::function<double(std::span<const double>, std::vector<double>&)>& fg,
    std::vector<double> x0, std::span<const double> lower, std::span<const double> upper,
    const BfgsOptions& opts) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("maximize_box_bfgs: bound size mismatch");
  std::vector<double> x = project(x0, lower, upper);

  std::vector<double> g(n, 0.0);
  double f = fg(x, g);
  if (f == -kInf)
    throw std::invalid_argument("maximize_box_bfgs: infeasible starting point");

  // Inverse Hessian approximation of the negated objective, so the ascent
  // direction is H * g.
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  OptimResult res;
  res.x = x;
  res.f = f;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter + 1;
    double pg = projected_grad_norm(x, g, lower, upper);
    res.grad_norm = pg;
    if (pg < opts.grad_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i] += H[i * n + j] * g[j];
    double dg = 0.0;
    for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
    if (!(dg > 0.0)) {
      d = g;  // reset to steepest ascent
      for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) H[i * n + j] = 0.0;
    }

    double t = 1.0;
    std::vector<double> xn, gn(n, 0.0);
    double fn = -kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[i];
      trial = project(trial, lower, upper);
      double moved = 0.0;
      double gs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        moved += std::abs(trial[i] - x[i]);
        gs += g[i] * (trial[i] - x[i]);
      }
      if (moved == 0.0) break;
      fn = fg(trial, gn);
      if (fn > f + 1e-4 * gs && fn != -kInf) {
        xn = std::move(trial);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no ascent left at line-search resolution
      break;
    }

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = g[i] - gn[i];  // gradient change of the negated objective
    }
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
    if (sy > 1e-12) {
      double rho = 1.0 / sy;
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      double yHy = 0.0;
      for (std::size_t i = 0; i < n; ++i) yHy += y[i] * Hy[i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          H[i * n + j] += -rho * (s[i] * Hy[j] + Hy[i] * s[j]) +
                          rho * (1.0 + rho * yHy) * s[i] * s[j];
    }

    double improvement = fn - f;
    x = std::move(xn);
    g = gn;
    f = fn;
    res.x = x;
    res.f = f;
    if (improvement < opts.f_tol) {
      res.converged = true;
      res.grad_norm = projected_grad_norm(x, g, lower, upper);
      break;
    }
  }
  res.x = x;
  res.f = f;
  return res;
}

OptimResult maximize_box_bfgs_fd(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x0, std::span<const double> lower,
                                 std::span<const double> upper, double fd_step,
                                 const BfgsOptions& opts) {
  auto fg = [&](std::span<const double> x, std::vector<double>& grad) {
    double v = f(x);
    if (v == -kInf) return v;
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      double h = fd_step * std::max(1.0, std::abs(p[i]));
      double lo = std::max(p[i] - h, lower[i]);
      double hi = std::min(p[i] + h, upper[i]);
      double save = p[i];
      p[i] = hi;
      double fp = f(p);
      p[i] = lo;
      double fm = f(p);
      p[i] = save;
      grad[i] = (hi > lo) ? (fp - fm) / (hi - lo) : 0.0;
    }
    return v;
  };
  return maximize_box_bfgs(fg, std::move(x0), lower, upper, opts);
}

}  // namespace gibbslik
