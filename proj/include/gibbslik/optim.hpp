#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gibbslik {

struct OptimResult {
  std::vector<double> x;
  double f = 0.0;  // objective value at x (maximization convention)
  std::size_t iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

// Locates the zero of a decreasing score function on [lo, hi] by bisection,
// which pins the argmax of a concave scalar objective to machine precision.
// A score that never changes sign puts the optimum on the matching bound.
double maximize_by_score_root(const std::function<double(double)>& score, double lo, double hi);

struct BfgsOptions {
  std::size_t max_iterations = 200;
  double grad_tol = 1e-8;   // projected gradient infinity norm
  double f_tol = 1e-12;     // objective improvement
};

// Box-constrained BFGS ascent with backtracking line search along the
// projected ray. fg evaluates the objective at x and fills grad (same
// length); -inf marks an infeasible point and rejects the step.
OptimResult maximize_box_bfgs(
    const std::function<double(std::span<const double>, std::vector<double>&)>& fg,
    std::vector<double> x0, std::span<const double> lower, std::span<const double> upper,
    const BfgsOptions& opts = {});

// Same interface with a central finite-difference gradient built from a
// plain objective.
OptimResult maximize_box_bfgs_fd(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x0, std::span<const double> lower,
                                 std::span<const double> upper, double fd_step = 1e-6,
                                 const BfgsOptions& opts = {});

}  // namespace gibbslik
