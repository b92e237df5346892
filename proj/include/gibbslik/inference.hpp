#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gibbslik/geometry.hpp"
#include "gibbslik/models.hpp"
#include "gibbslik/oracle.hpp"
#include "gibbslik/simulate.hpp"

namespace gibbslik {

enum class VoidMode { conjecture, monte_carlo, exact_discrete };

std::string void_mode_name(VoidMode m);
VoidMode void_mode_from_name(const std::string& name);

struct LogVoid {
  double value = 0.0;
  double se = 0.0;  // zero for closed forms
  VoidMode mode = VoidMode::conjecture;
};

// Raised when no sample in a Monte Carlo set leaves the region empty, so the
// empirical void probability is 0 and its log undefined.
class ZeroVoidEstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source of the empty-space probability entering the likelihood. The
// conjectured closed form needs nothing; the Monte Carlo mode carries a
// sample set generated under the same model; the exact mode carries an
// enumeration. Estimation failures (empty sample set, zero empirical void)
// raise instead of silently falling back.
class VoidProvider {
 public:
  static VoidProvider conjecture();
  static VoidProvider monte_carlo(SampleSet samples);
  static VoidProvider exact_discrete(ExactSummary summary);

  VoidMode mode() const { return mode_; }
  LogVoid log_void(const Model& m, const QuadratureScheme& q) const;

 private:
  explicit VoidProvider(VoidMode mode) : mode_(mode) {}
  VoidMode mode_;
  std::shared_ptr<const SampleSet> mc_;
  std::shared_ptr<const ExactSummary> exact_;
};

// Conjectured void probability of box b (the whole window by default):
// exp of minus the integral of lambda(u; empty) over b, evaluated on the
// quadrature nodes falling inside b.
double conjectured_log_void(const Model& m, const QuadratureScheme& q);
double conjectured_log_void(const Model& m, const QuadratureScheme& q, const Window& b);
double conjectured_void(const Model& m, const QuadratureScheme& q);
double conjectured_void(const Model& m, const QuadratureScheme& q, const Window& b);

// Under the conjecture the normalizing constant obeys
// log Z = integral of lambda(u; empty) du.
double conjectured_log_partition(const Model& m, const QuadratureScheme& q);

// Sequential log likelihood: sum of log lambda(x_i; x_1..x_{i-1}) plus the
// provider's log void. -infinity when the data term hits a zero intensity;
// the stored point order does not change the value.
double exact_log_likelihood(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                            const VoidProvider& provider = VoidProvider::conjecture());

// Besag pseudo log likelihood: leave-one-out log intensities minus the
// integral of lambda(u; x) du.
double pseudo_log_likelihood(const Model& m, const PointPattern& x, const QuadratureScheme& q);

// Gradient of the conjectured exact log likelihood in the free parameters.
std::vector<double> score(const Model& m, const PointPattern& x, const QuadratureScheme& q);
std::vector<double> pseudo_score(const Model& m, const PointPattern& x,
                                 const QuadratureScheme& q);

enum class FitObjective { exact, pseudo };

struct FitOptions {
  FitObjective objective = FitObjective::exact;
  VoidMode void_mode = VoidMode::conjecture;
  std::uint64_t seed = 1;
  MCMCConfig mc;                          // per-evaluation sampler settings (monte carlo void)
  const DiscreteSpace* oracle_space = nullptr;  // required for the exact-enumeration void
  std::size_t max_iterations = 200;
};

struct FitResult {
  Model model;  // fitted parameters, fixed ones included
  std::vector<std::string> free_names;
  std::vector<double> theta_hat;
  std::string objective;  // "exact" or "pseudo"
  double log_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::pair<std::string, double>> fixed_parameters;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  VoidMode void_mode = VoidMode::conjecture;
};

// Maximum likelihood / pseudolikelihood fit. The interaction range is never
// optimized: it is pinned just below the smallest observed gap and reported
// under fixed_parameters. An empty pattern with the exact objective sits at
// the lower beta bound, flagged with a warning.
FitResult mle_fit(Family family, const PointPattern& x, const QuadratureScheme& q,
                  const FitOptions& opts = {});

// Telescoped likelihood ratio of two parameter sets. Finite whenever at
// least one side is feasible; exactly antisymmetric under swapping; empty
// when both data terms are -infinity (the ratio is indeterminate).
std::optional<double> log_likelihood_ratio(const Model& m1, const Model& m2,
                                           const PointPattern& x, const QuadratureScheme& q);

using LogPrior = std::function<double(std::span<const double>)>;

// Conjectured log likelihood plus log prior over the free parameters.
double log_posterior_unnorm(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                            const LogPrior& log_prior);

struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 0;
};

// Posterior tabulated on a rectangular grid over one or two free parameters
// with trapezoid normalization; cell_probability sums to one by
// construction.
struct PosteriorGrid {
  std::vector<GridAxis> axes;
  std::vector<double> log_unnorm;         // row-major over axes
  std::vector<double> density;            // normalized
  std::vector<double> cell_probability;   // density times trapezoid weight
  double log_evidence = 0.0;
};

PosteriorGrid posterior_grid(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                             const LogPrior& log_prior, const std::vector<GridAxis>& axes);

}  // namespace gibbslik
