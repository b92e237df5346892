#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gibbslik/geometry.hpp"
#include "gibbslik/models.hpp"
#include "gibbslik/oracle.hpp"
#include "gibbslik/stats.hpp"

namespace gibbslik {

struct MCMCConfig {
  std::size_t steps = 200000;
  std::size_t burn_in = 20000;
  std::size_t thin = 10;
  std::size_t chains = 1;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
  std::size_t samples_per_chain() const { return (steps - burn_in) / thin; }
};

// Posterior sample bundle. Samples are stored chain-major so batch means can
// respect chain boundaries; hard-core constraints hold for every stored
// state by construction.
struct SampleSet {
  Model model;
  Window window;
  MCMCConfig config;
  std::vector<PointPattern> samples;
  std::size_t per_chain = 0;
  double acceptance_rate = 0.0;
};

// Independent draws from the reference process: counts Poisson(beta * |S|),
// locations uniform.
SampleSet sample_poisson(const Model& m, const Window& w, std::size_t n_samples,
                         std::uint64_t seed);

// Keep every stride-th sample (per chain). Used to decorrelate chains before
// tests that assume independence.
SampleSet thin_independent(const SampleSet& s, std::size_t stride);

// Birth-death Metropolis-Hastings targeting the model on the window. A birth
// proposes a uniform location and accepts with lambda * |S| / (n+1); a death
// removes a uniform point and accepts with n / (lambda' * |S|); a death
// proposed from the empty configuration is a no-op. Draws are keyed by
// (seed, chain, step), so results do not depend on thread scheduling.
SampleSet sample_gibbs(const Model& m, const Window& w, const MCMCConfig& cfg);

// Same dynamics on a finite site space; configurations are bitmasks. Births
// propose a site with probability proportional to its weight and count as
// rejected when the site is already occupied.
struct DiscreteSampleSet {
  Model model;
  MCMCConfig config;
  std::vector<std::uint32_t> samples;
  std::size_t per_chain = 0;
  double acceptance_rate = 0.0;
};

DiscreteSampleSet sample_gibbs_discrete(const DiscreteSpace& sp, const Model& m,
                                        const MCMCConfig& cfg);
DiscreteSampleSet thin_independent(const DiscreteSampleSet& s, std::size_t stride);

// Empirical void probability of box b: fraction of samples with no point in
// b, with a batch-means standard error.
MeanSe estimate_void(const SampleSet& s, const Window& b);

// Monte Carlo estimate of E prod_i (1 - g(x_i)) over the sampled patterns.
// g identically 1 on a box and 0 elsewhere reproduces estimate_void exactly.
MeanSe estimate_generating_functional(const SampleSet& s,
                                      const std::function<double(std::span<const double>)>& g);

struct IntensityEstimate {
  MeanSe global;                 // points per unit measure over the window
  std::size_t resolution = 0;    // cells per axis
  std::vector<MeanSe> cells;     // per-cell intensity, row-major over axes
};

IntensityEstimate estimate_intensity(const SampleSet& s, std::size_t resolution);

// Retention probability implied by the observed void probability of each
// cell: p = -log(void) / (alpha * |B|), with a delta-method standard error.
// Cells whose empirical void hits 0 carry no estimate.
struct RetentionCell {
  Window box;
  double void_estimate = 0.0;
  double p_hat = 0.0;
  double se = 0.0;
  double conjectured = 0.0;  // cell average of lambda(u; empty) / alpha
  std::string status;        // "ok", "void_zero", "void_one"
};

std::vector<RetentionCell> implied_retention(const SampleSet& s, double alpha,
                                             std::size_t resolution);

}  // namespace gibbslik
