#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gibbslik {

// log(sum(exp(v))) with max shifting; -inf entries drop out, an empty or
// all -inf input yields -inf.
double log_sum_exp(std::span<const double> v);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batches = 0;
};

// Batch-means standard error for a single correlated sequence. The series is
// cut into n_batches contiguous blocks (trailing remainder points are folded
// into the last block) and se = sd(block means)/sqrt(B).
MeanSe batch_means(std::span<const double> x, std::size_t n_batches = 50);

// Multi-chain variant: x holds the chains back to back, each of length
// chain_len. Batches never straddle a chain boundary; the n_batches budget is
// split as evenly as possible across chains.
MeanSe batch_means_chains(std::span<const double> x, std::size_t chain_len,
                          std::size_t n_batches = 50);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// Chi-square CDF and upper tail for df > 0.
double chi_square_cdf(double x, double df);
double chi_square_sf(double x, double df);

// Quantile by bisection on the CDF; p in (0, 1).
double chi_square_quantile(double p, double df);

struct GofResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::size_t pooled_bins = 0;
};

// Pearson chi-square against expected probabilities. Bins with expected
// count below min_expected are pooled into their right neighbour (the last
// bin pools leftward) before the statistic is formed.
GofResult chi_square_gof(std::span<const std::size_t> observed,
                         std::span<const double> expected_prob,
                         double min_expected = 5.0);

}  // namespace gibbslik
