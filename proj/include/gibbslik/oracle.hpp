#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbslik/geometry.hpp"
#include "gibbslik/models.hpp"

namespace gibbslik {

// Hard cap on exhaustive enumeration: 2^24 subsets is the largest state
// space the oracle will walk.
inline constexpr std::size_t kMaxEnumerationSites = 24;

struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite carrier for brute-force ground truth: k sites with a symmetric
// distance table and a reference measure (site weights; counting measure by
// default). Configurations are subsets encoded as bitmasks, bit i = site i.
struct DiscreteSpace {
  std::size_t dim = 2;
  std::vector<double> coords;               // k sites, flat
  std::vector<double> weight;               // per-site measure
  std::vector<std::vector<double>> distance;  // k x k, symmetric, zero diagonal

  static DiscreteSpace from_sites(const PointPattern& sites, std::vector<double> weights = {});
  static DiscreteSpace grid(std::size_t width, std::size_t height, double spacing = 1.0);

  std::size_t size() const { return weight.size(); }
  double total_weight() const;
  std::span<const double> site(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

// Model interaction neighbourhood as bitmasks: bit j of mask i set iff
// distance(i, j) <= R and i != j.
std::vector<std::uint32_t> neighbour_masks(const DiscreteSpace& s, const Model& m);

// Conditional intensity of adding site j to the subset `mask` (j not in
// mask), using the interaction counts induced by the distance table.
double log_site_cond_intensity(const Model& m, std::size_t j, std::uint32_t mask,
                               const std::vector<std::uint32_t>& nbr);

// Exhaustive summary of the unnormalized weights w(A) = lambda_n(A; empty) *
// prod_{s in A} weight_s over all 2^k subsets.
struct ExactSummary {
  Model model;
  std::size_t k = 0;
  std::vector<double> log_weight;   // indexed by bitmask; -inf for forbidden
  double log_normalizer = 0.0;      // log sum_A w(A)
  double log_void = 0.0;            // log of P(empty) = -log_normalizer
  std::vector<double> probability;  // normalized, sums to one

  double log_probability(std::uint32_t mask) const { return log_weight[mask] - log_normalizer; }
};

ExactSummary enumerate_exact(const DiscreteSpace& s, const Model& m);

// Subset bitmask for a pattern whose points must each match a site exactly.
std::uint32_t mask_from_pattern(const DiscreteSpace& s, const PointPattern& x);
PointPattern pattern_from_mask(const DiscreteSpace& s, std::uint32_t mask);

// log P(X = A) from the enumeration.
double exact_log_likelihood_discrete(const ExactSummary& e, std::uint32_t mask);
double exact_log_likelihood_discrete(const DiscreteSpace& s, const Model& m,
                                     const PointPattern& x);

// P(X and T = sigma) for a site subset T: marginal over everything else.
double marginal_probability(const ExactSummary& e, std::uint32_t subset_mask,
                            std::uint32_t occupied_mask);

// Conjectured closed forms on the discrete carrier. The empty-configuration
// intensity is beta at every site, so the conjectured log void probability is
// -beta * total_weight.
double conjectured_log_void_discrete(const DiscreteSpace& s, const Model& m);
double conjectured_log_partition_discrete(const DiscreteSpace& s, const Model& m);
double conjectured_log_likelihood_discrete(const DiscreteSpace& s, const Model& m,
                                           std::uint32_t mask);

struct ReportEntry {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

// Side-by-side comparison of enumerated truth and the conjectured closed
// forms on one discrete space. Every entry records where its number came
// from. The likelihood-error entries scan all feasible subsets; the argmax
// entries compare profile fits of beta on a grid against the exact argmax for
// the same data subset (the mode of the exact distribution).
struct ConjectureReport {
  Model model;
  std::size_t k = 0;
  std::vector<ReportEntry> entries;
  std::uint32_t argmax_data_mask = 0;
};

struct ConjectureReportOptions {
  double beta_lo = 0.0;   // 0 -> 0.2 * model beta
  double beta_hi = 0.0;   // 0 -> 2.0 * model beta
  std::size_t beta_grid = 401;
};

ConjectureReport conjecture_report(const DiscreteSpace& s, const Model& m,
                                   const ConjectureReportOptions& opts = {});

}  // namespace gibbslik
