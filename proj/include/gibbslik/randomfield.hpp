#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gibbslik/geometry.hpp"
#include "gibbslik/inference.hpp"

namespace gibbslik {

// Rectangular site graph with 4-neighbour adjacency (Euclidean distance one
// on the integer grid). Sites are kept in canonical row-major order, which
// pins down every order-sensitive sum; free boundary unless torus is set.
struct Lattice {
  std::size_t width = 0;
  std::size_t height = 0;
  bool torus = false;
  std::vector<std::vector<std::size_t>> neighbours;  // sorted site indices

  static Lattice grid(std::size_t width, std::size_t height, bool torus = false);

  std::size_t size() const { return width * height; }
  std::size_t edge_count() const;
  std::size_t site_index(std::size_t col, std::size_t row) const { return row * width + col; }
  // Site coordinates: (column, row).
  double site_x(std::size_t i) const { return static_cast<double>(i % width); }
  double site_y(std::size_t i) const { return static_cast<double>(i / width); }
};

// 0/1 occupancy per site, row-major.
using BinaryField = std::vector<std::uint8_t>;

struct IsingParams {
  double theta1 = 0.0;  // external field
  double theta2 = 0.0;  // pair interaction
};

// Total potential in spin units s = 2x - 1:
// theta1 * sum_i s_i + theta2 * sum over adjacent pairs of s_i s_j.
double ising_potential_sum(const Lattice& l, const BinaryField& f, const IsingParams& th);

// P(x_i = 1 | rest) = sigmoid(theta1 + theta2 * sum of neighbour spins).
// Overflow-safe for any magnitude of the arguments.
double local_characteristic(const Lattice& l, const BinaryField& f, const IsingParams& th,
                            std::size_t site);

// Occupied sites as a point pattern ((column, row) coordinates, canonical
// order) and back. The two maps are mutually inverse; patterns must consist
// of distinct lattice coordinates.
PointPattern field_to_pattern(const Lattice& l, const BinaryField& f);
BinaryField pattern_to_field(const Lattice& l, const PointPattern& x);

// Conditional intensity of occupying `site` given a partial configuration:
// sites outside the conditioning set count as empty (spin -1). On the empty
// configuration this is sigmoid(theta1 - theta2 * degree(site)).
double field_cond_intensity(const Lattice& l, const IsingParams& th, std::size_t site,
                            const BinaryField& conditioning);

// Sequential approximation: occupied sites enter in canonical order, each
// conditioned on the previously entered ones, minus the sum of
// empty-configuration intensities over all sites.
double field_conjectured_log_likelihood(const Lattice& l, const BinaryField& f,
                                        const IsingParams& th);

// Exact log probability by enumerating all 2^k fields. The joint puts mass
// proportional to exp(potential / 2), which is the normalization under which
// the local characteristics above are the model's true conditionals.
double field_exact_log_likelihood(const Lattice& l, const BinaryField& f, const IsingParams& th);

// All 2^k field probabilities, indexed by bitmask (bit i = site i).
std::vector<double> field_distribution(const Lattice& l, const IsingParams& th);

double field_exact_log_partition(const Lattice& l, const IsingParams& th);

// Sum of log local characteristics of the observed values.
double field_pseudo_log_likelihood(const Lattice& l, const BinaryField& f, const IsingParams& th);

enum class FieldObjective { exact, conjectured, pseudo };

FieldObjective field_objective_from_name(const std::string& name);
std::string field_objective_name(FieldObjective o);

struct FieldFitResult {
  IsingParams theta_hat;
  std::string objective;
  double log_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Two-parameter fit by box-constrained quasi-Newton ascent with central
// finite-difference gradients.
FieldFitResult field_fit(const Lattice& l, const BinaryField& f, FieldObjective objective,
                         std::size_t max_iterations = 200);

struct FieldSimConfig {
  std::size_t sweeps = 2000;
  std::size_t burn_in = 200;
  std::size_t thin = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

// Systematic-scan heat bath: one sweep resamples every site in canonical
// order from its local characteristic. Draws are keyed by (seed, sweep).
std::vector<BinaryField> gibbs_sample_field(const Lattice& l, const IsingParams& th,
                                            const FieldSimConfig& cfg);

// Grid CSV (height rows of width 0/1 cells) or flat single-column form under
// a "width,height" header.
BinaryField read_field(const std::string& path, std::size_t& width, std::size_t& height);
BinaryField parse_field_csv(const std::string& text, std::size_t& width, std::size_t& height);
std::string format_field_csv(const Lattice& l, const BinaryField& f);
void write_field(const std::string& path, const Lattice& l, const BinaryField& f);

// Conjecture diagnostics on a lattice model, mirroring the discrete-space
// report: exact versus conjectured void and partition values plus the
// theta2 = 0 independence identity.
struct FieldConjectureReport {
  IsingParams theta;
  std::size_t k = 0;
  std::vector<ReportEntry> entries;
};

FieldConjectureReport field_conjecture_report(const Lattice& l, const IsingParams& th);

}  // namespace gibbslik
