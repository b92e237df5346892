#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gibbslik {

// Axis-aligned box in d dimensions, d >= 1. All observation windows are
// boxes; the dimension is carried by the data, not baked in anywhere.
struct Window {
  std::vector<double> lower;
  std::vector<double> upper;

  Window() = default;
  Window(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  double measure() const;
  bool contains(std::span<const double> p) const;
};

double window_measure(const Window& w);

// Finite simple point configuration: flat coordinate storage, one point per
// dim-sized block. The stored order is meaningful for sequential evaluation;
// distribution-level quantities must not depend on it.
class PointPattern {
 public:
  explicit PointPattern(std::size_t dim = 2) : dim_(dim) {}
  PointPattern(std::vector<double> flat, std::size_t dim);

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  void push_back(std::span<const double> p);
  void remove(std::size_t i);
  const std::vector<double>& data() const { return coords_; }
  bool empty() const { return coords_.empty(); }

 private:
  std::vector<double> coords_;
  std::size_t dim_;
};

double dist(std::span<const double> a, std::span<const double> b);

// Smallest inter-point distance; empty for configurations with fewer than
// two points.
std::optional<double> min_pairwise_distance(const PointPattern& x);

bool has_duplicate_points(const PointPattern& x);

// Midpoint-rule nodes on a resolution^d grid over the window. Every node
// carries the same weight measure/resolution^d, so the weights sum to the
// window measure by construction.
struct QuadratureScheme {
  Window window;
  std::size_t resolution = 0;
  std::vector<double> nodes;    // flat, same layout as PointPattern
  std::vector<double> weights;  // one per node

  std::size_t dim() const { return window.dim(); }
  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * dim(), dim()};
  }
};

QuadratureScheme build_quadrature(const Window& w, std::size_t resolution_per_axis);

// CSV exchange format: one point per line, coordinates comma separated,
// optional single header line. write_pattern emits round-trip-exact decimal.
// Duplicate points are rejected; points outside the window are an error when
// strict, otherwise dropped (count reported through dropped if non-null).
PointPattern read_pattern(const std::string& path, const Window& w, bool strict = true,
                          std::size_t* dropped = nullptr);
void write_pattern(const std::string& path, const PointPattern& x);

PointPattern parse_pattern_csv(const std::string& text, std::size_t dim);
std::string format_pattern_csv(const PointPattern& x);

}  // namespace gibbslik
