#pragma once

#include <span>
#include <string>
#include <vector>

#include "gibbslik/geometry.hpp"

namespace gibbslik {

enum class Family { poisson, hard_core, strauss };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Locally stable interaction model. All shipped families are repulsive, so
// the conditional intensity is bounded by beta everywhere.
struct Model {
  Family family = Family::poisson;
  double beta = 1.0;
  double gamma = 1.0;  // strauss interaction in [0, 1]
  double R = 0.0;      // interaction range, never optimized

  static Model poisson(double beta);
  static Model hard_core(double beta, double R);
  static Model strauss(double beta, double gamma, double R);
};

// Points of x at distance <= R from u, not counting u itself. Membership of
// u in x is decided by exact coordinate equality.
std::size_t close_pair_count(const Model& m, std::span<const double> u, const PointPattern& x);

// Number of unordered pairs in x at distance <= R.
std::size_t close_pair_total(const Model& m, const PointPattern& x);

// Papangelou conditional intensity lambda(u; x). When u already belongs to x
// the remaining points are conditioned on, so lambda(u; x) always means
// "given the configuration without u".
double cond_intensity(const Model& m, std::span<const double> u, const PointPattern& x);
double log_cond_intensity(const Model& m, std::span<const double> u, const PointPattern& x);

// Total potential with the empty-configuration convention E(empty) = 0.
// Infinite for configurations the model forbids.
double energy(const Model& m, const PointPattern& x);

// n-point conditional intensity: telescoping product of one-point intensities
// of the points of u added one at a time on top of x. Equals 1 for empty u.
// The value does not depend on the order of u. Duplicate points in u, or
// points of u already present in x, are rejected.
double higher_order_cond_intensity(const Model& m, const PointPattern& u, const PointPattern& x);
double log_higher_order_cond_intensity(const Model& m, const PointPattern& u,
                                       const PointPattern& x);

// Uniform bound alpha with lambda(u; x) <= alpha for all u, x.
double local_stability_bound(const Model& m);

// Names of the continuously varying parameters, in gradient order.
std::vector<std::string> free_param_names(const Model& m);

struct ParamBox {
  std::vector<std::string> names;
  std::vector<double> value;
  std::vector<double> lower;
  std::vector<double> upper;
};

ParamBox free_param_box(const Model& m);
Model with_free_params(const Model& m, std::span<const double> values);

// Gradient of log lambda(u; x) with respect to the free parameters.
// Undefined where lambda vanishes (throws). The range parameter R is not a
// smooth coordinate; asking for it is an error.
std::vector<double> grad_log_cond_intensity(const Model& m, std::span<const double> u,
                                            const PointPattern& x);
std::vector<double> grad_log_cond_intensity(const Model& m, std::span<const double> u,
                                            const PointPattern& x,
                                            const std::vector<std::string>& params);

// Gradient of lambda itself; finite everywhere, also where lambda = 0.
std::vector<double> grad_cond_intensity(const Model& m, std::span<const double> u,
                                        const PointPattern& x);

Model model_from_json_text(const std::string& text);
Model model_from_json_file(const std::string& path);
std::string model_to_json_text(const Model& m);

}  // namespace gibbslik
