#include "gibbslik/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gibbslik {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("model: beta must be positive and finite");
}
}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::poisson: return "poisson";
    case Family::hard_core: return "hard_core";
    case Family::strauss: return "strauss";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "poisson" || name == "independent") return Family::poisson;
  if (name == "hard_core" || name == "hardcore") return Family::hard_core;
  if (name == "strauss") return Family::strauss;
  throw std::invalid_argument("unknown model family '" + name +
                              "'; supported families: poisson, hard_core, strauss");
}

Model Model::poisson(double beta) {
  check_beta(beta);
  return {Family::poisson, beta, 1.0, 0.0};
}

Model Model::hard_core(double beta, double R) {
  check_beta(beta);
  if (!(R >= 0.0)) throw std::invalid_argument("model: R must be non-negative");
  return {Family::hard_core, beta, 0.0, R};
}

Model Model::strauss(double beta, double gamma, double R) {
  check_beta(beta);
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("model: strauss gamma must lie in [0, 1]");
  if (!(R >= 0.0)) throw std::invalid_argument("model: R must be non-negative");
  return {Family::strauss, beta, gamma, R};
}

std::size_t close_pair_count(const Model& m, std::span<const double> u, const PointPattern& x) {
  std::size_t t = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = x.point(i);
    if (std::equal(p.begin(), p.end(), u.begin(), u.end())) continue;
    if (dist(u, p) <= m.R) ++t;
  }
  return t;
}

std::size_t close_pair_total(const Model& m, const PointPattern& x) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (dist(x.point(i), x.point(j)) <= m.R) ++s;
  return s;
}

double log_cond_intensity(const Model& m, std::span<const double> u, const PointPattern& x) {
  if (u.size() != x.dim() && !x.empty())
    throw std::invalid_argument("cond_intensity: point dimension mismatch");
  switch (m.family) {
    case Family::poisson:
      return std::log(m.beta);
    case Family::hard_core:
      return close_pair_count(m, u, x) == 0 ? std::log(m.beta) : -kInf;
    case Family::strauss: {
      std::size_t t = close_pair_count(m, u, x);
      if (t == 0) return std::log(m.beta);
      if (m.gamma == 0.0) return -kInf;
      return std::log(m.beta) + static_cast<double>(t) * std::log(m.gamma);
    }
  }
  return -kInf;
}

double cond_intensity(const Model& m, std::span<const double> u, const PointPattern& x) {
  double lv = log_cond_intensity(m, u, x);
  return lv == -kInf ? 0.0 : std::exp(lv);
}

double energy(const Model& m, const PointPattern& x) {
  const double n = static_cast<double>(x.size());
  switch (m.family) {
    case Family::poisson:
      return -n * std::log(m.beta);
    case Family::hard_core: {
      auto gap = min_pairwise_distance(x);
      if (gap && *gap <= m.R) return kInf;
      return -n * std::log(m.beta);
    }
    case Family::strauss: {
      std::size_t s = close_pair_total(m, x);
      if (s == 0) return -n * std::log(m.beta);
      if (m.gamma == 0.0) return kInf;
      return -n * std::log(m.beta) - static_cast<double>(s) * std::log(m.gamma);
    }
  }
  return kInf;
}

double log_higher_order_cond_intensity(const Model& m, const PointPattern& u,
                                       const PointPattern& x) {
  if (u.empty()) return 0.0;
  if (has_duplicate_points(u))
    throw std::invalid_argument("higher_order_cond_intensity: duplicate points in u");
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto p = u.point(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      auto q = x.point(j);
      if (std::equal(p.begin(), p.end(), q.begin(), q.end()))
        throw std::invalid_argument("higher_order_cond_intensity: u overlaps the conditioning set");
    }
  }
  PointPattern acc = x;
  double lv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double step = log_cond_intensity(m, u.point(i), acc);
    if (step == -kInf) return -kInf;
    lv += step;
    acc.push_back(u.point(i));
  }
  return lv;
}

double higher_order_cond_intensity(const Model& m, const PointPattern& u, const PointPattern& x) {
  double lv = log_higher_order_cond_intensity(m, u, x);
  return lv == -kInf ? 0.0 : std::exp(lv);
}

double local_stability_bound(const Model& m) { return m.beta; }

std::vector<std::string> free_param_names(const Model& m) {
  if (m.family == Family::strauss) return {"beta", "gamma"};
  return {"beta"};
}

ParamBox free_param_box(const Model& m) {
  ParamBox b;
  b.names = free_param_names(m);
  for (const auto& name : b.names) {
    if (name == "beta") {
      b.value.push_back(m.beta);
      b.lower.push_back(1e-9);
      b.upper.push_back(1e9);
    } else {
      b.value.push_back(m.gamma);
      b.lower.push_back(0.0);
      b.upper.push_back(1.0);
    }
  }
  return b;
}

Model with_free_params(const Model& m, std::span<const double> values) {
  auto names = free_param_names(m);
  if (values.size() != names.size())
    throw std::invalid_argument("with_free_params: value count mismatch");
  Model out = m;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == "beta")
      out.beta = values[i];
    else
      out.gamma = values[i];
  }
  check_beta(out.beta);
  return out;
}

std::vector<double> grad_log_cond_intensity(const Model& m, std::span<const double> u,
                                            const PointPattern& x) {
  double lv = log_cond_intensity(m, u, x);
  if (lv == -kInf)
    throw std::domain_error("grad_log_cond_intensity: undefined where the intensity vanishes");
  std::vector<double> g{1.0 / m.beta};
  if (m.family == Family::strauss) {
    std::size_t t = close_pair_count(m, u, x);
    g.push_back(t == 0 ? 0.0 : static_cast<double>(t) / m.gamma);
  }
  return g;
}

std::vector<double> grad_log_cond_intensity(const Model& m, std::span<const double> u,
                                            const PointPattern& x,
                                            const std::vector<std::string>& params) {
  auto names = free_param_names(m);
  auto full = grad_log_cond_intensity(m, u, x);
  std::vector<double> out;
  for (const auto& p : params) {
    if (p == "R")
      throw std::invalid_argument(
          "grad_log_cond_intensity: R is not a smooth parameter; the intensity is piecewise "
          "constant in the range");
    auto it = std::find(names.begin(), names.end(), p);
    if (it == names.end())
      throw std::invalid_argument("grad_log_cond_intensity: model has no free parameter '" + p +
                                  "'");
    out.push_back(full[static_cast<std::size_t>(it - names.begin())]);
  }
  return out;
}

std::vector<double> grad_cond_intensity(const Model& m, std::span<const double> u,
                                        const PointPattern& x) {
  switch (m.family) {
    case Family::poisson:
      return {1.0};
    case Family::hard_core:
      return {close_pair_count(m, u, x) == 0 ? 1.0 : 0.0};
    case Family::strauss: {
      const double t = static_cast<double>(close_pair_count(m, u, x));
      double gt, gtm1;  // gamma^t and t*gamma^(t-1), continuous limits at 0
      if (m.gamma == 0.0) {
        gt = t == 0.0 ? 1.0 : 0.0;
        gtm1 = t == 1.0 ? 1.0 : 0.0;
      } else {
        gt = std::pow(m.gamma, t);
        gtm1 = t == 0.0 ? 0.0 : t * std::pow(m.gamma, t - 1.0);
      }
      return {gt, m.beta * gtm1};
    }
  }
  return {};
}

Model model_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model json: parse error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("family"))
    throw std::invalid_argument("model json: expected an object with a 'family' field");
  Family f = family_from_name(j.at("family").get<std::string>());
  auto need = [&](const char* key) -> double {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("model json: missing field '") + key + "' for " +
                                  family_name(f));
    if (!j.at(key).is_number())
      throw std::invalid_argument(std::string("model json: field '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  switch (f) {
    case Family::poisson: return Model::poisson(need("beta"));
    case Family::hard_core: return Model::hard_core(need("beta"), need("R"));
    case Family::strauss: return Model::strauss(need("beta"), need("gamma"), need("R"));
  }
  throw std::invalid_argument("model json: unreachable family");
}

Model model_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("model json: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return model_from_json_text(buf.str());
}

std::string model_to_json_text(const Model& m) {
  nlohmann::json j;
  j["family"] = family_name(m.family);
  j["beta"] = m.beta;
  if (m.family == Family::strauss) j["gamma"] = m.gamma;
  if (m.family != Family::poisson) j["R"] = m.R;
  return j.dump();
}

}  // namespace gibbslik
