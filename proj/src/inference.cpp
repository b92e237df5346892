#include "gibbslik/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gibbslik/optim.hpp"
#include "gibbslik/rng.hpp"

namespace gibbslik {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_model(const Model& a, const Model& b) {
  if (a.family != b.family || a.beta != b.beta) return false;
  if (a.family == Family::poisson) return true;
  if (a.R != b.R) return false;
  return a.family != Family::strauss || a.gamma == b.gamma;
}
}  // namespace

std::string void_mode_name(VoidMode m) {
  switch (m) {
    case VoidMode::conjecture: return "conjecture";
    case VoidMode::monte_carlo: return "mc";
    case VoidMode::exact_discrete: return "oracle";
  }
  return "?";
}

VoidMode void_mode_from_name(const std::string& name) {
  if (name == "conjecture") return VoidMode::conjecture;
  if (name == "mc" || name == "monte_carlo") return VoidMode::monte_carlo;
  if (name == "oracle" || name == "exact" || name == "exact_discrete")
    return VoidMode::exact_discrete;
  throw std::invalid_argument("unknown void mode '" + name +
                              "'; supported: conjecture, mc, oracle");
}

VoidProvider VoidProvider::conjecture() { return VoidProvider(VoidMode::conjecture); }

VoidProvider VoidProvider::monte_carlo(SampleSet samples) {
  VoidProvider p(VoidMode::monte_carlo);
  p.mc_ = std::make_shared<const SampleSet>(std::move(samples));
  return p;
}

VoidProvider VoidProvider::exact_discrete(ExactSummary summary) {
  VoidProvider p(VoidMode::exact_discrete);
  p.exact_ = std::make_shared<const ExactSummary>(std::move(summary));
  return p;
}

LogVoid VoidProvider::log_void(const Model& m, const QuadratureScheme& q) const {
  switch (mode_) {
    case VoidMode::conjecture:
      return {conjectured_log_void(m, q), 0.0, mode_};
    case VoidMode::monte_carlo: {
      if (!mc_ || mc_->samples.empty())
        throw std::runtime_error("void provider: monte carlo mode has no samples");
      if (!same_model(mc_->model, m))
        throw std::invalid_argument(
            "void provider: sample set was generated under a different model");
      MeanSe v = estimate_void(*mc_, q.window);
      if (!(v.mean > 0.0))
        throw ZeroVoidEstimateError(
            "void provider: empirical void probability is zero, its log is undefined; "
            "increase the sample budget");
      return {std::log(v.mean), v.se / v.mean, mode_};
    }
    case VoidMode::exact_discrete: {
      if (!exact_) throw std::runtime_error("void provider: exact mode has no enumeration");
      if (!same_model(exact_->model, m))
        throw std::invalid_argument(
            "void provider: enumeration was computed under a different model");
      return {exact_->log_void, 0.0, mode_};
    }
  }
  throw std::logic_error("void provider: unreachable mode");
}

double conjectured_log_void(const Model& m, const QuadratureScheme& q) {
  PointPattern empty(q.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    acc += q.weights[i] * cond_intensity(m, q.node(i), empty);
  return -acc;
}

double conjectured_log_void(const Model& m, const QuadratureScheme& q, const Window& b) {
  PointPattern empty(q.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (b.contains(q.node(i))) acc += q.weights[i] * cond_intensity(m, q.node(i), empty);
  return -acc;
}

double conjectured_void(const Model& m, const QuadratureScheme& q) {
  return std::exp(conjectured_log_void(m, q));
}

double conjectured_void(const Model& m, const QuadratureScheme& q, const Window& b) {
  return std::exp(conjectured_log_void(m, q, b));
}

double conjectured_log_partition(const Model& m, const QuadratureScheme& q) {
  return -conjectured_log_void(m, q);
}

namespace {

// Sequential data term; -inf as soon as an intensity vanishes.
double sequential_log_intensity_sum(const Model& m, const PointPattern& x) {
  PointPattern acc(x.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lv = log_cond_intensity(m, x.point(i), acc);
    if (lv == -kInf) return -kInf;
    sum += lv;
    acc.push_back(x.point(i));
  }
  return sum;
}

double integral_cond_intensity(const Model& m, const QuadratureScheme& q,
                               const PointPattern& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    acc += q.weights[i] * cond_intensity(m, q.node(i), x);
  return acc;
}

}  // namespace

double exact_log_likelihood(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                            const VoidProvider& provider) {
  double data = sequential_log_intensity_sum(m, x);
  if (data == -kInf) return -kInf;
  return data + provider.log_void(m, q).value;
}

double pseudo_log_likelihood(const Model& m, const PointPattern& x, const QuadratureScheme& q) {
  double data = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lv = log_cond_intensity(m, x.point(i), x);
    if (lv == -kInf) return -kInf;
    data += lv;
  }
  return data - integral_cond_intensity(m, q, x);
}

std::vector<double> score(const Model& m, const PointPattern& x, const QuadratureScheme& q) {
  const std::size_t p = free_param_names(m).size();
  std::vector<double> g(p, 0.0);
  PointPattern acc(x.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto gi = grad_log_cond_intensity(m, x.point(i), acc);
    for (std::size_t k = 0; k < p; ++k) g[k] += gi[k];
    acc.push_back(x.point(i));
  }
  PointPattern empty(x.dim());
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto gi = grad_cond_intensity(m, q.node(i), empty);
    for (std::size_t k = 0; k < p; ++k) g[k] -= q.weights[i] * gi[k];
  }
  return g;
}

std::vector<double> pseudo_score(const Model& m, const PointPattern& x,
                                 const QuadratureScheme& q) {
  const std::size_t p = free_param_names(m).size();
  std::vector<double> g(p, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto gi = grad_log_cond_intensity(m, x.point(i), x);
    for (std::size_t k = 0; k < p; ++k) g[k] += gi[k];
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto gi = grad_cond_intensity(m, q.node(i), x);
    for (std::size_t k = 0; k < p; ++k) g[k] -= q.weights[i] * gi[k];
  }
  return g;
}

namespace {

Model template_model(Family family, const PointPattern& x, const QuadratureScheme& q,
                     std::vector<std::pair<std::string, double>>& fixed,
                     std::vector<std::string>& warnings) {
  double beta0 = std::max(static_cast<double>(x.size()) / q.window.measure(), 1e-6);
  if (family == Family::poisson) return Model::poisson(beta0);
  double r_hat = 0.0;
  if (auto gap = min_pairwise_distance(x)) {
    r_hat = *gap * (1.0 - 1e-9);
  } else {
    warnings.push_back("fewer than two points: interaction range fixed at zero");
  }
  fixed.emplace_back("R", r_hat);
  if (family == Family::hard_core) return Model::hard_core(beta0, r_hat);
  return Model::strauss(beta0, 0.5, r_hat);
}

struct ObjectiveEval {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;  // may be empty
};

}  // namespace

FitResult mle_fit(Family family, const PointPattern& x, const QuadratureScheme& q,
                  const FitOptions& opts) {
  if (has_duplicate_points(x)) throw std::invalid_argument("mle_fit: pattern has duplicate points");
  if (opts.void_mode == VoidMode::exact_discrete && opts.oracle_space == nullptr)
    throw std::invalid_argument("mle_fit: the oracle void mode needs a discrete space");

  FitResult res;
  res.objective = opts.objective == FitObjective::exact ? "exact" : "pseudo";
  res.seed = opts.seed;
  res.void_mode = opts.void_mode;
  Model tmpl = template_model(family, x, q, res.fixed_parameters, res.warnings);
  res.free_names = free_param_names(tmpl);
  ParamBox box = free_param_box(tmpl);
  const double n = static_cast<double>(x.size());
  box.upper[0] = std::max(100.0, 10.0 * (n + 1.0) / q.window.measure());

  // Stochastic and enumerated void estimates are rebuilt per evaluation so
  // the objective always matches the candidate parameters; evaluation seeds
  // derive from (seed, eval index) for reproducibility.
  std::size_t eval_counter = 0;
  auto provider_for = [&](const Model& m) -> VoidProvider {
    switch (opts.void_mode) {
      case VoidMode::conjecture:
        return VoidProvider::conjecture();
      case VoidMode::monte_carlo: {
        MCMCConfig mc = opts.mc;
        mc.seed = mix64(opts.seed ^ mix64(eval_counter++));
        return VoidProvider::monte_carlo(sample_gibbs(m, q.window, mc));
      }
      case VoidMode::exact_discrete:
        return VoidProvider::exact_discrete(enumerate_exact(*opts.oracle_space, m));
    }
    throw std::logic_error("mle_fit: unreachable void mode");
  };

  const bool exact = opts.objective == FitObjective::exact;
  auto objective = [&](std::span<const double> theta) -> double {
    Model m = with_free_params(tmpl, theta);
    if (!exact) return pseudo_log_likelihood(m, x, q);
    try {
      return exact_log_likelihood(m, x, q, provider_for(m));
    } catch (const ZeroVoidEstimateError&) {
      // The sampled void never came up empty: the estimated likelihood is 0,
      // which the optimizer treats as an infeasible probe and backs off.
      return -kInf;
    }
  };
  const bool smooth = opts.void_mode == VoidMode::conjecture;
  auto gradient = [&](std::span<const double> theta) {
    Model m = with_free_params(tmpl, theta);
    return exact ? score(m, x, q) : pseudo_score(m, x, q);
  };

  // Empty data with a likelihood objective: the data term vanishes and the
  // objective decreases in beta, so the optimum sits on the lower bound.
  if (x.size() == 0 && exact && smooth) {
    std::vector<double> theta = box.value;
    theta[0] = box.lower[0];
    res.warnings.push_back("empty pattern: beta pinned at its lower bound");
    res.model = with_free_params(tmpl, theta);
    res.theta_hat = theta;
    res.log_objective = objective(theta);
    res.converged = true;
    res.iterations = 0;
    return res;
  }

  if (res.free_names.size() == 1 && smooth) {
    std::size_t evals = 0;
    auto score1 = [&](double b) {
      ++evals;
      double t[1] = {b};
      return gradient(t)[0];
    };
    double beta_hat = maximize_by_score_root(score1, box.lower[0], box.upper[0]);
    res.theta_hat = {beta_hat};
    res.model = with_free_params(tmpl, res.theta_hat);
    res.log_objective = objective(res.theta_hat);
    res.iterations = evals;
    res.converged = true;
    if (beta_hat == box.lower[0] || beta_hat == box.upper[0])
      res.warnings.push_back("optimum sits on a parameter bound");
    return res;
  }

  BfgsOptions bo;
  bo.max_iterations = opts.max_iterations;
  OptimResult opt;
  if (smooth) {
    auto fg = [&](std::span<const double> theta, std::vector<double>& grad) {
      double v = objective(theta);
      if (v == -kInf) return v;
      grad = gradient(theta);
      return v;
    };
    opt = maximize_box_bfgs(fg, box.value, box.lower, box.upper, bo);
  } else {
    opt = maximize_box_bfgs_fd(objective, box.value, box.lower, box.upper, 1e-6, bo);
    res.warnings.push_back(
        "void probabilities are re-estimated per evaluation; the objective is not smooth");
  }
  res.theta_hat = opt.x;
  res.model = with_free_params(tmpl, opt.x);
  res.log_objective = opt.f;
  res.iterations = opt.iterations;
  res.converged = opt.converged;
  return res;
}

std::optional<double> log_likelihood_ratio(const Model& m1, const Model& m2,
                                           const PointPattern& x, const QuadratureScheme& q) {
  double t1 = sequential_log_intensity_sum(m1, x);
  double t2 = sequential_log_intensity_sum(m2, x);
  if (t1 == -kInf && t2 == -kInf) return std::nullopt;
  if (t1 == -kInf) return -kInf;
  if (t2 == -kInf) return kInf;
  double z1 = conjectured_log_partition(m1, q);
  double z2 = conjectured_log_partition(m2, q);
  return (t1 - t2) - (z1 - z2);
}

double log_posterior_unnorm(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                            const LogPrior& log_prior) {
  ParamBox box = free_param_box(m);
  double lp = log_prior(box.value);
  if (lp == -kInf) return -kInf;
  double ll = exact_log_likelihood(m, x, q);
  return ll == -kInf ? -kInf : ll + lp;
}

namespace {

// Per-model sufficient statistics make dense posterior grids cheap: the data
// term only needs the point count and the R-close pair count, and the
// conjectured void only needs the total quadrature weight.
struct GridStats {
  double n = 0.0;
  double pairs = 0.0;
  bool feasible = true;  // hard-core constraint at the fixed range
  double total_weight = 0.0;
};

double grid_log_likelihood(const Model& m, const GridStats& st) {
  double data;
  switch (m.family) {
    case Family::poisson:
      data = st.n * std::log(m.beta);
      break;
    case Family::hard_core:
      if (!st.feasible) return -kInf;
      data = st.n * std::log(m.beta);
      break;
    case Family::strauss:
      if (st.pairs == 0.0) {
        data = st.n * std::log(m.beta);
      } else if (m.gamma == 0.0) {
        return -kInf;
      } else {
        data = st.n * std::log(m.beta) + st.pairs * std::log(m.gamma);
      }
      break;
    default:
      return -kInf;
  }
  return data - m.beta * st.total_weight;
}

}  // namespace

PosteriorGrid posterior_grid(const Model& m, const PointPattern& x, const QuadratureScheme& q,
                             const LogPrior& log_prior, const std::vector<GridAxis>& axes) {
  if (axes.empty() || axes.size() > 2)
    throw std::invalid_argument("posterior_grid: only one- or two-parameter grids are supported");
  auto names = free_param_names(m);
  for (const auto& a : axes) {
    if (std::find(names.begin(), names.end(), a.name) == names.end())
      throw std::invalid_argument("posterior_grid: '" + a.name +
                                  "' is not a free parameter of this family");
    if (a.count < 2) throw std::invalid_argument("posterior_grid: each axis needs >= 2 points");
    if (!(a.lo < a.hi)) throw std::invalid_argument("posterior_grid: axis bounds must increase");
  }
  if (axes.size() == 2 && axes[0].name == axes[1].name)
    throw std::invalid_argument("posterior_grid: duplicate axis name");

  GridStats st;
  st.n = static_cast<double>(x.size());
  st.pairs = static_cast<double>(close_pair_total(m, x));
  if (m.family == Family::hard_core) {
    auto gap = min_pairwise_distance(x);
    st.feasible = !gap || *gap > m.R;
  }
  for (double w : q.weights) st.total_weight += w;

  std::vector<std::vector<double>> values(axes.size()), trap(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto& ax = axes[a];
    double h = (ax.hi - ax.lo) / static_cast<double>(ax.count - 1);
    for (std::size_t i = 0; i < ax.count; ++i) {
      values[a].push_back(ax.lo + h * static_cast<double>(i));
      trap[a].push_back((i == 0 || i + 1 == ax.count) ? 0.5 * h : h);
    }
  }

  ParamBox box = free_param_box(m);
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.count;

  PosteriorGrid grid;
  grid.axes = axes;
  grid.log_unnorm.resize(total);
  std::vector<double> log_mass(total);
  std::vector<double> theta = box.value;
  for (std::size_t g = 0; g < total; ++g) {
    std::size_t rem = g;
    double log_trap = 0.0;
    for (std::size_t a = axes.size(); a-- > 0;) {
      std::size_t idx = rem % axes[a].count;
      rem /= axes[a].count;
      for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == axes[a].name) theta[k] = values[a][idx];
      log_trap += std::log(trap[a][idx]);
    }
    Model mg = with_free_params(m, theta);
    double lp = log_prior(theta);
    double lv = lp == -kInf ? -kInf : grid_log_likelihood(mg, st);
    double lu = lv == -kInf ? -kInf : lv + lp;
    grid.log_unnorm[g] = lu;
    log_mass[g] = lu == -kInf ? -kInf : lu + log_trap;
  }
  grid.log_evidence = log_sum_exp(log_mass);
  if (grid.log_evidence == -kInf)
    throw std::runtime_error("posterior_grid: the posterior has no mass on this grid");
  grid.density.resize(total);
  grid.cell_probability.resize(total);
  for (std::size_t g = 0; g < total; ++g) {
    grid.density[g] = grid.log_unnorm[g] == -kInf
                          ? 0.0
                          : std::exp(grid.log_unnorm[g] - grid.log_evidence);
    grid.cell_probability[g] =
        log_mass[g] == -kInf ? 0.0 : std::exp(log_mass[g] - grid.log_evidence);
  }
  return grid;
}

}  // namespace gibbslik
