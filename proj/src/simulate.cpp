#include "gibbslik/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "gibbslik/rng.hpp"

namespace gibbslik {

void MCMCConfig::validate() const {
  if (steps <= burn_in) throw std::invalid_argument("mcmc: steps must exceed burn_in");
  if (thin == 0) throw std::invalid_argument("mcmc: thin must be at least 1");
  if (chains == 0) throw std::invalid_argument("mcmc: chains must be at least 1");
  if (threads < 1) throw std::invalid_argument("mcmc: threads must be at least 1");
}

SampleSet sample_poisson(const Model& m, const Window& w, std::size_t n_samples,
                         std::uint64_t seed) {
  if (m.family != Family::poisson)
    throw std::invalid_argument("sample_poisson: model must be a poisson family");
  SampleSet out;
  out.model = m;
  out.window = w;
  out.config.seed = seed;
  out.config.chains = 1;
  out.per_chain = n_samples;
  out.acceptance_rate = 1.0;
  const double mean = m.beta * w.measure();
  const std::size_t d = w.dim();
  out.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(seed, 0, i);
    long n = rng.poisson(mean);
    PointPattern x(d);
    std::vector<double> p(d);
    for (long j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < d; ++k) p[k] = rng.uniform(w.lower[k], w.upper[k]);
      x.push_back(p);
    }
    out.samples.push_back(std::move(x));
  }
  return out;
}

SampleSet thin_independent(const SampleSet& s, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("thin_independent: stride must be at least 1");
  SampleSet out = s;
  out.samples.clear();
  std::size_t per_chain = s.per_chain == 0 ? s.samples.size() : s.per_chain;
  std::size_t chains = per_chain == 0 ? 0 : s.samples.size() / per_chain;
  out.per_chain = 0;
  for (std::size_t c = 0; c < chains; ++c) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < per_chain; i += stride) {
      out.samples.push_back(s.samples[c * per_chain + i]);
      ++kept;
    }
    out.per_chain = kept;
  }
  return out;
}

DiscreteSampleSet thin_independent(const DiscreteSampleSet& s, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("thin_independent: stride must be at least 1");
  DiscreteSampleSet out = s;
  out.samples.clear();
  std::size_t per_chain = s.per_chain == 0 ? s.samples.size() : s.per_chain;
  std::size_t chains = per_chain == 0 ? 0 : s.samples.size() / per_chain;
  out.per_chain = 0;
  for (std::size_t c = 0; c < chains; ++c) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < per_chain; i += stride) {
      out.samples.push_back(s.samples[c * per_chain + i]);
      ++kept;
    }
    out.per_chain = kept;
  }
  return out;
}

namespace {

// lambda(u; x) against flat coordinates; u itself is never in the state when
// this is called (birth: u is new, death: the point was removed first).
double cond_intensity_state(const Model& m, std::span<const double> u,
                            const std::vector<double>& coords, std::size_t d) {
  const std::size_t n = coords.size() / d;
  if (m.family == Family::poisson) return m.beta;
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double dd = u[k] - coords[i * d + k];
      s2 += dd * dd;
    }
    if (std::sqrt(s2) <= m.R) ++t;
  }
  if (t == 0) return m.beta;
  if (m.family == Family::hard_core || m.gamma == 0.0) return 0.0;
  return m.beta * std::pow(m.gamma, static_cast<double>(t));
}

struct ChainResult {
  std::vector<PointPattern> samples;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

ChainResult run_chain(const Model& m, const Window& w, const MCMCConfig& cfg,
                      std::size_t chain) {
  const std::size_t d = w.dim();
  const double vol = w.measure();
  std::vector<double> coords;
  ChainResult res;
  res.samples.reserve(cfg.samples_per_chain());
  std::vector<double> u(d);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    Rng rng(cfg.seed, chain, step);
    std::size_t n = coords.size() / d;
    if (rng.uniform() < 0.5) {
      for (std::size_t k = 0; k < d; ++k) u[k] = rng.uniform(w.lower[k], w.upper[k]);
      double lam = cond_intensity_state(m, u, coords, d);
      double a = lam * vol / static_cast<double>(n + 1);
      ++res.proposals;
      if (rng.uniform() < a) {
        coords.insert(coords.end(), u.begin(), u.end());
        ++res.accepted;
      }
    } else if (n > 0) {
      std::size_t idx = rng.index(n);
      for (std::size_t k = 0; k < d; ++k) u[k] = coords[idx * d + k];
      coords.erase(coords.begin() + static_cast<std::ptrdiff_t>(idx * d),
                   coords.begin() + static_cast<std::ptrdiff_t>((idx + 1) * d));
      double lam = cond_intensity_state(m, u, coords, d);
      double a = lam > 0.0 ? static_cast<double>(n) / (lam * vol)
                           : std::numeric_limits<double>::infinity();
      ++res.proposals;
      if (rng.uniform() < a) {
        ++res.accepted;
      } else {
        coords.insert(coords.end(), u.begin(), u.end());
      }
    }
    if (step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.thin == 0)
      res.samples.emplace_back(coords, d);
  }
  return res;
}

}  // namespace

SampleSet sample_gibbs(const Model& m, const Window& w, const MCMCConfig& cfg) {
  cfg.validate();
  SampleSet out;
  out.model = m;
  out.window = w;
  out.config = cfg;
  out.per_chain = cfg.samples_per_chain();

  std::vector<ChainResult> results(cfg.chains);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cfg.chains);
  if (workers <= 1) {
    for (std::size_t c = 0; c < cfg.chains; ++c) results[c] = run_chain(m, w, cfg, c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < cfg.chains; c += workers)
          results[c] = run_chain(m, w, cfg, c);
      });
    for (auto& th : pool) th.join();
  }

  std::size_t proposals = 0, accepted = 0;
  for (auto& r : results) {
    proposals += r.proposals;
    accepted += r.accepted;
    for (auto& s : r.samples) out.samples.push_back(std::move(s));
  }
  out.acceptance_rate =
      proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  return out;
}

namespace {

struct DiscreteChainResult {
  std::vector<std::uint32_t> samples;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

DiscreteChainResult run_chain_discrete(const DiscreteSpace& sp, const Model& m,
                                       const MCMCConfig& cfg, std::size_t chain,
                                       const std::vector<std::uint32_t>& nbr,
                                       const std::vector<double>& cum_weight) {
  const double W = cum_weight.back();
  DiscreteChainResult res;
  res.samples.reserve(cfg.samples_per_chain());
  std::uint32_t state = 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    Rng rng(cfg.seed, chain, step);
    int n = std::popcount(state);
    if (rng.uniform() < 0.5) {
      double target = rng.uniform() * W;
      std::size_t j = static_cast<std::size_t>(
          std::lower_bound(cum_weight.begin(), cum_weight.end(), target) - cum_weight.begin());
      if (j >= sp.size()) j = sp.size() - 1;
      ++res.proposals;
      if (!(state & (1u << j))) {
        double lam = std::exp(log_site_cond_intensity(m, j, state, nbr));
        double a = lam * W / static_cast<double>(n + 1);
        if (rng.uniform() < a) {
          state |= (1u << j);
          ++res.accepted;
        }
      }
    } else if (n > 0) {
      int pick = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
      std::uint32_t rest = state;
      std::size_t j = 0;
      for (int seen = 0;; rest &= rest - 1) {
        j = static_cast<std::size_t>(std::countr_zero(rest));
        if (seen++ == pick) break;
      }
      std::uint32_t without = state & ~(1u << j);
      double lam = std::exp(log_site_cond_intensity(m, j, without, nbr));
      double a = lam > 0.0 ? static_cast<double>(n) / (lam * W)
                           : std::numeric_limits<double>::infinity();
      ++res.proposals;
      if (rng.uniform() < a) {
        state = without;
        ++res.accepted;
      }
    }
    if (step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.thin == 0)
      res.samples.push_back(state);
  }
  return res;
}

}  // namespace

DiscreteSampleSet sample_gibbs_discrete(const DiscreteSpace& sp, const Model& m,
                                        const MCMCConfig& cfg) {
  cfg.validate();
  auto nbr = neighbour_masks(sp, m);
  std::vector<double> cum_weight(sp.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    acc += sp.weight[i];
    cum_weight[i] = acc;
  }

  DiscreteSampleSet out;
  out.model = m;
  out.config = cfg;
  out.per_chain = cfg.samples_per_chain();
  std::size_t proposals = 0, accepted = 0;
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    auto r = run_chain_discrete(sp, m, cfg, c, nbr, cum_weight);
    proposals += r.proposals;
    accepted += r.accepted;
    out.samples.insert(out.samples.end(), r.samples.begin(), r.samples.end());
  }
  out.acceptance_rate =
      proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  return out;
}

namespace {

MeanSe batch_over(const SampleSet& s, const std::function<double(const PointPattern&)>& f) {
  if (s.samples.empty()) throw std::invalid_argument("sample set is empty");
  std::vector<double> vals;
  vals.reserve(s.samples.size());
  for (const auto& x : s.samples) vals.push_back(f(x));
  std::size_t chain_len = s.per_chain == 0 ? vals.size() : s.per_chain;
  return batch_means_chains(vals, chain_len);
}

bool pattern_hits_box(const PointPattern& x, const Window& b) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (b.contains(x.point(i))) return true;
  return false;
}

}  // namespace

MeanSe estimate_void(const SampleSet& s, const Window& b) {
  return batch_over(s, [&](const PointPattern& x) { return pattern_hits_box(x, b) ? 0.0 : 1.0; });
}

MeanSe estimate_generating_functional(
    const SampleSet& s, const std::function<double(std::span<const double>)>& g) {
  return batch_over(s, [&](const PointPattern& x) {
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) prod *= 1.0 - g(x.point(i));
    return prod;
  });
}

namespace {

Window cell_box(const Window& w, std::size_t resolution, std::size_t flat) {
  const std::size_t d = w.dim();
  std::vector<double> lo(d), hi(d);
  std::size_t rem = flat;
  for (std::size_t k = d; k-- > 0;) {
    std::size_t idx = rem % resolution;
    rem /= resolution;
    double h = (w.upper[k] - w.lower[k]) / static_cast<double>(resolution);
    lo[k] = w.lower[k] + static_cast<double>(idx) * h;
    hi[k] = (idx + 1 == resolution) ? w.upper[k] : lo[k] + h;
  }
  return Window(lo, hi);
}

std::size_t cell_count(const Window& w, std::size_t resolution) {
  std::size_t n = 1;
  for (std::size_t k = 0; k < w.dim(); ++k) n *= resolution;
  return n;
}

}  // namespace

IntensityEstimate estimate_intensity(const SampleSet& s, std::size_t resolution) {
  if (resolution == 0) throw std::invalid_argument("estimate_intensity: resolution must be positive");
  IntensityEstimate out;
  out.resolution = resolution;
  const double vol = s.window.measure();
  out.global = batch_over(
      s, [&](const PointPattern& x) { return static_cast<double>(x.size()) / vol; });
  const std::size_t cells = cell_count(s.window, resolution);
  out.cells.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    Window b = cell_box(s.window, resolution, c);
    const double bvol = b.measure();
    out.cells.push_back(batch_over(s, [&](const PointPattern& x) {
      std::size_t n = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (b.contains(x.point(i))) ++n;
      return static_cast<double>(n) / bvol;
    }));
  }
  return out;
}

std::vector<RetentionCell> implied_retention(const SampleSet& s, double alpha,
                                             std::size_t resolution) {
  if (!(alpha > 0.0)) throw std::invalid_argument("implied_retention: alpha must be positive");
  if (resolution == 0)
    throw std::invalid_argument("implied_retention: resolution must be positive");
  const std::size_t cells = cell_count(s.window, resolution);
  std::vector<RetentionCell> out;
  out.reserve(cells);
  PointPattern empty(s.window.dim());
  for (std::size_t c = 0; c < cells; ++c) {
    RetentionCell cell;
    cell.box = cell_box(s.window, resolution, c);
    MeanSe v = estimate_void(s, cell.box);
    cell.void_estimate = v.mean;
    const double denom = alpha * cell.box.measure();
    // Cell average of lambda(u; empty) / alpha via the cell midpoint; the
    // empty-configuration intensity of every shipped family is flat in u.
    std::vector<double> mid(cell.box.dim());
    for (std::size_t k = 0; k < mid.size(); ++k)
      mid[k] = 0.5 * (cell.box.lower[k] + cell.box.upper[k]);
    cell.conjectured = cond_intensity(s.model, mid, empty) / alpha;
    if (v.mean <= 0.0) {
      cell.status = "void_zero";
      cell.p_hat = std::numeric_limits<double>::quiet_NaN();
      cell.se = std::numeric_limits<double>::quiet_NaN();
    } else {
      cell.p_hat = -std::log(v.mean) / denom;
      cell.se = v.se / (v.mean * denom);
      cell.status = v.mean >= 1.0 ? "void_one" : "ok";
    }
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace gibbslik
