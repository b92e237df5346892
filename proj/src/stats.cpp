#include "gibbslik/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gibbslik {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

MeanSe batch_means(std::span<const double> x, std::size_t n_batches) {
  if (x.empty()) throw std::invalid_argument("batch_means: empty sequence");
  std::size_t b = std::min(n_batches, x.size());
  std::size_t len = x.size() / b;
  std::vector<double> bm;
  bm.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    std::size_t lo = i * len;
    std::size_t hi = (i + 1 == b) ? x.size() : lo + len;
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) s += x[j];
    bm.push_back(s / static_cast<double>(hi - lo));
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : bm) var += (v - mean) * (v - mean);
  var = bm.size() > 1 ? var / static_cast<double>(bm.size() - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(bm.size())), bm.size()};
}

MeanSe batch_means_chains(std::span<const double> x, std::size_t chain_len,
                          std::size_t n_batches) {
  if (chain_len == 0 || x.size() % chain_len != 0)
    throw std::invalid_argument("batch_means_chains: length not a multiple of chain_len");
  std::size_t chains = x.size() / chain_len;
  std::size_t per_chain = std::max<std::size_t>(1, n_batches / chains);
  std::vector<double> bm;
  double mean = 0.0;
  for (std::size_t c = 0; c < chains; ++c) {
    auto seg = x.subspan(c * chain_len, chain_len);
    std::size_t b = std::min(per_chain, seg.size());
    std::size_t len = seg.size() / b;
    for (std::size_t i = 0; i < b; ++i) {
      std::size_t lo = i * len;
      std::size_t hi = (i + 1 == b) ? seg.size() : lo + len;
      double s = 0.0;
      for (std::size_t j = lo; j < hi; ++j) s += seg[j];
      bm.push_back(s / static_cast<double>(hi - lo));
    }
    for (double v : seg) mean += v;
  }
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : bm) var += (v - mean) * (v - mean);
  var = bm.size() > 1 ? var / static_cast<double>(bm.size() - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(bm.size())), bm.size()};
}

namespace {

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by modified Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return gamma_p(df / 2.0, x / 2.0);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  if (x / 2.0 >= df / 2.0 + 1.0) return gamma_q_cf(df / 2.0, x / 2.0);
  return 1.0 - gamma_p(df / 2.0, x / 2.0);
}

double chi_square_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi_square_quantile: p in (0,1)");
  double lo = 0.0, hi = df + 10.0;
  while (chi_square_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GofResult chi_square_gof(std::span<const std::size_t> observed,
                         std::span<const double> expected_prob,
                         double min_expected) {
  if (observed.size() != expected_prob.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);

  std::vector<double> obs, exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += static_cast<double>(observed[i]);
    acc_e += expected_prob[i] * n;
    if (acc_e >= min_expected) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (exp.empty()) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
    } else {
      obs.back() += acc_o;
      exp.back() += acc_e;
    }
  }
  if (obs.size() < 2) return {0.0, 0.0, 1.0, obs.size()};

  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  double df = static_cast<double>(obs.size() - 1);
  return {stat, df, chi_square_sf(stat, df), obs.size()};
}

}  // namespace gibbslik
