#include "gibbslik/randomfield.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gibbslik/optim.hpp"
#include "gibbslik/rng.hpp"
#include "gibbslik/stats.hpp"

namespace gibbslik {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

// log(sigmoid(t)) without overflow in either tail.
double log_sigmoid(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }

void check_field(const Lattice& l, const BinaryField& f) {
  if (f.size() != l.size()) throw std::invalid_argument("field size does not match the lattice");
  for (auto v : f)
    if (v > 1) throw std::invalid_argument("field values must be 0 or 1");
}
}  // namespace

Lattice Lattice::grid(std::size_t width, std::size_t height, bool torus) {
  if (width == 0 || height == 0) throw std::invalid_argument("lattice: empty grid");
  Lattice l;
  l.width = width;
  l.height = height;
  l.torus = torus;
  l.neighbours.resize(width * height);
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    auto& va = l.neighbours[a];
    if (std::find(va.begin(), va.end(), b) == va.end()) {
      va.push_back(b);
      l.neighbours[b].push_back(a);
    }
  };
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      std::size_t i = r * width + c;
      if (c + 1 < width) link(i, i + 1);
      else if (torus && width > 1) link(i, r * width);
      if (r + 1 < height) link(i, i + width);
      else if (torus && height > 1) link(i, c);
    }
  for (auto& v : l.neighbours) std::sort(v.begin(), v.end());
  return l;
}

std::size_t Lattice::edge_count() const {
  std::size_t twice = 0;
  for (const auto& v : neighbours) twice += v.size();
  return twice / 2;
}

double ising_potential_sum(const Lattice& l, const BinaryField& f, const IsingParams& th) {
  check_field(l, f);
  double singles = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    double si = f[i] ? 1.0 : -1.0;
    singles += si;
    for (std::size_t j : l.neighbours[i])
      if (j > i) pairs += si * (f[j] ? 1.0 : -1.0);
  }
  return th.theta1 * singles + th.theta2 * pairs;
}

double local_characteristic(const Lattice& l, const BinaryField& f, const IsingParams& th,
                            std::size_t site) {
  check_field(l, f);
  if (site >= l.size()) throw std::out_of_range("local_characteristic: site out of range");
  double s = 0.0;
  for (std::size_t j : l.neighbours[site]) s += f[j] ? 1.0 : -1.0;
  return sigmoid(th.theta1 + th.theta2 * s);
}

PointPattern field_to_pattern(const Lattice& l, const BinaryField& f) {
  check_field(l, f);
  PointPattern x(2);
  for (std::size_t i = 0; i < l.size(); ++i)
    if (f[i]) {
      double p[2] = {l.site_x(i), l.site_y(i)};
      x.push_back(p);
    }
  return x;
}

BinaryField pattern_to_field(const Lattice& l, const PointPattern& x) {
  if (x.size() > 0 && x.dim() != 2)
    throw std::invalid_argument("pattern_to_field: lattice patterns are two dimensional");
  BinaryField f(l.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = x.point(i);
    double c = p[0], r = p[1];
    if (c != std::floor(c) || r != std::floor(r) || c < 0 || r < 0 ||
        c >= static_cast<double>(l.width) || r >= static_cast<double>(l.height))
      throw std::invalid_argument("pattern_to_field: point is not a lattice site");
    std::size_t idx = l.site_index(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
    if (f[idx]) throw std::invalid_argument("pattern_to_field: duplicate site");
    f[idx] = 1;
  }
  return f;
}

double field_cond_intensity(const Lattice& l, const IsingParams& th, std::size_t site,
                            const BinaryField& conditioning) {
  check_field(l, conditioning);
  if (site >= l.size()) throw std::out_of_range("field_cond_intensity: site out of range");
  double s = 0.0;
  for (std::size_t j : l.neighbours[site]) s += conditioning[j] ? 1.0 : -1.0;
  return sigmoid(th.theta1 + th.theta2 * s);
}

double field_conjectured_log_likelihood(const Lattice& l, const BinaryField& f,
                                        const IsingParams& th) {
  check_field(l, f);
  BinaryField acc(l.size(), 0);
  double data = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!f[i]) continue;
    double s = 0.0;
    for (std::size_t j : l.neighbours[i]) s += acc[j] ? 1.0 : -1.0;
    data += log_sigmoid(th.theta1 + th.theta2 * s);
    acc[i] = 1;
  }
  BinaryField empty(l.size(), 0);
  double integral = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i)
    integral += field_cond_intensity(l, th, i, empty);
  return data - integral;
}

namespace {

// Half-potential of every bitmask field via single-bit increments:
// flipping site j from -1 to +1 changes the potential by
// 2*theta1 + 2*theta2*(occupied neighbours - empty neighbours).
std::vector<double> half_potentials(const Lattice& l, const IsingParams& th) {
  const std::size_t k = l.size();
  if (k > kMaxEnumerationSites)
    throw EnumerationLimitError("exact enumeration is limited to " +
                                std::to_string(kMaxEnumerationSites) + " sites; this lattice has " +
                                std::to_string(k));
  std::vector<std::uint32_t> nbr(k, 0);
  std::vector<double> degree(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j : l.neighbours[i]) nbr[i] |= (1u << j);
    degree[i] = static_cast<double>(l.neighbours[i].size());
  }
  const std::size_t n = std::size_t{1} << k;
  std::vector<double> half(n);
  double base = -th.theta1 * static_cast<double>(k) +
                th.theta2 * static_cast<double>(l.edge_count());
  half[0] = 0.5 * base;
  for (std::uint32_t mask = 1; mask < n; ++mask) {
    const std::size_t j = static_cast<std::size_t>(std::bit_width(mask)) - 1;
    const std::uint32_t prev = mask & ~(std::uint32_t{1} << j);
    double on = static_cast<double>(std::popcount(prev & nbr[j]));
    double delta = 2.0 * th.theta1 + 2.0 * th.theta2 * (2.0 * on - degree[j]);
    half[mask] = half[prev] + 0.5 * delta;
  }
  return half;
}

std::uint32_t field_mask(const BinaryField& f) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i]) mask |= (1u << i);
  return mask;
}

}  // namespace

std::vector<double> field_distribution(const Lattice& l, const IsingParams& th) {
  auto half = half_potentials(l, th);
  double logZ = log_sum_exp(half);
  std::vector<double> p(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) p[i] = std::exp(half[i] - logZ);
  return p;
}

double field_exact_log_partition(const Lattice& l, const IsingParams& th) {
  auto half = half_potentials(l, th);
  return log_sum_exp(half);
}

double field_exact_log_likelihood(const Lattice& l, const BinaryField& f, const IsingParams& th) {
  check_field(l, f);
  auto half = half_potentials(l, th);
  return half[field_mask(f)] - log_sum_exp(half);
}

double field_pseudo_log_likelihood(const Lattice& l, const BinaryField& f, const IsingParams& th) {
  check_field(l, f);
  double ll = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    double s = 0.0;
    for (std::size_t j : l.neighbours[i]) s += f[j] ? 1.0 : -1.0;
    double t = th.theta1 + th.theta2 * s;
    ll += f[i] ? log_sigmoid(t) : log_sigmoid(-t);
  }
  return ll;
}

FieldObjective field_objective_from_name(const std::string& name) {
  if (name == "exact") return FieldObjective::exact;
  if (name == "conjectured" || name == "conjecture") return FieldObjective::conjectured;
  if (name == "pseudo") return FieldObjective::pseudo;
  throw std::invalid_argument("unknown field objective '" + name +
                              "'; supported: exact, conjectured, pseudo");
}

std::string field_objective_name(FieldObjective o) {
  switch (o) {
    case FieldObjective::exact: return "exact";
    case FieldObjective::conjectured: return "conjectured";
    case FieldObjective::pseudo: return "pseudo";
  }
  return "?";
}

FieldFitResult field_fit(const Lattice& l, const BinaryField& f, FieldObjective objective,
                         std::size_t max_iterations) {
  check_field(l, f);
  auto value = [&](std::span<const double> th) {
    IsingParams p{th[0], th[1]};
    switch (objective) {
      case FieldObjective::exact: return field_exact_log_likelihood(l, f, p);
      case FieldObjective::conjectured: return field_conjectured_log_likelihood(l, f, p);
      case FieldObjective::pseudo: return field_pseudo_log_likelihood(l, f, p);
    }
    return -kInf;
  };
  std::vector<double> lower{-50.0, -50.0}, upper{50.0, 50.0};
  BfgsOptions opts;
  opts.max_iterations = max_iterations;
  OptimResult r = maximize_box_bfgs_fd(value, {0.0, 0.0}, lower, upper, 1e-6, opts);
  FieldFitResult out;
  out.theta_hat = {r.x[0], r.x[1]};
  out.objective = field_objective_name(objective);
  out.log_objective = r.f;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

void FieldSimConfig::validate() const {
  if (sweeps <= burn_in) throw std::invalid_argument("field sim: sweeps must exceed burn_in");
  if (thin == 0) throw std::invalid_argument("field sim: thin must be at least 1");
}

std::vector<BinaryField> gibbs_sample_field(const Lattice& l, const IsingParams& th,
                                            const FieldSimConfig& cfg) {
  cfg.validate();
  BinaryField f(l.size(), 0);
  std::vector<BinaryField> out;
  out.reserve((cfg.sweeps - cfg.burn_in) / cfg.thin);
  for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
    Rng rng(cfg.seed, 0, sweep);
    for (std::size_t i = 0; i < l.size(); ++i) {
      double s = 0.0;
      for (std::size_t j : l.neighbours[i]) s += f[j] ? 1.0 : -1.0;
      f[i] = rng.uniform() < sigmoid(th.theta1 + th.theta2 * s) ? 1 : 0;
    }
    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0) out.push_back(f);
  }
  return out;
}

BinaryField parse_field_csv(const std::string& text, std::size_t& width, std::size_t& height) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<int>> rows;
  bool flat = false;
  std::size_t flat_w = 0, flat_h = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = line;
    std::erase_if(stripped, [](unsigned char c) { return std::isspace(c); });
    if (stripped.empty()) continue;
    if (lineno == 1 && stripped.find("width") != std::string::npos) {
      flat = true;
      continue;
    }
    if (flat && flat_w == 0) {
      std::size_t comma = stripped.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("field csv: flat form needs 'width,height' values");
      flat_w = std::stoul(stripped.substr(0, comma));
      flat_h = std::stoul(stripped.substr(comma + 1));
      if (flat_w == 0 || flat_h == 0)
        throw std::invalid_argument("field csv: width and height must be positive");
      rows.emplace_back();
      continue;
    }
    std::vector<int> vals;
    std::size_t pos = 0;
    while (pos <= stripped.size() && !stripped.empty()) {
      std::size_t comma = stripped.find(',', pos);
      std::size_t end = comma == std::string::npos ? stripped.size() : comma;
      std::string tok = stripped.substr(pos, end - pos);
      if (tok != "0" && tok != "1")
        throw std::invalid_argument("field csv: cell values must be 0 or 1 (line " +
                                    std::to_string(lineno) + ")");
      vals.push_back(tok == "1" ? 1 : 0);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (flat) {
      for (int v : vals) rows.back().push_back(v);
    } else {
      rows.push_back(std::move(vals));
    }
  }
  if (flat) {
    if (rows.empty() || rows[0].size() != flat_w * flat_h)
      throw std::invalid_argument("field csv: flat form expects width*height values");
    width = flat_w;
    height = flat_h;
    BinaryField f;
    for (int v : rows[0]) f.push_back(static_cast<std::uint8_t>(v));
    return f;
  }
  if (rows.empty()) throw std::invalid_argument("field csv: no rows");
  width = rows[0].size();
  height = rows.size();
  BinaryField f;
  for (const auto& row : rows) {
    if (row.size() != width)
      throw std::invalid_argument("field csv: rows have inconsistent lengths");
    for (int v : row) f.push_back(static_cast<std::uint8_t>(v));
  }
  return f;
}

BinaryField read_field(const std::string& path, std::size_t& width, std::size_t& height) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("field csv: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_field_csv(buf.str(), width, height);
}

std::string format_field_csv(const Lattice& l, const BinaryField& f) {
  std::string out;
  for (std::size_t r = 0; r < l.height; ++r) {
    for (std::size_t c = 0; c < l.width; ++c) {
      out += f[l.site_index(c, r)] ? '1' : '0';
      out += (c + 1 < l.width) ? ',' : '\n';
    }
  }
  return out;
}

void write_field(const std::string& path, const Lattice& l, const BinaryField& f) {
  check_field(l, f);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("field csv: cannot open " + path + " for writing");
  out << format_field_csv(l, f);
}

FieldConjectureReport field_conjecture_report(const Lattice& l, const IsingParams& th) {
  FieldConjectureReport rep;
  rep.theta = th;
  rep.k = l.size();

  const char* prov_exact = "exact enumeration over all fields";
  const char* prov_conj = "conjectured closed form";
  const char* prov_mixed = "exact enumeration combined with the conjectured closed form";

  auto half = half_potentials(l, th);
  double logZ = log_sum_exp(half);
  double log_void_exact = half[0] - logZ;

  BinaryField empty(l.size(), 0);
  double integral = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i)
    integral += field_cond_intensity(l, th, i, empty);
  double log_void_conj = -integral;

  rep.entries.push_back({"log_void_exact", log_void_exact, prov_exact});
  rep.entries.push_back({"log_void_conjectured", log_void_conj, prov_conj});
  rep.entries.push_back(
      {"log_void_discrepancy", log_void_exact - log_void_conj, prov_mixed});
  rep.entries.push_back({"log_partition_exact", logZ, prov_exact});
  rep.entries.push_back({"log_partition_half_potential_origin", half[0], prov_exact});

  // Under theta2 = 0 the sites are independent Bernoulli(sigmoid(theta1)),
  // and the discrepancy above must equal sum_i [log(1 - p) + p] exactly.
  if (th.theta2 == 0.0) {
    double p = sigmoid(th.theta1);
    double identity = static_cast<double>(l.size()) * (std::log1p(-p) + p);
    rep.entries.push_back({"independence_identity", identity, prov_conj});
    rep.entries.push_back(
        {"independence_identity_residual", (log_void_exact - log_void_conj) - identity,
         prov_mixed});
  }

  double max_err = 0.0, sum_err = 0.0;
  for (std::uint32_t mask = 0; mask < half.size(); ++mask) {
    BinaryField f(l.size(), 0);
    for (std::size_t i = 0; i < l.size(); ++i)
      if (mask & (1u << i)) f[i] = 1;
    double err = std::abs(field_conjectured_log_likelihood(l, f, th) - (half[mask] - logZ));
    max_err = std::max(max_err, err);
    sum_err += err;
  }
  rep.entries.push_back({"loglik_abs_error_max", max_err, prov_mixed});
  rep.entries.push_back(
      {"loglik_abs_error_mean", sum_err / static_cast<double>(half.size()), prov_mixed});
  return rep;
}

}  // namespace gibbslik
