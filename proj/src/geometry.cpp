#include "gibbslik/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gibbslik {

Window::Window(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("window: lower/upper must be non-empty and equal length");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("window: lower must be strictly below upper on every axis");
}

double Window::measure() const {
  double m = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) m *= upper[i] - lower[i];
  return m;
}

bool Window::contains(std::span<const double> p) const {
  if (p.size() != lower.size()) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  return true;
}

double window_measure(const Window& w) { return w.measure(); }

PointPattern::PointPattern(std::vector<double> flat, std::size_t dim)
    : coords_(std::move(flat)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("pattern: dimension must be positive");
  if (coords_.size() % dim_ != 0)
    throw std::invalid_argument("pattern: coordinate count not a multiple of dimension");
}

void PointPattern::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw std::invalid_argument("pattern: point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

void PointPattern::remove(std::size_t i) {
  if (i >= size()) throw std::out_of_range("pattern: index out of range");
  coords_.erase(coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                coords_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::optional<double> min_pairwise_distance(const PointPattern& x) {
  if (x.size() < 2) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      best = std::min(best, dist(x.point(i), x.point(j)));
  return best;
}

bool has_duplicate_points(const PointPattern& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      auto a = x.point(i), b = x.point(j);
      if (std::equal(a.begin(), a.end(), b.begin())) return true;
    }
  return false;
}

QuadratureScheme build_quadrature(const Window& w, std::size_t resolution_per_axis) {
  if (resolution_per_axis == 0)
    throw std::invalid_argument("quadrature: resolution must be positive");
  const std::size_t d = w.dim();
  std::size_t n = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (n > 100'000'000 / resolution_per_axis)
      throw std::invalid_argument("quadrature: grid too large");
    n *= resolution_per_axis;
  }
  QuadratureScheme q;
  q.window = w;
  q.resolution = resolution_per_axis;
  q.nodes.reserve(n * d);
  q.weights.assign(n, w.measure() / static_cast<double>(n));

  std::vector<double> h(d);
  for (std::size_t k = 0; k < d; ++k)
    h[k] = (w.upper[k] - w.lower[k]) / static_cast<double>(resolution_per_axis);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k)
      q.nodes.push_back(w.lower[k] + (static_cast<double>(idx[k]) + 0.5) * h[k]);
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < resolution_per_axis) break;
      idx[k] = 0;
    }
  }
  return q;
}

namespace {

std::vector<double> parse_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    std::size_t end = comma == std::string::npos ? line.size() : comma;
    std::size_t b = pos, e = end;
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    double v;
    auto res = std::from_chars(line.data() + b, line.data() + e, v);
    if (res.ec != std::errc{} || res.ptr != line.data() + e)
      throw std::invalid_argument("pattern csv: bad number on line " + std::to_string(lineno));
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Header iff the first field is not a number; a numeric first field makes the
// line data, so corrupt later fields still get rejected.
bool looks_like_header(const std::string& line) {
  std::size_t end = line.find(',');
  if (end == std::string::npos) end = line.size();
  std::size_t b = 0, e = end;
  while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
  double v;
  auto res = std::from_chars(line.data() + b, line.data() + e, v);
  return res.ec != std::errc{} || res.ptr != line.data() + e;
}

}  // namespace

PointPattern parse_pattern_csv(const std::string& text, std::size_t dim) {
  PointPattern x(dim);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = line;
    std::erase_if(stripped, [](unsigned char c) { return std::isspace(c); });
    if (stripped.empty()) continue;
    if (first && looks_like_header(line)) {
      first = false;
      continue;
    }
    first = false;
    auto vals = parse_csv_line(line, lineno);
    if (vals.size() != dim)
      throw std::invalid_argument("pattern csv: expected " + std::to_string(dim) +
                                  " coordinates on line " + std::to_string(lineno) + ", got " +
                                  std::to_string(vals.size()));
    x.push_back(vals);
  }
  if (has_duplicate_points(x))
    throw std::invalid_argument("pattern csv: duplicate points are not allowed");
  return x;
}

PointPattern read_pattern(const std::string& path, const Window& w, bool strict,
                          std::size_t* dropped) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("pattern csv: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  PointPattern raw = parse_pattern_csv(buf.str(), w.dim());
  PointPattern kept(w.dim());
  std::size_t out = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (w.contains(raw.point(i))) {
      kept.push_back(raw.point(i));
    } else if (strict) {
      throw std::invalid_argument("pattern csv: point " + std::to_string(i) +
                                  " lies outside the window (strict mode)");
    } else {
      ++out;
    }
  }
  if (dropped) *dropped = out;
  return kept;
}

std::string format_pattern_csv(const PointPattern& x) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto p = x.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      out += buf;
      out += (k + 1 < p.size()) ? ',' : '\n';
    }
  }
  return out;
}

void write_pattern(const std::string& path, const PointPattern& x) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("pattern csv: cannot open " + path + " for writing");
  f << format_pattern_csv(x);
}

}  // namespace gibbslik
