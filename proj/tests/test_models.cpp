#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gibbslik/models.hpp"
#include "gibbslik/rng.hpp"

using namespace gibbslik;

namespace {

PointPattern random_pattern(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  PointPattern x(2);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p{rng.uniform(lo, hi), rng.uniform(lo, hi)};
    x.push_back(p);
  }
  return x;
}

PointPattern shuffled(const PointPattern& x, Rng& rng) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
  PointPattern y(x.dim());
  for (std::size_t i : idx) y.push_back(x.point(i));
  return y;
}

}  // namespace

TEST_CASE("conditional intensities of the three families") {
  PointPattern x(2);
  x.push_back(std::vector<double>{0.0, 0.0});
  x.push_back(std::vector<double>{0.05, 0.0});
  x.push_back(std::vector<double>{0.5, 0.5});

  std::vector<double> u{0.02, 0.0};  // within 0.1 of the first two points

  Model po = Model::poisson(3.0);
  CHECK(cond_intensity(po, u, x) == doctest::Approx(3.0));

  Model hc = Model::hard_core(3.0, 0.1);
  CHECK(cond_intensity(hc, u, x) == 0.0);
  CHECK(cond_intensity(hc, std::vector<double>{0.9, 0.9}, x) == doctest::Approx(3.0));

  Model st = Model::strauss(3.0, 0.5, 0.1);
  CHECK(cond_intensity(st, u, x) == doctest::Approx(3.0 * 0.25));

  // gamma = 1 collapses to the reference process, gamma = 0 to the hard core
  CHECK(cond_intensity(Model::strauss(3.0, 1.0, 0.1), u, x) == doctest::Approx(3.0));
  CHECK(cond_intensity(Model::strauss(3.0, 0.0, 0.1), u, x) == 0.0);
}

TEST_CASE("membership of u in x means conditioning on x without u") {
  Model st = Model::strauss(2.0, 0.5, 0.2);
  PointPattern x(2);
  x.push_back(std::vector<double>{0.1, 0.1});
  x.push_back(std::vector<double>{0.2, 0.1});
  // Evaluating at a point of x must ignore that point's own contribution.
  double with_member = cond_intensity(st, x.point(0), x);
  PointPattern rest(2);
  rest.push_back(x.point(1));
  double leave_out = cond_intensity(st, x.point(0), rest);
  CHECK(with_member == doctest::Approx(leave_out));
}

TEST_CASE("energy uses the empty-configuration zero convention") {
  Model st = Model::strauss(2.0, 0.5, 0.15);
  PointPattern empty(2);
  CHECK(energy(st, empty) == 0.0);
  CHECK(energy(Model::poisson(7.0), empty) == 0.0);

  PointPattern x(2);
  x.push_back(std::vector<double>{0.0, 0.0});
  x.push_back(std::vector<double>{0.1, 0.0});
  x.push_back(std::vector<double>{0.8, 0.8});
  // two points interact: E = -3 log beta - 1 log gamma
  CHECK(energy(st, x) ==
        doctest::Approx(-3.0 * std::log(2.0) - std::log(0.5)).epsilon(1e-14));

  Model hc = Model::hard_core(2.0, 0.15);
  CHECK(energy(hc, x) == std::numeric_limits<double>::infinity());
  CHECK(energy(Model::strauss(2.0, 0.0, 0.15), x) == std::numeric_limits<double>::infinity());

  // energy difference identity: log lambda(u; x) = E(x) - E(x + u)
  Rng rng(5);
  Model m = Model::strauss(1.7, 0.3, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    PointPattern y = random_pattern(rng, 6);
    std::vector<double> u{rng.uniform(), rng.uniform()};
    PointPattern yu = y;
    yu.push_back(u);
    CHECK(log_cond_intensity(m, u, y) ==
          doctest::Approx(energy(m, y) - energy(m, yu)).epsilon(1e-10));
  }
}

TEST_CASE("higher order intensity telescopes and ignores order") {
  Rng rng(17);
  Model m = Model::strauss(2.0, 0.4, 0.25);
  PointPattern x = random_pattern(rng, 4);
  PointPattern u = random_pattern(rng, 5);

  PointPattern empty(2);
  CHECK(higher_order_cond_intensity(m, empty, x) == doctest::Approx(1.0));

  double base = log_higher_order_cond_intensity(m, u, x);
  for (int trial = 0; trial < 50; ++trial) {
    PointPattern v = shuffled(u, rng);
    CHECK(log_higher_order_cond_intensity(m, v, x) ==
          doctest::Approx(base).epsilon(1e-12));
  }

  PointPattern dup(2);
  dup.push_back(std::vector<double>{0.5, 0.5});
  dup.push_back(std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(higher_order_cond_intensity(m, dup, x), std::invalid_argument);

  PointPattern overlap(2);
  overlap.push_back(x.point(0));
  CHECK_THROWS_AS(higher_order_cond_intensity(m, overlap, x), std::invalid_argument);
}

TEST_CASE("local stability bounds the intensity everywhere") {
  Rng rng(23);
  for (const Model& m : {Model::poisson(4.0), Model::hard_core(4.0, 0.1),
                         Model::strauss(4.0, 0.3, 0.1)}) {
    CHECK(local_stability_bound(m) == doctest::Approx(m.beta));
    for (int trial = 0; trial < 200; ++trial) {
      PointPattern x = random_pattern(rng, rng.index(8));
      std::vector<double> u{rng.uniform(), rng.uniform()};
      CHECK(cond_intensity(m, u, x) <= local_stability_bound(m) + 1e-12);
    }
  }
}

TEST_CASE("gradient of log intensity matches finite differences") {
  Rng rng(31);
  Model m = Model::strauss(2.5, 0.6, 0.3);
  for (int trial = 0; trial < 25; ++trial) {
    PointPattern x = random_pattern(rng, 6);
    std::vector<double> u{rng.uniform(), rng.uniform()};
    auto g = grad_log_cond_intensity(m, u, x);
    REQUIRE(g.size() == 2);
    const double h = 1e-6;
    Model mp = Model::strauss(m.beta + h, m.gamma, m.R);
    Model mm = Model::strauss(m.beta - h, m.gamma, m.R);
    double fd_beta = (log_cond_intensity(mp, u, x) - log_cond_intensity(mm, u, x)) / (2 * h);
    CHECK(g[0] == doctest::Approx(fd_beta).epsilon(1e-6));
    Model gp = Model::strauss(m.beta, m.gamma + h, m.R);
    Model gm = Model::strauss(m.beta, m.gamma - h, m.R);
    double fd_gamma = (log_cond_intensity(gp, u, x) - log_cond_intensity(gm, u, x)) / (2 * h);
    CHECK(g[1] == doctest::Approx(fd_gamma).epsilon(1e-5));
  }
}

TEST_CASE("gradient errors: vanished intensity and the range parameter") {
  Model hc = Model::hard_core(2.0, 0.2);
  PointPattern x(2);
  x.push_back(std::vector<double>{0.5, 0.5});
  std::vector<double> u{0.55, 0.5};
  CHECK_THROWS_AS(grad_log_cond_intensity(hc, u, x), std::domain_error);

  Model st = Model::strauss(2.0, 0.5, 0.2);
  CHECK_THROWS_AS(grad_log_cond_intensity(st, u, x, {"R"}), std::invalid_argument);
  auto only_gamma = grad_log_cond_intensity(st, u, x, {"gamma"});
  CHECK(only_gamma.size() == 1);
  CHECK(only_gamma[0] == doctest::Approx(1.0 / 0.5));
}

TEST_CASE("model json round trip and diagnostics") {
  Model st = model_from_json_text(R"({"family":"strauss","beta":2.0,"gamma":0.5,"R":0.1})");
  CHECK(st.family == Family::strauss);
  CHECK(st.beta == 2.0);
  CHECK(st.gamma == 0.5);
  CHECK(st.R == 0.1);
  Model round = model_from_json_text(model_to_json_text(st));
  CHECK(round.beta == st.beta);
  CHECK(round.gamma == st.gamma);
  CHECK(round.R == st.R);

  // the independence family goes by either name
  CHECK(model_from_json_text(R"({"family":"independent","beta":1.5})").family ==
        Family::poisson);
  CHECK(model_from_json_text(R"({"family":"poisson","beta":1.5})").family == Family::poisson);

  try {
    model_from_json_text(R"({"family":"geyer","beta":1.0})");
    FAIL("expected a rejection");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("geyer") != std::string::npos);
    CHECK(msg.find("poisson") != std::string::npos);
    CHECK(msg.find("hard_core") != std::string::npos);
    CHECK(msg.find("strauss") != std::string::npos);
  }

  CHECK_THROWS_AS(model_from_json_text(R"({"family":"strauss","beta":2.0})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(model_from_json_text(R"({"beta":2.0})"), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json_text("not json"), std::invalid_argument);
  CHECK_THROWS_AS(Model::strauss(1.0, 1.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(Model::poisson(-1.0), std::invalid_argument);
}
