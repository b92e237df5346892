#include <stdexcept>
#include <bit>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gibbslik/oracle.hpp"
#include "gibbslik/rng.hpp"

using namespace gibbslik;

namespace {

DiscreteSpace three_site_path() {
  PointPattern sites(2);
  sites.push_back(std::vector<double>{0.0, 0.0});
  sites.push_back(std::vector<double>{1.0, 0.0});
  sites.push_back(std::vector<double>{2.0, 0.0});
  return DiscreteSpace::from_sites(sites);
}

}  // namespace

// Hand-computed normalizer for strauss(beta=2, gamma=1/2, R=1.5) on a
// three-site path with unit weights: neighbours are (0,1) and (1,2), so
// Z = 1 + 3b + b^2(1 + 2g) + b^3 g^2 = 17.
TEST_CASE("enumeration reproduces the hand-computed path normalizer") {
  DiscreteSpace s = three_site_path();
  Model m = Model::strauss(2.0, 0.5, 1.5);
  ExactSummary e = enumerate_exact(s, m);
  CHECK(e.k == 3);
  CHECK(std::exp(e.log_normalizer) == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(std::exp(e.log_void) == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
  // subset {0, 2} has no close pair: w = beta^2 = 4
  CHECK(e.probability[0b101] == doctest::Approx(4.0 / 17.0).epsilon(1e-12));
  // full subset: w = beta^3 gamma^2 = 2
  CHECK(e.probability[0b111] == doctest::Approx(2.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("enumeration invariants hold to machine precision") {
  DiscreteSpace s = three_site_path();
  for (const Model& m : {Model::poisson(1.7), Model::hard_core(2.5, 1.2),
                         Model::strauss(2.0, 0.3, 1.5)}) {
    ExactSummary e = enumerate_exact(s, m);
    double total = 0.0;
    for (double p : e.probability) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(e.probability[0] == doctest::Approx(std::exp(e.log_void)).epsilon(1e-12));

    // weight ratio equals the conditional intensity of the added site
    auto nbr = neighbour_masks(s, m);
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (mask & (1u << j)) continue;
        if (std::isinf(e.log_weight[mask])) continue;  // ratio undefined off support
        std::uint32_t grown = mask | (1u << j);
        double lhs = e.log_weight[grown] - e.log_weight[mask];
        double rhs = log_site_cond_intensity(m, j, mask, nbr);
        if (lhs == rhs) continue;  // both -inf
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("independent model void probability is (1+beta)^-k") {
  DiscreteSpace s = DiscreteSpace::grid(2, 3);
  Model m = Model::poisson(0.8);
  ExactSummary e = enumerate_exact(s, m);
  CHECK(std::exp(e.log_void) ==
        doctest::Approx(std::pow(1.0 + 0.8, -6.0)).epsilon(1e-12));
}

TEST_CASE("site weights refine the independent void towards the continuum") {
  // k sites of weight 1/k tile a unit interval; the exact void
  // (1 + beta/k)^-k approaches the continuum closed form e^-beta.
  Model m = Model::poisson(2.0);
  double prev_gap = 1.0;
  for (std::size_t k : {2u, 8u, 16u}) {
    PointPattern sites(1);
    for (std::size_t i = 0; i < k; ++i)
      sites.push_back(std::vector<double>{(static_cast<double>(i) + 0.5) / k});
    DiscreteSpace s =
        DiscreteSpace::from_sites(sites, std::vector<double>(k, 1.0 / static_cast<double>(k)));
    ExactSummary e = enumerate_exact(s, m);
    CHECK(std::exp(e.log_void) ==
          doctest::Approx(std::pow(1.0 + 2.0 / k, -static_cast<double>(k))).epsilon(1e-12));
    double gap = std::abs(e.log_void - (-2.0));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("hard core forbids neighbouring pairs entirely") {
  DiscreteSpace s = three_site_path();
  Model m = Model::hard_core(3.0, 1.0);
  ExactSummary e = enumerate_exact(s, m);
  CHECK(e.log_weight[0b011] == -std::numeric_limits<double>::infinity());
  CHECK(e.log_weight[0b110] == -std::numeric_limits<double>::infinity());
  CHECK(e.log_weight[0b101] > -std::numeric_limits<double>::infinity());
  // Z = 1 + 3b + b^2 (only {0,2} survives at two points)
  CHECK(std::exp(e.log_normalizer) == doctest::Approx(1.0 + 9.0 + 9.0).epsilon(1e-12));
}

TEST_CASE("pattern masks map points to sites and back") {
  DiscreteSpace s = three_site_path();
  PointPattern x(2);
  x.push_back(std::vector<double>{2.0, 0.0});
  x.push_back(std::vector<double>{0.0, 0.0});
  CHECK(mask_from_pattern(s, x) == 0b101);
  PointPattern y = pattern_from_mask(s, 0b101);
  CHECK(y.size() == 2);
  CHECK(y.point(0)[0] == 0.0);
  CHECK(y.point(1)[0] == 2.0);

  PointPattern off(2);
  off.push_back(std::vector<double>{0.5, 0.0});
  CHECK_THROWS_AS(mask_from_pattern(s, off), std::invalid_argument);

  Model m = Model::strauss(2.0, 0.5, 1.5);
  CHECK(exact_log_likelihood_discrete(s, m, x) ==
        doctest::Approx(std::log(4.0 / 17.0)).epsilon(1e-12));
}

TEST_CASE("marginals aggregate the right states") {
  DiscreteSpace s = three_site_path();
  Model m = Model::strauss(2.0, 0.5, 1.5);
  ExactSummary e = enumerate_exact(s, m);
  // site 0 occupied: subsets {0},{0,1},{0,2},{0,1,2} -> (2 + 2 + 4 + 2)/17
  CHECK(marginal_probability(e, 0b001, 0b001) ==
        doctest::Approx(10.0 / 17.0).epsilon(1e-12));
  double p0 = marginal_probability(e, 0b001, 0b000);
  CHECK(p0 + 10.0 / 17.0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(marginal_probability(e, 0b001, 0b010), std::invalid_argument);
}

TEST_CASE("conjectured sequential likelihood telescopes to the subset weight") {
  DiscreteSpace s = DiscreteSpace::grid(3, 2);
  Model m = Model::strauss(1.6, 0.45, 1.0);
  ExactSummary e = enumerate_exact(s, m);
  double lv_conj = conjectured_log_void_discrete(s, m);
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    std::uint32_t mask = static_cast<std::uint32_t>(rng.next_u64() & 0x3f);
    double conj = conjectured_log_likelihood_discrete(s, m, mask);
    CHECK(conj - lv_conj == doctest::Approx(e.log_weight[mask]).epsilon(1e-12));
  }
  CHECK(conjectured_log_partition_discrete(s, m) ==
        doctest::Approx(1.6 * 6.0).epsilon(1e-14));
}

TEST_CASE("enumeration size guard names the bound") {
  PointPattern sites(2);
  for (int i = 0; i < 25; ++i)
    sites.push_back(std::vector<double>{static_cast<double>(i), 0.0});
  DiscreteSpace s = DiscreteSpace::from_sites(sites);
  try {
    enumerate_exact(s, Model::poisson(1.0));
    FAIL("expected the resource guard");
  } catch (const EnumerationLimitError& e) {
    std::string msg = e.what();
    CHECK(msg.find("24") != std::string::npos);
    CHECK(msg.find("25") != std::string::npos);
  }
}

TEST_CASE("conjecture report quantifies the discrepancy") {
  DiscreteSpace s = three_site_path();
  Model m = Model::strauss(2.0, 0.5, 1.5);
  ConjectureReportOptions opts;
  opts.beta_grid = 101;
  ConjectureReport rep = conjecture_report(s, m, opts);
  auto find = [&](const std::string& name) -> const ReportEntry& {
    for (const auto& e : rep.entries)
      if (e.name == name) return e;
    FAIL("missing entry " << name);
    static ReportEntry dummy;
    return dummy;
  };

  CHECK(find("void_exact").value == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
  CHECK(find("void_conjectured").value == doctest::Approx(std::exp(-6.0)).epsilon(1e-12));
  CHECK(find("log_partition_exact").value == doctest::Approx(std::log(17.0)).epsilon(1e-12));
  CHECK(find("log_partition_conjectured").value == doctest::Approx(6.0).epsilon(1e-12));
  // total mass of the conjectured density = Z * V_conj
  CHECK(find("conjectured_density_total_mass").value ==
        doctest::Approx(17.0 * std::exp(-6.0)).epsilon(1e-12));
  // per-subset log likelihood error is the constant |log Z + log V_conj|
  double expected_err = std::abs(std::log(17.0) - 6.0);
  CHECK(find("loglik_abs_error_max").value == doctest::Approx(expected_err).epsilon(1e-12));
  CHECK(find("loglik_abs_error_mean").value == doctest::Approx(expected_err).epsilon(1e-12));
  CHECK(find("feasible_subsets").value == doctest::Approx(8.0));

  for (const auto& e : rep.entries) CHECK_FALSE(e.provenance.empty());
  CHECK(find("beta_argmax_exact").value > 0.0);
  CHECK(find("beta_argmax_conjectured").value > 0.0);
}
