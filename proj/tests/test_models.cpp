#include <cmath>
#include <random>

#include "cnsdist/models.hpp"
#include "doctest.h"

using namespace cnsdist;

namespace {

// Node-type counts by scanning every other node.
RingPairTypes brute_types(std::size_t i, std::size_t j, std::size_t n, std::size_t m) {
  RingPairTypes t;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == i || v == j) continue;
    const bool ni = ring_distance(v, i, n) <= m;
    const bool nj = ring_distance(v, j, n) <= m;
    if (ni && nj)
      ++t.both;
    else if (ni || nj)
      ++t.one;
    else
      ++t.neither;
  }
  return t;
}

}  // namespace

TEST_CASE("ring distance wraps around") {
  CHECK(ring_distance(0, 9, 10) == 1);
  CHECK(ring_distance(2, 7, 10) == 5);
  CHECK(ring_distance(3, 3, 10) == 0);
  CHECK(ring_distance(8, 1, 10) == 3);
}

TEST_CASE("gamma_unified") {
  CHECK(gamma_unified(0, 2, 10, 2, 1.0, 0.0) == 1.0);
  CHECK(gamma_unified(0, 5, 10, 2, 1.0, 0.0) == 0.0);
  CHECK(gamma_unified(0, 9, 10, 2, 0.7, 0.1) == 0.7);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      if (i != j) CHECK(gamma_unified(i, j, 10, 2, 0.3, 0.3) == 0.3);
  CHECK_THROWS(gamma_unified(0, 1, 10, 2, 1.5, 0.0));
  CHECK_THROWS(gamma_unified(0, 1, 9, 2, 1.0, 0.0));  // n < 4m+2
}

TEST_CASE("node-type counts match a scan over the ring") {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 4 * m + 2; n <= 4 * m + 9; ++n)
      for (std::size_t d = 1; d <= n / 2; ++d) {
        const auto want = brute_types(0, d, n, m);
        const auto got = ring_pair_types(d, n, m);
        CHECK(got.both == want.both);
        CHECK(got.one == want.one);
        CHECK(got.neither == want.neither);
        CHECK(s_count(0, d, n, m) == want.both);
        CHECK(s_count(n - 1, d - 1, n, m) == want.both);  // translation
      }
  CHECK(s_count(0, 2, 20, 3) == 3);
  CHECK(s_count(0, 4, 20, 3) == 3);  // counted on the ring: t in {1,2,3}
  CHECK(s_count(0, 7, 20, 3) == 0);
  CHECK(s_count(0, 1, 1000, 50) == 98);
}

TEST_CASE("ring providers are specializations of the unified model") {
  const std::size_t n = 101, m = 5;
  const double p = 0.3;
  const double a = 2.0 * m * p / (n - 1.0 - 2.0 * m);
  struct Case {
    ProbModel model;
    double eta, alpha;
  };
  const Case cases[] = {
      {ProbModel::rrl(n, m), 1.0, 0.0},
      {ProbModel::mrl(n, m, p), 1.0 - p, 0.0},
      {ProbModel::er(n, 8.0), 8.0 / (n - 1.0), 8.0 / (n - 1.0)},
      {ProbModel::ws(n, m, p), 1.0 - p, a},
      {ProbModel::nw(n, m, p), 1.0, a},
      {ProbModel::unified(n, m, 0.4, 0.02), 0.4, 0.02},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.model.kind()));
    const std::size_t mm = c.model.kind() == ModelKind::er ? 0 : m;
    for (std::size_t i = 0; i < n; i += 7)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) {
          CHECK(c.model.gamma(i, j) == 0.0);
          continue;
        }
        CHECK(c.model.gamma(i, j) == doctest::Approx(gamma_unified(i, j, n, mm, c.eta, c.alpha)).epsilon(1e-15));
        CHECK(c.model.gamma(i, j) == c.model.gamma(j, i));
      }
  }
}

TEST_CASE("expected link counts") {
  for (double p : {0.0, 0.1, 0.5, 1.0})
    CHECK(ProbModel::ws(1000, 25, p).expected_edges() == doctest::Approx(25.0 * 1000).epsilon(1e-12));
  const auto er = ProbModel::er(200, 10.0);
  double row = 0.0;
  for (std::size_t j = 1; j < 200; ++j) row += er.gamma(0, j);
  CHECK(row == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(er.exchangeable());
  CHECK_FALSE(ProbModel::rrl(20, 2).exchangeable());
}

TEST_CASE("growth model probabilities") {
  SUBCASE("two equal candidates, one link") {
    const auto g = ba_gamma_matrix(3, 1, 2);
    CHECK(g(2, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(g(2, 1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(g.trials()[2] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g(0, 1) == 1.0);
  }
  SUBCASE("as many links as candidates forces certainty") {
    const auto g = ba_gamma_matrix(3, 2, 2);
    CHECK(g(2, 0) == 1.0);
    CHECK(g(2, 1) == 1.0);
    CHECK(g.residuals()[2] == doctest::Approx(0.0));
  }
  SUBCASE("row sums and degrees") {
    const auto g = ba_gamma_matrix(400, 5, 6);
    for (std::size_t i = 6; i < 400; ++i) CHECK(std::fabs(g.row_sum_earlier(i) - 5.0) <= 1e-8);
    double total = 0.0;
    for (double k : g.expected_degrees()) total += k;
    CHECK(total == doctest::Approx(2.0 * (15.0 + 5.0 * 394.0)).epsilon(1e-9));
    // Older nodes accumulate more degree.
    CHECK(g.expected_degrees()[0] > g.expected_degrees()[300]);
  }
  CHECK_THROWS(ba_gamma_matrix(10, 3, 2));
  CHECK_THROWS(ba_gamma_matrix(5, 1, 5));
}

TEST_CASE("samplers") {
  SUBCASE("ring lattice is deterministic with degree 2m") {
    const Graph g = sample_graph(ProbModel::rrl(1000, 50), 0);
    CHECK(g.edge_count() == 50000);
    for (auto k : g.degrees()) CHECK(k == 100);
    const Graph h = sample_graph(ProbModel::rrl(1000, 50), 99);
    CHECK(std::equal(g.edges().begin(), g.edges().end(), h.edges().begin()));
  }
  SUBCASE("random graph mean degree") {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const double k = sample_graph(ProbModel::er(10000, 500.0), s).mean_degree();
      CHECK(std::fabs(k - 500.0) < 5.0);
      total += k;
    }
    CHECK(std::fabs(total / 10.0 - 500.0) < 5.0);
  }
  SUBCASE("rewiring keeps the link count and is seed-deterministic") {
    const Graph a = sample_ws_rewired(500, 10, 0.3, 4);
    const Graph b = sample_ws_rewired(500, 10, 0.3, 4);
    const Graph c = sample_ws_rewired(500, 10, 0.3, 5);
    CHECK(a.edge_count() == 5000);
    CHECK(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin()));
    CHECK_FALSE(std::equal(a.edges().begin(), a.edges().end(), c.edges().begin()));
    std::size_t lattice = 0;
    for (const Edge& e : a.edges()) lattice += ring_distance(e.u, e.v, 500) <= 10;
    // About (1-p) of links stay on the lattice.
    CHECK(std::fabs(lattice / 5000.0 - 0.7) < 0.03);
  }
  SUBCASE("keyed sampling is reproducible") {
    const auto model = ProbModel::nw(300, 4, 0.2);
    const Graph a = sample_graph(model, 8), b = sample_graph(model, 8);
    CHECK(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin()));
  }
  SUBCASE("growth model degree exponent") {
    const auto model = ProbModel::ba(5000, 25, 25);
    const Graph g = sample_graph(model, 3);
    const auto d = g.degrees();
    const double gamma = fit_power_law_exponent(d, 25);
    CHECK(gamma >= 2.5);
    CHECK(gamma <= 3.5);
  }
}

TEST_CASE("power-law fit recovers a known exponent") {
  // Discrete power law with exponent 3 via inverse transform of the
  // continuous approximation.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> k;
  for (int i = 0; i < 200000; ++i)
    k.push_back(static_cast<std::size_t>(std::floor((10 - 0.5) * std::pow(1 - u(rng), -0.5) + 0.5)));
  CHECK(fit_power_law_exponent(k, 10) == doctest::Approx(3.0).epsilon(0.02));
}
