#include <cmath>
#include <random>

#include "cnsdist/cns.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cnsdist;

namespace {

double max_diff_dense(const Pmf& p, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t w = 0; w < want.size(); ++w) worst = std::max(worst, std::fabs(p.at(double(w)) - want[w]));
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.support()[i] >= double(want.size())) worst = std::max(worst, p.probs()[i]);
  return worst;
}

Graph from_pairs(std::size_t n, std::vector<std::pair<NodeId, NodeId>> e) {
  return Graph(n, std::span<const std::pair<NodeId, NodeId>>(e));
}

}  // namespace

TEST_CASE("poisson_binomial small cases") {
  const Pmf a = poisson_binomial(std::vector<double>{1.0, 1.0, 0.0});
  CHECK(a == Pmf::point_mass(2));
  const Pmf b = poisson_binomial(std::vector<double>{0.5});
  CHECK(b.at(0) == 0.5);
  CHECK(b.at(1) == 0.5);
  const std::vector<double> p{0.2, 0.7, 0.7};
  CHECK(max_diff_dense(poisson_binomial(p), oracle::poisson_binomial_enumerated(p)) < 1e-15);
  CHECK_THROWS(poisson_binomial(std::vector<double>{0.5, 1.2}));
  CHECK_THROWS(poisson_binomial(std::vector<double>{-0.1}));
}

TEST_CASE("poisson_binomial matches enumeration and moments") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(rng() % 13);
    for (auto& x : p) {
      const auto r = rng() % 10;
      x = r == 0 ? 0.0 : r == 1 ? 1.0 : u(rng);
    }
    if (p.empty()) continue;
    const Pmf got = poisson_binomial(p);
    CHECK(max_diff_dense(got, oracle::poisson_binomial_enumerated(p)) <= 1e-12);
    double mean = 0.0, var = 0.0;
    for (double x : p) {
      mean += x;
      var += x * (1 - x);
    }
    CHECK(std::fabs(got.mean() - mean) <= 1e-9);
    CHECK(std::fabs(got.variance() - var) <= 1e-9);
  }
}

TEST_CASE("dense form tracks the offset of certain trials") {
  const auto d = poisson_binomial_dense(std::vector<double>{1.0, 1.0, 0.5, 1e-14}, 1e-12);
  CHECK(d.offset == 2);
  CHECK(d.probs.size() == 2);
}

TEST_CASE("per-set distributions") {
  SUBCASE("random graph is binomial") {
    const auto model = ProbModel::er(300, 30.0);
    const auto want = binomial_coefficients(298, std::pow(30.0 / 299.0, 2));
    CHECK(max_diff_dense(set_cns_distribution(model, NodeSet({4, 200}, 300)), want) < 1e-13);
    const auto want3 = binomial_coefficients(297, std::pow(30.0 / 299.0, 3));
    CHECK(max_diff_dense(set_cns_distribution(model, NodeSet({1, 2, 9}, 300)), want3) < 1e-13);
  }
  SUBCASE("ring lattice adjacent pair is a point mass") {
    const auto model = ProbModel::rrl(1000, 50);
    CHECK(set_cns_distribution(model, NodeSet({10, 11}, 1000)) == Pmf::point_mass(98));
    CHECK(set_cns_distribution(model, NodeSet({0, 999}, 1000)) == Pmf::point_mass(98));
    CHECK(set_cns_distribution(model, NodeSet({0, 500}, 1000)) == Pmf::point_mass(0));
  }
  SUBCASE("three-factor closed form") {
    const auto model = ProbModel::unified(200, 6, 0.8, 0.03);
    for (NodeId j : {1u, 5u, 6u, 9u, 12u, 13u, 40u, 100u}) {
      const Pmf direct = set_cns_distribution(model, NodeSet({0, j}, 200), 0.0);
      CHECK(max_abs_difference(direct, ring_pair_closed_form(model, 0, j)) < 1e-12);
    }
  }
}

TEST_CASE("ring lattice class distributions are exact") {
  const auto d = class_distributions_analytic(ProbModel::rrl(1000, 50));
  REQUIRE(d.p_c);
  REQUIRE(d.p_d);
  CHECK(d.p_c->size() == 50);
  for (int w = 49; w <= 98; ++w) CHECK(d.p_c->at(w) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(d.p_d->at(0) == doctest::Approx(799.0 / 899.0).epsilon(1e-14));
  CHECK(d.chi_c == doctest::Approx(100.0 / 999.0));
  CHECK(d.mixture_residual() < 1e-12);

  const auto e = empirical_class_distributions(sample_graph(ProbModel::rrl(1000, 50), 0));
  CHECK(*e.p_c == *d.p_c);
  CHECK(max_abs_difference(*e.p_d, *d.p_d) < 1e-15);
}

TEST_CASE("random graph class distributions approach Poisson") {
  const auto d = class_distributions_analytic(ProbModel::er(10000, 500.0));
  CHECK(std::fabs(d.p_a.mean() - 25.0) < 0.25);
  CHECK(std::fabs(d.p_a.variance() - 25.0) < 0.25);
  const auto cf = er_closed_form(10000, 500.0, 2);
  CHECK(cf.lambda == doctest::Approx(25.0));
  CHECK(total_variation(d.p_a, cf.poisson) < 1e-2);
  CHECK(max_abs_difference(d.p_a, cf.exact) < 1e-12);
}

TEST_CASE("closed form arithmetic") {
  CHECK(er_closed_form(1000, 100.0, 3).lambda == doctest::Approx(1.0));
  const auto deg = er_closed_form(100, 9.9, 1);
  CHECK(deg.exact.mean() == doctest::Approx(9.9).epsilon(1e-10));
  CHECK(max_diff_dense(deg.exact, binomial_coefficients(99, 0.1)) < 1e-13);
}

TEST_CASE("analytic results equal enumeration over all graphs on 6 nodes") {
  const std::size_t n = 6;
  const ProbModel models[] = {ProbModel::mrl(n, 1, 0.3), ProbModel::nw(n, 1, 0.4),
                              ProbModel::unified(n, 1, 0.6, 0.25), ProbModel::ba(n, 2, 2)};
  for (const auto& model : models)
    for (std::size_t q : {2u, 3u}) {
      CAPTURE(to_string(model.kind()));
      CAPTURE(q);
      AnalyticOptions opt;
      opt.q = q;
      opt.epsilon = 0.0;
      const auto got = class_distributions_analytic(model, opt);
      const auto want = oracle::enumerate_all_graphs(
          n, q, [&](std::size_t i, std::size_t j) { return model.gamma(i, j); });
      CHECK(max_diff_dense(got.p_a, oracle::normalized(want.a)) < 1e-9);
      // A ring with m = 1 has no triangles, so no connected 3-sets exist.
      double mass_c = 0.0;
      for (double x : want.c) mass_c += x;
      CHECK(got.p_c.has_value() == (mass_c > 0.0));
      if (got.p_c) CHECK(max_diff_dense(*got.p_c, oracle::normalized(want.c)) < 1e-9);
      REQUIRE(got.p_d);
      CHECK(max_diff_dense(*got.p_d, oracle::normalized(want.d)) < 1e-9);
    }
}

TEST_CASE("degree distribution as the q = 1 case") {
  const auto d = class_distributions_analytic(ProbModel::er(50, 7.0), {.q = 1});
  CHECK_FALSE(d.p_c);
  CHECK_FALSE(d.p_d);
  CHECK(max_diff_dense(d.p_a, binomial_coefficients(49, 7.0 / 49.0)) < 1e-13);
}

TEST_CASE("sampled sets") {
  AnalyticOptions opt{.q = 3, .mode = SetEnumeration::sampled, .sample_count = 0};
  CHECK_THROWS(class_distributions_analytic(ProbModel::er(100, 10.0), opt));
  opt.sample_count = 4000;
  opt.seed = 5;
  const auto model = ProbModel::nw(200, 5, 0.3);
  const auto a = class_distributions_analytic(model, opt);
  const auto b = class_distributions_analytic(model, opt);
  CHECK(a.p_a == b.p_a);
  opt.mode = SetEnumeration::exact;
  const auto exact = class_distributions_analytic(model, opt);
  CHECK(total_variation(a.p_a, exact.p_a) < 0.03);
}

TEST_CASE("worker count does not change results beyond rounding") {
  const auto model = ProbModel::ba(300, 4, 4);
  AnalyticOptions one, four;
  four.threads = 4;
  const auto a = class_distributions_analytic(model, one);
  const auto a2 = class_distributions_analytic(model, one);
  const auto b = class_distributions_analytic(model, four);
  CHECK(a.p_a == a2.p_a);
  CHECK(max_abs_difference(a.p_a, b.p_a) < 1e-14);
  CHECK(a.mixture_residual() < 1e-12);
}

TEST_CASE("empirical distributions of small graphs") {
  const auto tri = empirical_class_distributions(from_pairs(3, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK(*tri.p_c == Pmf::point_mass(1));
  CHECK_FALSE(tri.p_d);

  const auto cyc = empirical_class_distributions(from_pairs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  CHECK(*cyc.p_c == Pmf::point_mass(0));
  CHECK(*cyc.p_d == Pmf::point_mass(2));
  CHECK(cyc.chi_c == doctest::Approx(4.0 / 6.0));

  const auto deg = empirical_class_distributions(from_pairs(4, {{0, 1}, {0, 2}, {0, 3}}), {.q = 1});
  CHECK(deg.p_a.at(1) == 0.75);
  CHECK(deg.p_a.at(3) == 0.25);
}

TEST_CASE("empirical counts obey the mixture identity exactly") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Graph g = sample_graph(ProbModel::er(120, 9.0), s);
    const auto d = empirical_class_distributions(g);
    std::uint64_t nc = 0, nd = 0;
    for (std::size_t w = 0; w < d.count_a.size(); ++w) {
      CHECK(d.count_a[w] == d.count_c[w] + d.count_d[w]);
      nc += d.count_c[w];
      nd += d.count_d[w];
    }
    CHECK(nc == g.edge_count());
    CHECK(nc + nd == g.pair_count());
    CHECK(d.mixture_residual() < 1e-15);
  }
}

TEST_CASE("empirical q = 3 uses cliques as the connected class") {
  const Graph g = sample_graph(ProbModel::er(9, 4.0), 3);
  const auto d = empirical_class_distributions(g, {.q = 3, .sample_count = 1000, .seed = 1});
  std::uint64_t total = 0;
  for (auto c : d.count_a) total += c;
  CHECK(total == 84);  // C(9,3): all sets enumerated
  std::vector<std::uint64_t> cc, cd;
  for (NodeId a = 0; a < 9; ++a)
    for (NodeId b = a + 1; b < 9; ++b)
      for (NodeId c = b + 1; c < 9; ++c) {
        const bool clique = g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c);
        std::size_t w = 0;
        for (NodeId t = 0; t < 9; ++t)
          if (t != a && t != b && t != c) w += g.has_edge(t, a) && g.has_edge(t, b) && g.has_edge(t, c);
        auto& h = clique ? cc : cd;
        if (h.size() <= w) h.resize(w + 1, 0);
        ++h[w];
      }
  for (std::size_t w = 0; w < d.count_c.size(); ++w) CHECK(d.count_c[w] == (w < cc.size() ? cc[w] : 0));
  for (std::size_t w = 0; w < d.count_d.size(); ++w) CHECK(d.count_d[w] == (w < cd.size() ? cd[w] : 0));
}

TEST_CASE("convolution approximation gap shrinks with the rewiring probability") {
  double last = 1.0;
  for (double p : {0.1, 0.05, 0.02}) {
    const auto gap = convolution_gap(ProbModel::ws(300, 8, p));
    CHECK(gap.connected_tv < last);
    last = gap.connected_tv;
  }
  CHECK_THROWS(convolution_gap(ProbModel::er(100, 5.0)));
}

TEST_CASE("JSON round trip") {
  const auto d = class_distributions_analytic(ProbModel::mrl(60, 3, 0.2));
  const auto back = class_distributions_from_json(to_json(d));
  CHECK(back.q == d.q);
  CHECK(back.chi_c == d.chi_c);
  CHECK(*back.p_c == *d.p_c);
  CHECK(*back.p_d == *d.p_d);
  CHECK(back.p_a == d.p_a);
}
