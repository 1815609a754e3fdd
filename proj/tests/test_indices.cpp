#include <cmath>
#include <random>
#include <sstream>

#include "cnsdist/error.hpp"
#include "cnsdist/indices.hpp"
#include "cnsdist/models.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cnsdist;

namespace {

Graph from_pairs(std::size_t n, std::vector<std::pair<NodeId, NodeId>> e) {
  return Graph(n, std::span<const std::pair<NodeId, NodeId>>(e));
}

oracle::Matrix adjacency(const Graph& g) {
  auto a = oracle::zeros(g.node_count());
  for (const Edge& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1.0;
  return a;
}

}  // namespace

TEST_CASE("local indices on small graphs") {
  const Graph tri = from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(score_cn(tri, 0, 1) == 1.0);
  CHECK(score_ra(tri, 0, 1) == 0.5);
  CHECK(score_aa(tri, 0, 1) == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(score_aa(tri, 0, 1) == doctest::Approx(1.4427).epsilon(1e-4));

  const Graph path = from_pairs(3, {{0, 1}, {1, 2}});
  CHECK(score_cn(path, 0, 2) == 1.0);
  CHECK(score_ra(path, 0, 1) == 0.0);
  CHECK(score_aa(path, 0, 1) == 0.0);

  const Graph star = from_pairs(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CHECK(score_ra(star, 2, 4) == doctest::Approx(0.2));

  // Two triangles sharing node 2.
  const Graph bowtie = from_pairs(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
  CHECK(score_aa(bowtie, 0, 1) == doctest::Approx(1.0 / std::log(4.0)));
  CHECK(score_aa(bowtie, 0, 4) == doctest::Approx(1.0 / std::log(4.0)));
  CHECK(score_aa(bowtie, 0, 2) == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(score_ra(bowtie, 1, 3) == doctest::Approx(0.25));
  CHECK(score_cn(bowtie, 0, 2) == 1.0);

  CHECK_THROWS(score_cn(tri, 1, 1));
  CHECK_THROWS(score_ra(tri, 0, 7));
}

TEST_CASE("CN agrees with the graph-level common-neighbor count") {
  const Graph g = sample_graph(ProbModel::er(200, 10.0), 1);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    NodeId a = rng() % 200, b = rng() % 200;
    if (a == b) continue;
    CHECK(score_cn(g, a, b) == static_cast<double>(cns(g, NodeSet({a, b}, 200))));
  }
}

TEST_CASE("all-pair scores match the pairwise definitions") {
  const Graph g = sample_graph(ProbModel::er(80, 9.0), 4);
  const auto cn = all_pair_scores(g, {IndexKind::cn, 0.0});
  const auto ra = all_pair_scores(g, {IndexKind::ra, 0.0});
  const auto aa = all_pair_scores(g, {IndexKind::aa, 0.0});
  for (NodeId u = 0; u < 80; ++u)
    for (NodeId v = u + 1; v < 80; ++v) {
      CHECK(cn(u, v) == score_cn(g, u, v));
      CHECK(cn(v, u) == cn(u, v));
      CHECK(ra(u, v) == doctest::Approx(score_ra(g, u, v)).epsilon(1e-14));
      CHECK(aa(u, v) == doctest::Approx(score_aa(g, u, v)).epsilon(1e-14));
    }
}

TEST_CASE("local path index") {
  const Graph path = from_pairs(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto s = all_pair_scores(path, {IndexKind::lp, 0.02});
  CHECK(s(0, 3) == doctest::Approx(0.02));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId u = 0; u < 6; ++u)
      for (NodeId v = u + 1; v < 6; ++v)
        if (rng() % 2) e.emplace_back(u, v);
    const Graph g = from_pairs(6, e);
    const auto a = adjacency(g);
    const auto a2 = oracle::multiply(a, a);
    const auto a3 = oracle::multiply(a2, a);
    const auto lp = all_pair_scores(g, {IndexKind::lp, 0.02});
    const auto lp0 = all_pair_scores(g, {IndexKind::lp, 0.0});
    for (NodeId u = 0; u < 6; ++u)
      for (NodeId v = u + 1; v < 6; ++v) {
        CHECK(lp(u, v) == doctest::Approx(a2[u][v] + 0.02 * a3[u][v]).epsilon(1e-14));
        CHECK(lp0(u, v) == score_cn(g, u, v));
      }
  }
  CHECK_THROWS_AS(all_pair_scores(path, {IndexKind::lp, -0.1}), std::invalid_argument);
}

TEST_CASE("Katz index") {
  SUBCASE("single link") {
    const Graph g = from_pairs(2, {{0, 1}});
    const auto s = all_pair_scores(g, {IndexKind::katz, 0.01});
    CHECK(s(0, 1) == doctest::Approx(0.01 / (1 - 1e-4)).epsilon(1e-12));
  }
  SUBCASE("empty graph") {
    const Graph g(5, std::span<const Edge>{});
    const auto s = all_pair_scores(g, {IndexKind::katz, 0.01});
    for (double v : s.raw()) CHECK(v == 0.0);
  }
  SUBCASE("closed form and truncated series") {
    const Graph g = sample_graph(ProbModel::er(50, 6.0), 21);
    const auto a = adjacency(g);
    const auto closed = oracle::katz_closed_form(a, 0.01);
    const auto series = oracle::katz_series(a, 0.01, 30);
    const auto s = all_pair_scores(g, {IndexKind::katz, 0.01});
    double worst = 0.0;
    for (NodeId u = 0; u < 50; ++u)
      for (NodeId v = u + 1; v < 50; ++v) {
        worst = std::max(worst, std::fabs(s(u, v) - closed[u][v]));
        worst = std::max(worst, std::fabs(closed[u][v] - series[u][v]));
        CHECK(std::fabs(closed[u][v] - closed[v][u]) < 1e-12);
      }
    CHECK(worst <= 1e-10);
  }
  SUBCASE("divergence is reported") {
    const Graph g = sample_graph(ProbModel::er(60, 10.0), 2);
    CHECK_THROWS_AS(all_pair_scores(g, {IndexKind::katz, 0.5}), NumericalError);
    CHECK(spectral_radius_estimate(g) > 9.0);
  }
}

TEST_CASE("score tables") {
  const Graph g = sample_graph(ProbModel::er(40, 5.0), 6);
  const auto t = score_table(g, {IndexKind::ra, 0.0});
  CHECK(t.connected.size() == g.edge_count());
  CHECK(t.connected.size() + t.unconnected.size() == 40 * 39 / 2);
  for (const auto& p : t.connected) CHECK(g.has_edge(p.u, p.v));
  for (const auto& p : t.unconnected) CHECK_FALSE(g.has_edge(p.u, p.v));
  for (std::size_t i = 1; i < t.unconnected.size(); ++i) {
    const auto& a = t.unconnected[i - 1];
    const auto& b = t.unconnected[i];
    CHECK((a.u < b.u || (a.u == b.u && a.v < b.v)));
  }
  CHECK(score_lp(g).spec.phi == 0.02);
  CHECK(score_katz(g).spec.phi == 0.01);

  const Graph path = from_pairs(3, {{0, 1}, {1, 2}});
  std::ostringstream os;
  write_score_table_csv(os, score_table(path, {IndexKind::cn, 0.0}));
  CHECK(os.str() == "u,v,score,class\n0,1,0,c\n0,2,1,d\n1,2,0,c\n");
}

TEST_CASE("Katz connected-pair shift") {
  const double phi = 0.01;
  const Pmf z = katz_connected_shift(Pmf::point_mass(phi), phi);
  CHECK(z.support()[0] == 0.0);
  const Pmf two = katz_connected_shift(Pmf({phi, 1 + phi}, {0.5, 0.5}), phi);
  CHECK(two.support()[0] == doctest::Approx(0.0));
  CHECK(two.support()[1] == doctest::Approx(1.0));
}
