#include <cmath>
#include <random>
#include <set>

#include "cnsdist/linkpred.hpp"
#include "cnsdist/models.hpp"
#include "doctest.h"

using namespace cnsdist;

namespace {

Pmf random_pmf(std::mt19937_64& rng, std::size_t size, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(size), w(size);
  for (auto& v : x) v = lo + (hi - lo) * u(rng);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  w.resize(x.size());
  double s = 0.0;
  for (auto& v : w) s += (v = u(rng));
  for (auto& v : w) v /= s;
  return Pmf(x, w);
}

Pmf transformed(const Pmf& p) {
  std::vector<double> x(p.support().begin(), p.support().end());
  for (auto& v : x) v = std::exp(v / 3.0) + v * v * v;
  return Pmf(x, std::vector<double>(p.probs().begin(), p.probs().end()));
}

}  // namespace

TEST_CASE("split protocol") {
  CHECK(test_set_size(5484, 0.1) == 549);
  CHECK(test_set_size(12500, 0.1) == 1250);
  const Graph g = sample_graph(ProbModel::er(200, 8.0), 1);
  const SplitSpec spec{0.1, 42, 100};
  const Split a = split(g, spec, 3);
  const Split b = split(g, spec, 3);
  const Split c = split(g, spec, 4);
  CHECK(a.test.size() == test_set_size(g.edge_count(), 0.1));
  CHECK(a.training.edge_count() + a.test.size() == g.edge_count());
  CHECK(a.training.node_count() == g.node_count());
  for (const Edge& e : a.test) {
    CHECK(g.has_edge(e.u, e.v));
    CHECK_FALSE(a.training.has_edge(e.u, e.v));
  }
  CHECK(a.test == b.test);
  CHECK(a.test != c.test);
  CHECK(std::is_sorted(a.test.begin(), a.test.end()));

  CHECK_THROWS(split(g, {0.0, 1, 1}, 0));
  CHECK_THROWS(split(g, {1.0, 1, 1}, 0));
  CHECK_THROWS(split(Graph(5, std::span<const Edge>{}), spec, 0));
}

TEST_CASE("experimental AUC") {
  CHECK(auc_from_counts(10, 7, 2) == doctest::Approx(0.8));
  const Graph g = sample_graph(ProbModel::er(100, 6.0), 2);
  const Split s = split(g, {0.1, 5, 1}, 0);

  PairScores flat(100);
  CHECK(auc_experimental(s.training, s.test, flat, 1000, 1) == 0.5);

  PairScores perfect(100);
  for (const Edge& e : s.test) perfect.at(e.u, e.v) = 1.0;
  CHECK(auc_experimental(s.training, s.test, perfect, 1000, 1) == 1.0);

  const double a1 = auc_experimental(s.training, s.test, IndexSpec{IndexKind::cn, 0.0}, 2000, 9);
  const double a2 = auc_experimental(s.training, s.test, IndexSpec{IndexKind::cn, 0.0}, 2000, 9);
  CHECK(a1 == a2);
}

TEST_CASE("experimental Precision") {
  const Graph g = sample_graph(ProbModel::er(100, 6.0), 3);
  const Split s = split(g, {0.1, 5, 1}, 0);
  const double unlinked = static_cast<double>(s.training.pair_count() - s.training.edge_count());

  PairScores perfect(100);
  for (const Edge& e : s.test) perfect.at(e.u, e.v) = 2.0;
  CHECK(precision_experimental(s.training, s.test, perfect) == 1.0);

  PairScores flat(100);
  CHECK(precision_experimental(s.training, s.test, flat) ==
        doctest::Approx(static_cast<double>(s.test.size()) / unlinked));

  // Half the test pairs on top, the rest tied with 10 decoys below.
  PairScores mixed(100);
  const std::size_t half = s.test.size() / 2;
  for (std::size_t i = 0; i < s.test.size(); ++i) mixed.at(s.test[i].u, s.test[i].v) = i < half ? 3.0 : 1.0;
  std::size_t decoys = 0;
  for (NodeId u = 0; u < 100 && decoys < 10; ++u)
    for (NodeId v = u + 1; v < 100 && decoys < 10; ++v)
      if (!g.has_edge(u, v)) {
        mixed.at(u, v) = 1.0;
        ++decoys;
      }
  const double rest = static_cast<double>(s.test.size() - half);
  const double L = static_cast<double>(s.test.size());
  const double want = (half + rest * rest / (rest + 10.0)) / L;
  CHECK(precision_experimental(s.training, s.test, mixed) == doctest::Approx(want));
}

TEST_CASE("theoretical AUC") {
  const Pmf c({1.0, 2.0}, {0.5, 0.5});
  const Pmf d({0.0, 1.0}, {0.5, 0.5});
  CHECK(auc_theoretical(c, d) == doctest::Approx(0.875));
  CHECK(auc_theoretical(c, c) == 0.5);
  CHECK(auc_theoretical(Pmf::point_mass(5), Pmf::point_mass(2)) == 1.0);

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Pmf p = random_pmf(rng, 1 + rng() % 20, 0.0, 5.0);
    const Pmf q = random_pmf(rng, 1 + rng() % 20, 0.0, 5.0);
    CHECK(auc_theoretical(p, p) == 0.5);
    CHECK(auc_theoretical(p, q) == doctest::Approx(auc_theoretical(transformed(p), transformed(q))).epsilon(1e-12));
    CHECK(auc_theoretical(p, q) + auc_theoretical(q, p) == doctest::Approx(1.0));
  }
}

TEST_CASE("theoretical Precision") {
  // n = 10, <k> = 2, epsilon = 0.1: class masses 1 and 35.
  const Pmf c = Pmf::point_mass(2.0);
  const Pmf d({0.0, 1.0}, {30.0 / 35.0, 5.0 / 35.0});
  auto r = precision_theoretical(c, d, 10, 2.0, 0.1, 1.0);
  CHECK(r.exact == doctest::Approx(1.0));
  CHECK(r.threshold == 2.0);
  r = precision_theoretical(c, d, 10, 2.0, 0.1, 3.0);
  CHECK(r.threshold == 1.0);
  CHECK(r.exact == doctest::Approx(1.0 / 3.0));
  CHECK(r.loose == doctest::Approx(1.0 / 6.0));
  CHECK(r.loose_above == doctest::Approx(1.0));
  CHECK_THROWS(precision_theoretical(c, d, 10, 2.0, 0.1, 40.0));
  CHECK_THROWS(precision_theoretical(c, d, 10, 2.0, 0.1, 0.0));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Pmf pc = random_pmf(rng, 1 + rng() % 15, 0.0, 10.0);
    const Pmf pd = random_pmf(rng, 1 + rng() % 15, 0.0, 8.0);
    const double L = 1.0 + static_cast<double>(rng() % 400);
    const auto t = precision_theoretical(pc, pd, 100, 8.0, 0.1, L);
    const double lo = std::min(t.loose, t.loose_above), hi = std::max(t.loose, t.loose_above);
    CHECK(t.exact >= lo - 1e-12);
    CHECK(t.exact <= hi + 1e-12);
    CHECK(t.exact >= 0.0);
    CHECK(t.exact <= 1.0);
  }
}

TEST_CASE("median distance") {
  const auto m = median_distance(Pmf::point_mass(5), Pmf::point_mass(2));
  CHECK(m.distance == 3.0);
  const Pmf p({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
  CHECK(median_distance(p, p).distance == 0.0);
  CHECK(median_distance(p, p).xi_c == 1.0);
}

TEST_CASE("class score distributions") {
  const Graph g = sample_graph(ProbModel::er(150, 10.0), 7);
  const auto cn = class_score_distributions(g, {IndexKind::cn, 0.0});
  const auto emp = empirical_class_distributions(g);
  CHECK(*cn.p_c == *emp.p_c);
  CHECK(*cn.p_d == *emp.p_d);
  CHECK(cn.p_a == emp.p_a);
  CHECK(cn.chi_c == doctest::Approx(emp.chi_c));

  const auto k = class_score_distributions(g, {IndexKind::katz, 0.01});
  const auto ks = class_score_distributions(g, {IndexKind::katz, 0.01}, true);
  REQUIRE(k.p_c->size() == ks.p_c->size());
  for (std::size_t i = 0; i < k.p_c->size(); ++i)
    CHECK(ks.p_c->support()[i] == doctest::Approx(k.p_c->support()[i] - 0.01).epsilon(1e-15));
  CHECK(*ks.p_d == *k.p_d);

  CHECK_THROWS(class_score_distributions(Graph(4, std::span<const Edge>{}), {IndexKind::cn, 0.0}));
}

TEST_CASE("index names") {
  CHECK(parse_index("katz-shifted").katz_shift);
  CHECK(parse_index("lp", 0.05).spec.phi == 0.05);
  try {
    parse_index("jaccard");
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const auto& name : index_names()) CHECK(msg.find(name) != std::string::npos);
  }
}

TEST_CASE("evaluate") {
  const Graph g = sample_graph(ProbModel::er(300, 20.0), 1);
  EvaluateOptions opt;
  opt.indices = {"cn", "ra", "katz", "katz-shifted"};
  opt.split = {0.1, 1, 6};
  opt.comparisons = 5000;
  const EvalReport a = evaluate(g, opt);
  const EvalReport b = evaluate(g, opt);
  CHECK(to_json(a) == to_json(b));
  opt.threads = 3;
  CHECK(to_json(evaluate(g, opt)) == to_json(a));

  REQUIRE(a.rows.size() == 4);
  CHECK(a.L == test_set_size(g.edge_count(), 0.1));
  for (const auto& row : a.rows) {
    REQUIRE(row.auc_experimental);
    CHECK(*row.auc_experimental >= 0.0);
    CHECK(*row.auc_experimental <= 1.0);
    CHECK(row.precision.exact <= 1.0);
  }
  // Raw and shifted Katz share the experimental side.
  CHECK(*a.rows[2].auc_experimental == *a.rows[3].auc_experimental);
  CHECK(std::fabs(a.rows[0].auc_theoretical - *a.rows[0].auc_experimental) < 0.05);

  opt.theory_only = true;
  const EvalReport t = evaluate(g, opt);
  CHECK_FALSE(t.rows[0].auc_experimental);
  CHECK(t.rows[0].auc_theoretical == a.rows[0].auc_theoretical);
  const std::string table = to_text_table(t);
  CHECK(table.find("Theoretical AUC") != std::string::npos);
  CHECK(table.find("KATZ-SHIFTED") != std::string::npos);
}
