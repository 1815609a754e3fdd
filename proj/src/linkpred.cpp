#include "cnsdist/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "accumulate.hpp"
#include "cnsdist/rng.hpp"
#include "json.hpp"

namespace cnsdist {

namespace {

constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;
constexpr std::uint64_t kCompareStream = 0x415543ULL;

// Uniform index in [0, bound) by multiply-shift; portable across standard
// libraries, unlike uniform_int_distribution.
std::uint64_t uniform_index(Engine& eng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng()) * bound) >> 64);
}

bool in_sorted(std::span<const Edge> edges, NodeId u, NodeId v) {
  return std::binary_search(edges.begin(), edges.end(), Edge{u, v});
}

struct Aligned {
  std::vector<double> x, c, d;
};

// Both distributions on one ascending grid; values equal under same_value()
// share a grid point.
Aligned align(const Pmf& c, const Pmf& d) {
  struct Entry {
    double x;
    int cls;
    double p;
  };
  std::vector<Entry> all;
  all.reserve(c.size() + d.size());
  for (std::size_t i = 0; i < c.size(); ++i) all.push_back({c.support()[i], 0, c.probs()[i]});
  for (std::size_t i = 0; i < d.size(); ++i) all.push_back({d.support()[i], 1, d.probs()[i]});
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.x < b.x; });
  Aligned out;
  for (std::size_t i = 0; i < all.size();) {
    const double anchor = all[i].x;
    double mc = 0.0, md = 0.0;
    std::size_t j = i;
    for (; j < all.size() && same_value(anchor, all[j].x); ++j) (all[j].cls == 0 ? mc : md) += all[j].p;
    out.x.push_back(anchor);
    out.c.push_back(mc);
    out.d.push_back(md);
    i = j;
  }
  return out;
}

}  // namespace

std::size_t test_set_size(std::size_t edge_count, double epsilon) {
  return static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(edge_count) - 1e-9));
}

Split split(const Graph& g, const SplitSpec& spec, std::size_t repetition) {
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0))
    throw std::invalid_argument("epsilon must lie in (0,1)");
  const std::size_t m = g.edge_count();
  const std::size_t k = test_set_size(m, spec.epsilon);
  if (k == 0) throw std::invalid_argument("test set would be empty");
  if (k >= m) throw std::invalid_argument("test set would take every link");

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Engine eng = make_engine(derive_seed(spec.seed, repetition), kSplitStream);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(eng, m - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<char> is_test(m, 0);
  for (std::size_t i = 0; i < k; ++i) is_test[idx[i]] = 1;

  Split out;
  std::vector<Edge> keep;
  keep.reserve(m - k);
  out.test.reserve(k);
  auto edges = g.edges();
  for (std::size_t e = 0; e < m; ++e) (is_test[e] ? out.test : keep).push_back(edges[e]);
  out.training = Graph(g.node_count(), std::span<const Edge>(keep));
  return out;
}

double auc_from_counts(std::size_t n, std::size_t higher, std::size_t tied) {
  if (n == 0) throw std::invalid_argument("no comparisons");
  return (static_cast<double>(higher) + 0.5 * static_cast<double>(tied)) / static_cast<double>(n);
}

double auc_experimental(const Graph& training, std::span<const Edge> test,
                        const PairScores& scores, std::size_t comparisons, std::uint64_t seed) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  const std::size_t n = training.node_count();
  const std::uint64_t never = training.pair_count() - training.edge_count() - test.size();
  if (never == 0) throw std::invalid_argument("no never-connected pairs to compare against");
  Engine eng = make_engine(seed, kCompareStream);
  std::size_t higher = 0, tied = 0;
  for (std::size_t t = 0; t < comparisons; ++t) {
    const Edge& missing = test[uniform_index(eng, test.size())];
    NodeId u, v;
    do {
      u = static_cast<NodeId>(uniform_index(eng, n));
      v = static_cast<NodeId>(uniform_index(eng, n));
      if (u > v) std::swap(u, v);
    } while (u == v || training.has_edge(u, v) || in_sorted(test, u, v));
    const double sm = scores(missing.u, missing.v);
    const double sn = scores(u, v);
    if (same_value(sm, sn))
      ++tied;
    else if (sm > sn)
      ++higher;
  }
  return auc_from_counts(comparisons, higher, tied);
}

double auc_experimental(const Graph& training, std::span<const Edge> test, const IndexSpec& index,
                        std::size_t comparisons, std::uint64_t seed) {
  return auc_experimental(training, test, all_pair_scores(training, index), comparisons, seed);
}

double precision_experimental(const Graph& training, std::span<const Edge> test,
                              const PairScores& scores, std::size_t L) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  if (L == 0) L = test.size();
  std::vector<double> vals;
  std::vector<char> hit;
  vals.reserve(training.pair_count() - training.edge_count());
  hit.reserve(vals.capacity());
  std::size_t next_test = 0;
  pair_classes(training).for_each_unconnected([&](NodeId u, NodeId v) {
    const bool is_test = next_test < test.size() && test[next_test].u == u && test[next_test].v == v;
    if (is_test) ++next_test;
    vals.push_back(scores(u, v));
    hit.push_back(is_test ? 1 : 0);
  });
  if (next_test != test.size()) throw std::invalid_argument("test pairs must be unlinked in training");
  if (L > vals.size()) throw std::invalid_argument("L exceeds the number of unlinked pairs");

  std::vector<double> order = vals;
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(L - 1), order.end(),
                   std::greater<>());
  const double cut = order[L - 1];
  std::size_t above = 0, above_hits = 0, tied = 0, tied_hits = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (same_value(vals[i], cut)) {
      ++tied;
      tied_hits += hit[i];
    } else if (vals[i] > cut) {
      ++above;
      above_hits += hit[i];
    }
  }
  const double from_ties =
      static_cast<double>(L - above) * static_cast<double>(tied_hits) / static_cast<double>(tied);
  return (static_cast<double>(above_hits) + from_ties) / static_cast<double>(L);
}

double precision_experimental(const Graph& training, std::span<const Edge> test,
                              const IndexSpec& index, std::size_t L) {
  return precision_experimental(training, test, all_pair_scores(training, index), L);
}

ClassCondDistributions class_score_distributions(const Graph& g, const IndexSpec& index,
                                                 bool katz_shift, const KatzOptions& katz) {
  if (g.edge_count() == 0) throw std::invalid_argument("graph has no linked pairs");
  const ScoreTable t = score_table(g, index, katz);
  std::vector<double> c, d, a;
  c.reserve(t.connected.size());
  d.reserve(t.unconnected.size());
  for (const auto& s : t.connected) c.push_back(s.score);
  for (const auto& s : t.unconnected) d.push_back(s.score);
  a = c;
  a.insert(a.end(), d.begin(), d.end());

  ClassCondDistributions out;
  out.q = 2;
  out.chi_c = static_cast<double>(c.size()) / static_cast<double>(a.size());
  out.p_c = Pmf::from_samples(std::move(c));
  if (katz_shift && index.kind == IndexKind::katz) out.p_c = katz_connected_shift(*out.p_c, index.phi);
  if (!d.empty()) out.p_d = Pmf::from_samples(std::move(d));
  out.p_a = Pmf::from_samples(std::move(a));
  return out;
}

double auc_theoretical(const Pmf& p_c, const Pmf& p_d) {
  const Aligned g = align(p_c, p_d);
  // With A = Σ c(x) D(<x) and B = Σ d(x) C(<x), A + B + Σ c d = 1, so
  // Σ c (D(<x) + d/2) = 1/2 + (A - B)/2. This form is exactly 1/2 when c = d.
  double a = 0.0, b = 0.0, cum_c = 0.0, cum_d = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    a += g.c[i] * cum_d;
    b += g.d[i] * cum_c;
    cum_c += g.c[i];
    cum_d += g.d[i];
  }
  return 0.5 + 0.5 * (a - b);
}

PrecisionTheory precision_theoretical(const Pmf& p_c, const Pmf& p_d, std::size_t n,
                                      double mean_degree, double epsilon, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  const double nn = static_cast<double>(n);
  const double scale_c = epsilon * nn * mean_degree / 2.0;
  const double scale_d = nn * (nn - 1.0 - mean_degree) / 2.0;
  const Aligned g = align(p_c, p_d);

  double phi_c = 0.0, phi_d = 0.0;  // mass strictly above the current value
  for (std::size_t k = g.x.size(); k-- > 0;) {
    const double bin_c = scale_c * g.c[k];
    const double bin_d = scale_d * g.d[k];
    const double above = phi_c + phi_d;
    if (above + bin_c + bin_d >= L) {
      PrecisionTheory r;
      r.threshold = g.x[k];
      r.exact = (phi_c + bin_c * (L - above) / (bin_c + bin_d)) / L;
      r.loose = (phi_c + bin_c) / (above + bin_c + bin_d);
      r.loose_above = above > 0.0 ? phi_c / above : bin_c / (bin_c + bin_d);
      return r;
    }
    phi_c += bin_c;
    phi_d += bin_d;
  }
  throw std::invalid_argument("L exceeds the total mass of unlinked pairs");
}

MedianDistance median_distance(const Pmf& p_c, const Pmf& p_d) {
  MedianDistance m;
  m.xi_c = p_c.median();
  m.xi_d = p_d.median();
  m.distance = m.xi_c - m.xi_d;
  return m;
}

const std::vector<std::string>& index_names() {
  static const std::vector<std::string> names{"cn", "ra", "aa", "lp", "katz", "katz-shifted"};
  return names;
}

NamedIndex parse_index(const std::string& name, double lp_phi, double katz_phi) {
  if (name == "cn") return {name, {IndexKind::cn, 0.0}, false};
  if (name == "ra") return {name, {IndexKind::ra, 0.0}, false};
  if (name == "aa") return {name, {IndexKind::aa, 0.0}, false};
  if (name == "lp") return {name, {IndexKind::lp, lp_phi}, false};
  if (name == "katz") return {name, {IndexKind::katz, katz_phi}, false};
  if (name == "katz-shifted") return {name, {IndexKind::katz, katz_phi}, true};
  std::string valid;
  for (const auto& s : index_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown index '" + name + "' (valid: " + valid + ")");
}

EvalReport evaluate(const Graph& g, const EvaluateOptions& options) {
  std::vector<NamedIndex> indices;
  for (const auto& name : options.indices)
    indices.push_back(parse_index(name, options.lp_phi, options.katz_phi));
  if (indices.empty()) throw std::invalid_argument("no indices requested");

  EvalReport report;
  report.nodes = g.node_count();
  report.links = g.edge_count();
  report.mean_degree = g.mean_degree();
  report.options = options;
  report.L = options.L ? options.L : test_set_size(g.edge_count(), options.split.epsilon);
  if (report.L == 0) throw std::invalid_argument("test set would be empty");

  for (const auto& idx : indices) {
    IndexReport row;
    row.name = idx.name;
    const auto dist = class_score_distributions(g, idx.spec, idx.katz_shift);
    if (!dist.p_d) throw std::invalid_argument("graph is complete; nothing to predict");
    row.auc_theoretical = auc_theoretical(*dist.p_c, *dist.p_d);
    row.precision = precision_theoretical(*dist.p_c, *dist.p_d, g.node_count(), report.mean_degree,
                                          options.split.epsilon, static_cast<double>(report.L));
    row.medians = median_distance(*dist.p_c, *dist.p_d);
    report.rows.push_back(std::move(row));
  }
  if (options.theory_only) return report;

  // Scores depend only on (kind, phi); raw and shifted Katz share them.
  std::vector<std::size_t> score_slot(indices.size());
  std::vector<IndexSpec> specs;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& s = indices[i].spec;
    auto it = std::find_if(specs.begin(), specs.end(),
                           [&](const IndexSpec& t) { return t.kind == s.kind && t.phi == s.phi; });
    score_slot[i] = static_cast<std::size_t>(it - specs.begin());
    if (it == specs.end()) specs.push_back(s);
  }

  const std::size_t reps = options.split.repetitions;
  if (reps == 0) throw std::invalid_argument("repetitions must be positive");
  std::vector<std::vector<double>> auc(reps, std::vector<double>(specs.size()));
  std::vector<std::vector<double>> prec(reps, std::vector<double>(specs.size()));
  detail::parallel_for(0, reps, options.threads, [&](std::size_t rep) {
    const Split s = split(g, options.split, rep);
    const std::uint64_t cmp_seed = derive_seed(options.split.seed, rep);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const PairScores scores = all_pair_scores(s.training, specs[k]);
      auc[rep][k] = auc_experimental(s.training, s.test, scores, options.comparisons, cmp_seed);
      prec[rep][k] = precision_experimental(s.training, s.test, scores, report.L);
    }
  });
  for (std::size_t i = 0; i < indices.size(); ++i) {
    double sa = 0.0, sp = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      sa += auc[rep][score_slot[i]];
      sp += prec[rep][score_slot[i]];
    }
    report.rows[i].auc_experimental = sa / static_cast<double>(reps);
    report.rows[i].precision_experimental = sp / static_cast<double>(reps);
  }
  return report;
}

std::string to_json(const EvalReport& r, int indent) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["nodes"] = r.nodes;
  j["links"] = r.links;
  j["mean_degree"] = r.mean_degree;
  j["L"] = r.L;
  j["epsilon"] = r.options.split.epsilon;
  j["repetitions"] = r.options.split.repetitions;
  j["seed"] = r.options.split.seed;
  j["comparisons"] = r.options.comparisons;
  j["theory_only"] = r.options.theory_only;
  j["lp_phi"] = r.options.lp_phi;
  j["katz_phi"] = r.options.katz_phi;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json e;
    e["index"] = row.name;
    e["auc_experimental"] = row.auc_experimental ? ordered_json(*row.auc_experimental) : ordered_json();
    e["auc_theoretical"] = row.auc_theoretical;
    e["precision_experimental"] =
        row.precision_experimental ? ordered_json(*row.precision_experimental) : ordered_json();
    e["precision_theoretical"] = row.precision.exact;
    e["precision_loose"] = row.precision.loose;
    e["threshold"] = row.precision.threshold;
    e["xi_c"] = row.medians.xi_c;
    e["xi_d"] = row.medians.xi_d;
    e["median_distance"] = row.medians.distance;
    rows.push_back(std::move(e));
  }
  j["indices"] = std::move(rows);
  return j.dump(indent);
}

std::string to_text_table(const EvalReport& r) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "nodes: %zu, links: %zu, <k> = %.4g, L = %zu", r.nodes, r.links,
                r.mean_degree, r.L);
  out += buf;
  out += '\n';
  constexpr int label_w = 24, col_w = 14;
  std::snprintf(buf, sizeof buf, "%-*s", label_w, "");
  out += buf;
  for (const auto& row : r.rows) {
    std::string upper = row.name;
    for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    std::snprintf(buf, sizeof buf, "%*s", col_w, upper.c_str());
    out += buf;
  }
  out += '\n';
  auto line = [&](const char* label, auto get) {
    std::snprintf(buf, sizeof buf, "%-*s", label_w, label);
    out += buf;
    for (const auto& row : r.rows) {
      const std::optional<double> v = get(row);
      if (v)
        std::snprintf(buf, sizeof buf, "%*.3f", col_w, *v);
      else
        std::snprintf(buf, sizeof buf, "%*s", col_w, "-");
      out += buf;
    }
    out += '\n';
  };
  using O = std::optional<double>;
  line("Experimental AUC", [](const IndexReport& x) { return x.auc_experimental; });
  line("Theoretical AUC", [](const IndexReport& x) { return O(x.auc_theoretical); });
  line("Experimental Precision", [](const IndexReport& x) { return x.precision_experimental; });
  line("Theoretical Precision", [](const IndexReport& x) { return O(x.precision.exact); });
  line("Loose Precision", [](const IndexReport& x) { return O(x.precision.loose); });
  line("Median (linked)", [](const IndexReport& x) { return O(x.medians.xi_c); });
  line("Median (unlinked)", [](const IndexReport& x) { return O(x.medians.xi_d); });
  line("Median distance", [](const IndexReport& x) { return O(x.medians.distance); });
  return out;
}

}  // namespace cnsdist
