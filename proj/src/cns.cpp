#include "cnsdist/cns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "accumulate.hpp"
#include "cnsdist/kernels.hpp"
#include "cnsdist/rng.hpp"

namespace cnsdist {

// ---------------------------------------------------------------------------
// Poisson-binomial

DenseDistribution poisson_binomial_dense(std::span<const double> probabilities,
                                         double drop_below) {
  for (double p : probabilities)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("trial probability outside [0,1]");

  const auto& k = kernels::active();
  std::vector<double> buf(std::min<std::size_t>(probabilities.size(), 64) + 2, 0.0);
  buf[0] = 1.0;
  std::size_t start = 0;
  std::size_t len = 1;
  std::int64_t offset = 0;

  for (double p : probabilities) {
    if (p == 0.0 || p < drop_below) continue;
    if (p == 1.0) {
      ++offset;
      continue;
    }
    if (start + len + 1 > buf.size()) {
      if (start > 0) {
        std::copy(buf.begin() + static_cast<std::ptrdiff_t>(start),
                  buf.begin() + static_cast<std::ptrdiff_t>(start + len), buf.begin());
        start = 0;
      }
      if (len + 1 > buf.size()) buf.resize(2 * buf.size(), 0.0);
    }
    k.bernoulli_step(buf.data() + start, len, p);
    ++len;
    while (len > 1 && buf[start + len - 1] < kTailCutoff) --len;
    while (len > 1 && buf[start] < kTailCutoff) {
      ++start;
      --len;
      ++offset;
    }
  }

  DenseDistribution out;
  out.offset = offset;
  out.probs.assign(buf.begin() + static_cast<std::ptrdiff_t>(start),
                   buf.begin() + static_cast<std::ptrdiff_t>(start + len));
  return out;
}

Pmf poisson_binomial(std::span<const double> probabilities, double drop_below) {
  return poisson_binomial_dense(probabilities, drop_below).to_pmf();
}

DenseDistribution set_cns_dense(const ProbModel& model, std::span<const NodeId> members,
                                double epsilon) {
  const std::size_t n = model.n();
  std::vector<double> trials;
  trials.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (std::find(members.begin(), members.end(), t) != members.end()) continue;
    double p = 1.0;
    for (NodeId v : members) {
      p *= model.gamma(v, t);
      if (p == 0.0) break;
    }
    trials.push_back(p);
  }
  return poisson_binomial_dense(trials, epsilon);
}

Pmf set_cns_distribution(const ProbModel& model, const NodeSet& set, double epsilon) {
  if (set.members().back() >= model.n()) throw std::out_of_range("node set member out of range");
  return set_cns_dense(model, set.members(), epsilon).to_pmf();
}

// ---------------------------------------------------------------------------
// Class-conditional accumulation

namespace {

/// Weighted sums of per-set distributions for the three classes.
struct ClassSums {
  detail::TreeSum c, d, a;
  double weight_c = 0.0;
  double weight_sets = 0.0;

  // Row-level partial sums that are pushed into the trees as one input.
  struct Partial {
    std::vector<double> c, d, a;
    double weight_c = 0.0;
    double sets = 0.0;

    void add(const DenseDistribution& dist, double connected, double multiplicity) {
      const auto off = static_cast<std::size_t>(dist.offset);
      const std::size_t len = dist.probs.size();
      detail::add_scaled(c, dist.probs.data(), len, off, multiplicity * connected);
      detail::add_scaled(d, dist.probs.data(), len, off, multiplicity * (1.0 - connected));
      detail::add_scaled(a, dist.probs.data(), len, off, multiplicity);
      weight_c += multiplicity * connected;
      sets += multiplicity;
    }
  };

  void push(Partial&& p) {
    c.add(std::move(p.c));
    d.add(std::move(p.d));
    a.add(std::move(p.a));
    weight_c += p.weight_c;
    weight_sets += p.sets;
  }

  ClassCondDistributions finish(std::size_t q, double chi_c) const {
    ClassCondDistributions out;
    out.q = q;
    out.chi_c = chi_c;
    auto to_pmf = [](const std::vector<double>& v) -> std::optional<Pmf> {
      double s = 0.0;
      for (double x : v) s += x;
      if (!(s > 0.0)) return std::nullopt;
      return Pmf::from_dense(v, 0);
    };
    out.p_c = to_pmf(c.result());
    out.p_d = to_pmf(d.result());
    auto pa = to_pmf(a.result());
    if (!pa) throw std::logic_error("no node sets accumulated");
    out.p_a = std::move(*pa);
    return out;
  }
};

double pair_count(std::size_t n) { return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0; }

double binomial_count(std::size_t n, std::size_t q) {
  double c = 1.0;
  for (std::size_t i = 0; i < q; ++i)
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

double clique_probability(const ProbModel& model, std::span<const NodeId> set) {
  double w = 1.0;
  for (std::size_t x = 0; x < set.size(); ++x)
    for (std::size_t y = x + 1; y < set.size(); ++y) w *= model.gamma(set[x], set[y]);
  return w;
}

std::vector<NodeId> draw_set(std::size_t n, std::size_t q, std::uint64_t seed, std::uint64_t task) {
  Engine eng = make_engine(seed, task);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<NodeId> s;
  while (s.size() < q) {
    const NodeId v = pick(eng);
    if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
  }
  std::sort(s.begin(), s.end());
  return s;
}

/// Calls fn(set) for each q-subset of 0..n-1 in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t q, F&& fn) {
  std::vector<NodeId> s(q);
  for (std::size_t i = 0; i < q; ++i) s[i] = static_cast<NodeId>(i);
  while (true) {
    fn(std::span<const NodeId>(s));
    std::size_t i = q;
    while (i > 0 && s[i - 1] == n - q + i - 1) --i;
    if (i == 0) return;
    ++s[i - 1];
    for (std::size_t j = i; j < q; ++j) s[j] = s[j - 1] + 1;
  }
}

ClassCondDistributions degree_distribution_analytic(const ProbModel& model, double eps) {
  const std::size_t n = model.n();
  ClassSums sums;
  const std::size_t reps = model.ring_symmetric() ? 1 : n;
  for (std::size_t v = 0; v < reps; ++v) {
    ClassSums::Partial part;
    const NodeId member = static_cast<NodeId>(v);
    part.add(set_cns_dense(model, std::span<const NodeId>(&member, 1), eps), 0.0,
             model.ring_symmetric() ? static_cast<double>(n) : 1.0);
    sums.push(std::move(part));
  }
  auto out = sums.finish(1, model.expected_edges() / pair_count(n));
  out.p_c.reset();
  out.p_d.reset();
  return out;
}

ClassCondDistributions pairs_ring_symmetric(const ProbModel& model, double eps) {
  const std::size_t n = model.n();
  std::map<std::pair<std::size_t, std::size_t>, DenseDistribution> cache;
  ClassSums sums;
  for (std::size_t d = 1; d <= n / 2; ++d) {
    const RingPairTypes types = ring_pair_types(d, n, model.m());
    auto key = std::make_pair(types.both, types.one);
    auto it = cache.find(key);
    if (it == cache.end()) {
      const NodeId pair[2] = {0, static_cast<NodeId>(d)};
      it = cache.emplace(key, set_cns_dense(model, pair, eps)).first;
    }
    const double multiplicity = (2 * d == n) ? static_cast<double>(n / 2) : static_cast<double>(n);
    ClassSums::Partial part;
    part.add(it->second, model.gamma(0, d), multiplicity);
    sums.push(std::move(part));
  }
  return sums.finish(2, sums.weight_c / sums.weight_sets);
}

ClassCondDistributions pairs_full(const ProbModel& model, double eps, unsigned threads) {
  const std::size_t n = model.n();
  // Dense symmetric copy for contiguous row access.
  std::vector<double> gamma(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) gamma[i * n + j] = gamma[j * n + i] = model.gamma(i, j);

  ClassSums sums;
  constexpr std::size_t kBlock = 64;
  std::vector<ClassSums::Partial> rows;
  for (std::size_t block = 0; block < n; block += kBlock) {
    const std::size_t end = std::min(n, block + kBlock);
    rows.assign(end - block, {});
    detail::parallel_for(block, end, threads, [&](std::size_t i) {
      ClassSums::Partial& part = rows[i - block];
      std::vector<double> trials(n);
      const double* gi = gamma.data() + i * n;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double* gj = gamma.data() + j * n;
        for (std::size_t t = 0; t < n; ++t) trials[t] = gi[t] * gj[t];
        // gi[i] = gj[j] = 0 removes the pair itself from the trials.
        part.add(poisson_binomial_dense(trials, eps), gi[j], 1.0);
      }
    });
    for (auto& part : rows)
      if (part.sets > 0.0) sums.push(std::move(part));
  }
  return sums.finish(2, sums.weight_c / sums.weight_sets);
}

ClassCondDistributions sets_exact(const ProbModel& model, std::size_t q, double eps) {
  const std::size_t n = model.n();
  ClassSums sums;
  if (model.exchangeable()) {
    std::vector<NodeId> rep(q);
    for (std::size_t i = 0; i < q; ++i) rep[i] = static_cast<NodeId>(i);
    ClassSums::Partial part;
    part.add(set_cns_dense(model, rep, eps), clique_probability(model, rep), binomial_count(n, q));
    sums.push(std::move(part));
  } else {
    if (binomial_count(n, q) > 2e6)
      throw std::invalid_argument("exact enumeration of node sets is too large; use sampled mode");
    ClassSums::Partial part;
    std::size_t in_part = 0;
    for_each_subset(n, q, [&](std::span<const NodeId> set) {
      part.add(set_cns_dense(model, set, eps), clique_probability(model, set), 1.0);
      if (++in_part == 256) {
        sums.push(std::move(part));
        part = {};
        in_part = 0;
      }
    });
    if (in_part) sums.push(std::move(part));
  }
  return sums.finish(q, sums.weight_c / sums.weight_sets);
}

ClassCondDistributions sets_sampled(const ProbModel& model, const AnalyticOptions& opt) {
  if (opt.sample_count == 0) throw std::invalid_argument("sampled mode needs sample_count > 0");
  if (opt.q > model.n()) throw std::invalid_argument("set size exceeds node count");
  ClassSums sums;
  constexpr std::size_t kBlock = 256;
  std::vector<ClassSums::Partial> parts;
  for (std::size_t block = 0; block < opt.sample_count; block += kBlock * 16) {
    const std::size_t end = std::min(opt.sample_count, block + kBlock * 16);
    const std::size_t nparts = (end - block + kBlock - 1) / kBlock;
    parts.assign(nparts, {});
    detail::parallel_for(0, nparts, opt.threads, [&](std::size_t k) {
      const std::size_t lo = block + k * kBlock;
      const std::size_t hi = std::min(end, lo + kBlock);
      for (std::size_t task = lo; task < hi; ++task) {
        const auto set = draw_set(model.n(), opt.q, opt.seed, task);
        parts[k].add(set_cns_dense(model, set, opt.epsilon), clique_probability(model, set), 1.0);
      }
    });
    for (auto& p : parts) sums.push(std::move(p));
  }
  return sums.finish(opt.q, sums.weight_c / sums.weight_sets);
}

}  // namespace

double ClassCondDistributions::mixture_residual() const {
  const Pmf empty;
  const Pmf& c = p_c ? *p_c : empty;
  const Pmf& d = p_d ? *p_d : empty;
  std::vector<double> grid;
  for (const Pmf* p : {&c, &d, &p_a}) grid.insert(grid.end(), p->support().begin(), p->support().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double worst = 0.0;
  for (double w : grid) {
    const double r = p_a.at(w) - chi_c * c.at(w) - (1.0 - chi_c) * d.at(w);
    worst = std::max(worst, std::fabs(r));
  }
  return worst;
}

ClassCondDistributions class_distributions_analytic(const ProbModel& model,
                                                    const AnalyticOptions& options) {
  if (options.q == 0) throw std::invalid_argument("set size q must be >= 1");
  if (options.q > model.n()) throw std::invalid_argument("set size exceeds node count");
  if (options.mode == SetEnumeration::sampled && options.sample_count == 0)
    throw std::invalid_argument("sampled mode needs sample_count > 0");
  if (options.q == 1) return degree_distribution_analytic(model, options.epsilon);
  if (options.mode == SetEnumeration::sampled) return sets_sampled(model, options);
  if (options.q == 2) {
    if (model.ring_symmetric()) return pairs_ring_symmetric(model, options.epsilon);
    return pairs_full(model, options.epsilon, options.threads);
  }
  return sets_exact(model, options.q, options.epsilon);
}

// ---------------------------------------------------------------------------
// Empirical

namespace {

ClassCondDistributions from_counts(std::size_t q, std::vector<std::uint64_t> cc,
                                   std::vector<std::uint64_t> cd) {
  const std::size_t len = std::max(cc.size(), cd.size());
  cc.resize(len, 0);
  cd.resize(len, 0);
  std::vector<std::uint64_t> ca(len);
  std::uint64_t nc = 0, nd = 0;
  for (std::size_t w = 0; w < len; ++w) {
    ca[w] = cc[w] + cd[w];
    nc += cc[w];
    nd += cd[w];
  }
  auto to_pmf = [](const std::vector<std::uint64_t>& counts) {
    std::vector<double> v(counts.begin(), counts.end());
    return Pmf::from_dense(v, 0);
  };
  ClassCondDistributions out;
  out.q = q;
  out.chi_c = static_cast<double>(nc) / static_cast<double>(nc + nd);
  if (nc) out.p_c = to_pmf(cc);
  if (nd) out.p_d = to_pmf(cd);
  out.p_a = to_pmf(ca);
  out.count_c = std::move(cc);
  out.count_d = std::move(cd);
  out.count_a = std::move(ca);
  return out;
}

void bump(std::vector<std::uint64_t>& h, std::size_t w, std::uint64_t by = 1) {
  if (h.size() <= w) h.resize(w + 1, 0);
  h[w] += by;
}

}  // namespace

ClassCondDistributions empirical_class_distributions(const Graph& g,
                                                     const EmpiricalOptions& options) {
  const std::size_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("graph is empty");
  const std::size_t q = options.q;
  if (q == 0 || q > n) throw std::invalid_argument("set size q must lie in [1, n]");

  if (q == 1) {
    std::vector<std::uint64_t> deg;
    for (std::size_t v = 0; v < n; ++v) bump(deg, g.degree(static_cast<NodeId>(v)));
    auto out = from_counts(1, {}, deg);
    out.p_d.reset();
    out.count_d.clear();
    out.count_c.clear();
    out.chi_c = 2.0 * static_cast<double>(g.edge_count()) /
                (static_cast<double>(n) * static_cast<double>(n - 1));
    return out;
  }

  std::vector<std::uint64_t> cc, cd;
  if (q == 2) {
    // Two-hop counting: cnt[v] = |adj(u) ∩ adj(v)| for v > u.
    std::vector<std::uint32_t> cnt(n, 0);
    std::vector<NodeId> touched;
    std::uint64_t unconnected_nonzero = 0;
    for (NodeId u = 0; u < n; ++u) {
      touched.clear();
      for (NodeId z : g.neighbors(u))
        for (NodeId v : g.neighbors(z)) {
          if (v <= u) continue;
          if (cnt[v]++ == 0) touched.push_back(v);
        }
      for (NodeId v : g.neighbors(u))
        if (v > u) bump(cc, cnt[v]);
      for (NodeId v : touched) {
        if (!g.has_edge(u, v)) {
          bump(cd, cnt[v]);
          ++unconnected_nonzero;
        }
        cnt[v] = 0;
      }
    }
    const std::uint64_t unconnected = g.pair_count() - g.edge_count();
    bump(cd, 0, unconnected - unconnected_nonzero);
    return from_counts(2, std::move(cc), std::move(cd));
  }

  auto visit = [&](std::span<const NodeId> set) {
    bool clique = true;
    for (std::size_t x = 0; x < set.size() && clique; ++x)
      for (std::size_t y = x + 1; y < set.size() && clique; ++y)
        clique = g.has_edge(set[x], set[y]);
    const std::size_t w = cns(g, NodeSet(std::vector<NodeId>(set.begin(), set.end()), n));
    bump(clique ? cc : cd, w);
  };
  if (binomial_count(n, q) <= static_cast<double>(options.sample_count)) {
    for_each_subset(n, q, visit);
  } else {
    if (options.sample_count == 0) throw std::invalid_argument("sample_count must be positive");
    for (std::size_t task = 0; task < options.sample_count; ++task)
      visit(draw_set(n, q, options.seed, task));
  }
  return from_counts(q, std::move(cc), std::move(cd));
}

// ---------------------------------------------------------------------------
// Closed forms

std::vector<double> binomial_coefficients(std::size_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
  std::vector<double> out(trials + 1, 0.0);
  if (p == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (p == 1.0) {
    out[trials] = 1.0;
    return out;
  }
  const double nn = static_cast<double>(trials);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lfn = std::lgamma(nn + 1.0);
  for (std::size_t w = 0; w <= trials; ++w) {
    const double ww = static_cast<double>(w);
    out[w] = std::exp(lfn - std::lgamma(ww + 1.0) - std::lgamma(nn - ww + 1.0) + ww * lp +
                      (nn - ww) * lq);
  }
  return out;
}

ErClosedForm er_closed_form(std::size_t n, double mean_degree, std::size_t q) {
  if (q == 0 || q >= n) throw std::invalid_argument("set size must satisfy 1 <= q < n");
  if (!(mean_degree >= 0.0 && mean_degree < static_cast<double>(n - 1)))
    throw std::invalid_argument("mean degree must lie in [0, n-1)");
  ErClosedForm out;
  const double nn = static_cast<double>(n);
  const double qq = static_cast<double>(q);
  out.lambda = std::pow(mean_degree, qq) * std::pow(nn, 1.0 - qq);
  const double p = std::pow(mean_degree / (nn - 1.0), qq);
  out.exact = Pmf::from_dense(binomial_coefficients(n - q, p), 0);

  std::vector<double> pois;
  if (out.lambda == 0.0) {
    pois.push_back(1.0);
  } else {
    const double ll = std::log(out.lambda);
    for (std::size_t w = 0;; ++w) {
      const double ww = static_cast<double>(w);
      const double v = std::exp(-out.lambda + ww * ll - std::lgamma(ww + 1.0));
      pois.push_back(v);
      if (ww > out.lambda && v < 1e-300) break;
    }
  }
  out.poisson = Pmf::from_dense(pois, 0);
  return out;
}

namespace {

std::vector<double> convolve_dense(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    detail::add_scaled(out, b.data(), b.size(), i, a[i]);
  }
  return out;
}

void require_ring(const ProbModel& model) {
  if (!model.ring_symmetric())
    throw std::invalid_argument("closed form needs a ring-symmetric model");
}

}  // namespace

Pmf ring_pair_closed_form(const ProbModel& model, NodeId i, NodeId j) {
  require_ring(model);
  if (i == j) throw std::invalid_argument("pair needs two distinct nodes");
  const RingPairTypes t = ring_pair_types(ring_distance(i, j, model.n()), model.n(), model.m());
  const double eta = model.eta(), alpha = model.alpha();
  auto dense = convolve_dense(binomial_coefficients(t.both, eta * eta),
                              binomial_coefficients(t.one, eta * alpha));
  dense = convolve_dense(dense, binomial_coefficients(t.neither, alpha * alpha));
  return Pmf::from_dense(dense, 0);
}

Pmf ring_convolution_approximation(const ProbModel& model, NodeId i, NodeId j) {
  if (model.kind() != ModelKind::ws && model.kind() != ModelKind::nw)
    throw std::invalid_argument("convolution approximation applies to WS and NW models");
  if (i == j) throw std::invalid_argument("pair needs two distinct nodes");
  const std::size_t n = model.n();
  const RingPairTypes t = ring_pair_types(ring_distance(i, j, n), n, model.m());
  // WS: MRL with eta = 1 - p; NW: RRL (eta = 1). ER with p^E = alpha.
  const double eta = model.eta();
  const double alpha = model.alpha();
  return Pmf::from_dense(convolve_dense(binomial_coefficients(t.both, eta * eta),
                                        binomial_coefficients(n - 2, alpha * alpha)),
                         0);
}

ConvolutionGap convolution_gap(const ProbModel& model) {
  if (model.kind() != ModelKind::ws && model.kind() != ModelKind::nw)
    throw std::invalid_argument("convolution gap applies to WS and NW models");
  const std::size_t n = model.n();
  ConvolutionGap gap;
  std::vector<double> ec, ac, ea, aa;
  for (std::size_t d = 1; d <= n / 2; ++d) {
    const NodeId pair[2] = {0, static_cast<NodeId>(d)};
    const Pmf exact = set_cns_dense(model, pair, 0.0).to_pmf();
    const Pmf approx = ring_convolution_approximation(model, 0, static_cast<NodeId>(d));
    gap.max_pair_tv = std::max(gap.max_pair_tv, total_variation(exact, approx));
    const double mult = (2 * d == n) ? static_cast<double>(n / 2) : static_cast<double>(n);
    const double g = model.gamma(0, d);
    const auto de = exact.dense(0);
    const auto da = approx.dense(0);
    detail::add_scaled(ec, de.data(), de.size(), 0, mult * g);
    detail::add_scaled(ac, da.data(), da.size(), 0, mult * g);
    detail::add_scaled(ea, de.data(), de.size(), 0, mult);
    detail::add_scaled(aa, da.data(), da.size(), 0, mult);
  }
  gap.connected_tv = total_variation(Pmf::from_dense(ec), Pmf::from_dense(ac));
  gap.all_pairs_tv = total_variation(Pmf::from_dense(ea), Pmf::from_dense(aa));
  return gap;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json pmf_json(const std::optional<Pmf>& p) {
  if (!p) return nullptr;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < p->size(); ++i) arr.push_back({p->support()[i], p->probs()[i]});
  return arr;
}

std::optional<Pmf> pmf_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  std::vector<double> s, pr;
  for (const auto& e : j) {
    s.push_back(e.at(0).get<double>());
    pr.push_back(e.at(1).get<double>());
  }
  return Pmf(std::move(s), std::move(pr));
}

}  // namespace

std::string to_json(const ClassCondDistributions& d, int indent) {
  nlohmann::json j;
  j["q"] = d.q;
  j["chi_c"] = d.chi_c;
  j["p_c"] = pmf_json(d.p_c);
  j["p_d"] = pmf_json(d.p_d);
  j["p_a"] = pmf_json(d.p_a);
  return j.dump(indent);
}

ClassCondDistributions class_distributions_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ClassCondDistributions d;
  d.q = j.value("q", std::size_t{2});
  d.chi_c = j.at("chi_c").get<double>();
  d.p_c = pmf_from_json(j.at("p_c"));
  d.p_d = pmf_from_json(j.at("p_d"));
  auto pa = pmf_from_json(j.at("p_a"));
  if (!pa) throw std::invalid_argument("p_a is required");
  d.p_a = std::move(*pa);
  return d;
}

}  // namespace cnsdist
