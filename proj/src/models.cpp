#include "cnsdist/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "cnsdist/error.hpp"
#include "cnsdist/rng.hpp"

namespace cnsdist {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::rrl: return "rrl";
    case ModelKind::mrl: return "mrl";
    case ModelKind::er: return "er";
    case ModelKind::ws: return "ws";
    case ModelKind::nw: return "nw";
    case ModelKind::unified: return "unified";
    case ModelKind::ba: return "ba";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::rrl, ModelKind::mrl, ModelKind::er, ModelKind::ws, ModelKind::nw,
                      ModelKind::unified, ModelKind::ba})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown model kind '" + std::string(name) +
                              "' (expected rrl, mrl, er, ws, nw, unified, ba)");
}

std::size_t ring_distance(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= n || j >= n) throw std::out_of_range("node id out of range");
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}

namespace {

void check_ring(std::size_t n, std::size_t m) {
  if (n < 4 * m + 2)
    throw std::invalid_argument("ring models need n >= 4m+2 (n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ")");
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

RingPairTypes ring_pair_types(std::size_t d, std::size_t n, std::size_t m) {
  check_ring(n, m);
  if (d == 0 || d > n / 2) throw std::invalid_argument("ring distance must be in [1, n/2]");
  RingPairTypes t;
  if (d <= m) {
    // Both endpoints lie inside each other's window; each window holds 2m-1
    // nodes besides the pair itself.
    t.both = 2 * m - 1 - d;
    t.one = 2 * (2 * m - 1) - 2 * t.both;
  } else if (d <= 2 * m) {
    t.both = 2 * m + 1 - d;
    t.one = 4 * m - 2 * t.both;
  } else {
    t.one = 4 * m;
  }
  t.neither = n - 2 - t.both - t.one;
  return t;
}

std::size_t s_count(std::size_t i, std::size_t j, std::size_t n, std::size_t m) {
  if (i == j) throw std::invalid_argument("s_count needs two distinct nodes");
  return ring_pair_types(ring_distance(i, j, n), n, m).both;
}

double gamma_unified(std::size_t i, std::size_t j, std::size_t n, std::size_t m, double eta,
                     double alpha) {
  check_ring(n, m);
  check_probability(eta, "eta");
  check_probability(alpha, "alpha");
  if (i == j) throw std::invalid_argument("connection probability needs i != j");
  return ring_distance(i, j, n) <= m ? eta : alpha;
}

// ---------------------------------------------------------------------------
// Growth model

double BaGammaMatrix::row_sum_earlier(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < i; ++j) s += (*this)(i, j);
  return s;
}

BaGammaMatrix ba_gamma_matrix(std::size_t n, std::size_t m, std::size_t m0) {
  if (!(m >= 1 && m <= m0 && m0 < n))
    throw std::invalid_argument("growth model needs 1 <= m <= m0 < n");
  constexpr double kTol = 1e-10;

  BaGammaMatrix g;
  g.n_ = n;
  g.m_ = m;
  g.m0_ = m0;
  g.packed_.assign(n * (n - 1) / 2, 0.0);
  g.trials_.assign(n, 0.0);
  g.residuals_.assign(n, 0.0);

  std::vector<double>& k = g.degrees_;
  k.assign(n, 0.0);
  for (std::size_t i = 1; i < m0; ++i)
    for (std::size_t j = 0; j < i; ++j) g.packed_[i * (i - 1) / 2 + j] = 1.0;
  for (std::size_t j = 0; j < m0; ++j) k[j] = static_cast<double>(m0 - 1);

  std::vector<double> log_miss;  // log(1 - p_j)
  const double target = static_cast<double>(m);
  for (std::size_t i = m0; i < n; ++i) {
    double* row = g.packed_.data() + i * (i - 1) / 2;
    double total = 0.0;
    for (std::size_t j = 0; j < i; ++j) total += k[j];

    std::size_t candidates = 0;
    log_miss.assign(i, 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double p = total > 0.0 ? k[j] / total : 1.0 / static_cast<double>(i);
      if (p <= 0.0) continue;
      ++candidates;
      log_miss[j] = p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-p);
    }

    if (candidates <= m) {
      // Every candidate is forced to connect.
      for (std::size_t j = 0; j < i; ++j) row[j] = log_miss[j] < 0.0 ? 1.0 : 0.0;
      g.trials_[i] = std::numeric_limits<double>::infinity();
      g.residuals_[i] = static_cast<double>(candidates) - target;
    } else {
      auto excess = [&](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < i; ++j)
          if (log_miss[j] < 0.0) s += -std::expm1(t * log_miss[j]);
        return s - target;
      };
      double lo = target;  // Σ 1-(1-p)^m <= Σ m p = m
      double hi = 64.0 * target;
      int doublings = 0;
      while (excess(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60)
          throw NumericalError("cannot bracket selection trials for node " + std::to_string(i));
      }
      double t = 0.5 * (lo + hi);
      double gval = excess(t);
      for (int it = 0; it < 400 && std::fabs(gval) > kTol; ++it) {
        if (gval > 0.0) hi = t; else lo = t;
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        t = mid;
        gval = excess(t);
      }
      if (std::fabs(gval) > kTol)
        throw NumericalError("selection-trial bisection did not converge for node " +
                             std::to_string(i));
      g.trials_[i] = t;
      for (std::size_t j = 0; j < i; ++j)
        row[j] = log_miss[j] < 0.0 ? -std::expm1(t * log_miss[j]) : 0.0;
      g.residuals_[i] = gval;
    }

    double added = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      k[j] += row[j];
      added += row[j];
    }
    k[i] = added;
  }
  return g;
}

// ---------------------------------------------------------------------------
// ProbModel

ProbModel ProbModel::ring(ModelKind kind, std::size_t n, std::size_t m, double eta, double alpha,
                          double p) {
  check_ring(n, m);
  check_probability(eta, "eta");
  check_probability(alpha, "alpha");
  ProbModel pm;
  pm.kind_ = kind;
  pm.n_ = n;
  pm.m_ = m;
  pm.eta_ = eta;
  pm.alpha_ = alpha;
  pm.p_ = p;
  return pm;
}

ProbModel ProbModel::rrl(std::size_t n, std::size_t m) {
  if (m == 0) throw std::invalid_argument("ring lattice needs m >= 1");
  return ring(ModelKind::rrl, n, m, 1.0, 0.0, 0.0);
}

ProbModel ProbModel::mrl(std::size_t n, std::size_t m, double p_delete) {
  if (m == 0) throw std::invalid_argument("ring lattice needs m >= 1");
  check_probability(p_delete, "deletion probability");
  return ring(ModelKind::mrl, n, m, 1.0 - p_delete, 0.0, p_delete);
}

ProbModel ProbModel::er(std::size_t n, double mean_degree) {
  if (n < 2) throw std::invalid_argument("random graph needs n >= 2");
  const double p = mean_degree / static_cast<double>(n - 1);
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mean degree must lie in [0, n-1]");
  return ring(ModelKind::er, n, 0, p, p, p);
}

ProbModel ProbModel::ws(std::size_t n, std::size_t m, double p_rewire) {
  if (m == 0) throw std::invalid_argument("ring lattice needs m >= 1");
  check_ring(n, m);
  check_probability(p_rewire, "rewiring probability");
  const double alpha = 2.0 * static_cast<double>(m) * p_rewire / static_cast<double>(n - 1 - 2 * m);
  return ring(ModelKind::ws, n, m, 1.0 - p_rewire, alpha, p_rewire);
}

ProbModel ProbModel::nw(std::size_t n, std::size_t m, double p_add) {
  if (m == 0) throw std::invalid_argument("ring lattice needs m >= 1");
  check_ring(n, m);
  check_probability(p_add, "addition probability");
  const double alpha = 2.0 * static_cast<double>(m) * p_add / static_cast<double>(n - 1 - 2 * m);
  return ring(ModelKind::nw, n, m, 1.0, alpha, p_add);
}

ProbModel ProbModel::unified(std::size_t n, std::size_t m, double eta, double alpha) {
  return ring(ModelKind::unified, n, m, eta, alpha, 0.0);
}

ProbModel ProbModel::ba(std::size_t n, std::size_t m, std::size_t m0) {
  ProbModel pm;
  pm.kind_ = ModelKind::ba;
  pm.n_ = n;
  pm.m_ = m;
  pm.m0_ = m0;
  pm.ba_ = std::make_shared<const BaGammaMatrix>(ba_gamma_matrix(n, m, m0));
  return pm;
}

bool ProbModel::exchangeable() const noexcept {
  return kind_ != ModelKind::ba && (m_ == 0 || eta_ == alpha_);
}

double ProbModel::gamma(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("node id out of range");
  if (i == j) return 0.0;
  if (ba_) return (*ba_)(i, j);
  return ring_distance(i, j, n_) <= m_ ? eta_ : alpha_;
}

double ProbModel::expected_edges() const {
  if (ba_) {
    double s = 0.0;
    for (std::size_t i = 1; i < n_; ++i) s += ba_->row_sum_earlier(i);
    return s;
  }
  const double pairs = static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0;
  const double near = static_cast<double>(n_) * static_cast<double>(m_);
  return near * eta_ + (pairs - near) * alpha_;
}

// ---------------------------------------------------------------------------
// Sampling

Graph sample_ws_rewired(std::size_t n, std::size_t m, double p, std::uint64_t seed) {
  check_ring(n, m);
  check_probability(p, "rewiring probability");
  std::vector<std::unordered_set<NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 1; d <= m; ++d) {
      const auto j = static_cast<NodeId>((i + d) % n);
      adj[i].insert(j);
      adj[j].insert(static_cast<NodeId>(i));
    }

  Engine eng = make_engine(seed, 0x7773);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t d = 1; d <= m; ++d) {
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(eng) >= p) continue;
      const auto u = static_cast<NodeId>(i);
      const auto v = static_cast<NodeId>((i + d) % n);
      if (adj[u].size() >= n - 1) continue;  // nowhere to go
      NodeId t;
      do {
        t = static_cast<NodeId>(pick(eng));
      } while (t == u || adj[u].count(t));
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(t);
      adj[t].insert(u);
    }
  }

  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (NodeId v : adj[u])
      if (u < v) edges.push_back({static_cast<NodeId>(u), v});
  return Graph(n, edges);
}

Graph sample_graph(const ProbModel& model, std::uint64_t seed) {
  const std::size_t n = model.n();
  if (model.kind() == ModelKind::ws) return sample_ws_rewired(n, model.m(), model.p(), seed);

  std::vector<Edge> edges;
  if (model.kind() == ModelKind::rrl) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 1; d <= model.m(); ++d)
        edges.push_back(make_edge(static_cast<NodeId>(i), static_cast<NodeId>((i + d) % n)));
    return Graph(n, edges);
  }

  const std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(model.kind()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double g = model.gamma(i, j);
      if (g <= 0.0) continue;
      if (g >= 1.0 || keyed_uniform(key, i, j) < g)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  return Graph(n, edges);
}

double fit_power_law_exponent(std::span<const std::size_t> degrees, std::size_t k_min) {
  if (k_min == 0) throw std::invalid_argument("k_min must be positive");
  const double base = static_cast<double>(k_min) - 0.5;
  double logs = 0.0;
  std::size_t tail = 0;
  for (std::size_t k : degrees) {
    if (k < k_min) continue;
    logs += std::log(static_cast<double>(k) / base);
    ++tail;
  }
  if (tail == 0 || logs <= 0.0) throw NumericalError("no degrees in the fitted tail");
  return 1.0 + static_cast<double>(tail) / logs;
}

}  // namespace cnsdist
