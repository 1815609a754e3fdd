#include "cnsdist/indices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cnsdist/error.hpp"

namespace cnsdist {

std::string_view to_string(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::cn: return "cn";
    case IndexKind::ra: return "ra";
    case IndexKind::aa: return "aa";
    case IndexKind::lp: return "lp";
    case IndexKind::katz: return "katz";
  }
  return "?";
}

namespace {

void check_pair(const Graph& g, NodeId a, NodeId b) {
  if (a >= g.node_count() || b >= g.node_count()) throw std::out_of_range("node id out of range");
  if (a == b) throw std::invalid_argument("similarity needs two distinct nodes");
}

template <class Weight>
double common_neighbor_sum(const Graph& g, NodeId a, NodeId b, Weight weight) {
  check_pair(g, a, b);
  auto na = g.neighbors(a);
  auto nb = g.neighbors(b);
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < na.size() && j < nb.size()) {
    if (na[i] < nb[j]) {
      ++i;
    } else if (nb[j] < na[i]) {
      ++j;
    } else {
      s += weight(na[i]);
      ++i;
      ++j;
    }
  }
  return s;
}

// Common neighbors always have degree >= 2, so log(k) > 0.
double ra_weight(const Graph& g, NodeId z) { return 1.0 / static_cast<double>(g.degree(z)); }
double aa_weight(const Graph& g, NodeId z) {
  return 1.0 / std::log(static_cast<double>(g.degree(z)));
}

}  // namespace

double score_cn(const Graph& g, NodeId a, NodeId b) {
  check_pair(g, a, b);
  return static_cast<double>(common_neighbor_count(g, a, b));
}

double score_ra(const Graph& g, NodeId a, NodeId b) {
  return common_neighbor_sum(g, a, b, [&](NodeId z) { return ra_weight(g, z); });
}

double score_aa(const Graph& g, NodeId a, NodeId b) {
  return common_neighbor_sum(g, a, b, [&](NodeId z) { return aa_weight(g, z); });
}

double spectral_radius_estimate(const Graph& g, std::size_t iterations) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0) return 0.0;
  // Power iteration on A + I avoids oscillation on bipartite parts.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = x[v];
      for (NodeId w : g.neighbors(static_cast<NodeId>(v))) s += x[w];
      y[v] = s;
    }
    double norm = 0.0, dot = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      norm += y[v] * y[v];
      dot += y[v] * x[v];
    }
    lambda = dot - 1.0;  // Rayleigh quotient of A
    norm = std::sqrt(norm);
    for (std::size_t v = 0; v < n; ++v) x[v] = y[v] / norm;
  }
  return lambda;
}

namespace {

void two_hop_scores(const Graph& g, IndexKind kind, PairScores& out) {
  const std::size_t n = g.node_count();
  std::vector<double> weight(n, 0.0);
  for (std::size_t z = 0; z < n; ++z) {
    const auto k = g.degree(static_cast<NodeId>(z));
    if (k < 2) continue;
    switch (kind) {
      case IndexKind::cn: weight[z] = 1.0; break;
      case IndexKind::ra: weight[z] = ra_weight(g, static_cast<NodeId>(z)); break;
      default: weight[z] = aa_weight(g, static_cast<NodeId>(z)); break;
    }
  }
  std::vector<double> acc(n, 0.0);
  std::vector<NodeId> touched;
  for (NodeId u = 0; u < n; ++u) {
    touched.clear();
    // Neighbors visited in increasing z, so each pair's sum has a fixed order.
    for (NodeId z : g.neighbors(u))
      for (NodeId v : g.neighbors(z)) {
        if (v <= u) continue;
        if (acc[v] == 0.0) touched.push_back(v);
        acc[v] += weight[z];
      }
    for (NodeId v : touched) {
      out.at(u, v) = acc[v];
      acc[v] = 0.0;
    }
  }
}

void lp_scores(const Graph& g, double phi, PairScores& out) {
  const std::size_t n = g.node_count();
  std::vector<double> w2(n), w3(n);
  for (NodeId u = 0; u < n; ++u) {
    std::fill(w2.begin(), w2.end(), 0.0);
    std::fill(w3.begin(), w3.end(), 0.0);
    for (NodeId z : g.neighbors(u))
      for (NodeId v : g.neighbors(z)) w2[v] += 1.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (w2[y] == 0.0) continue;
      for (NodeId v : g.neighbors(static_cast<NodeId>(y))) w3[v] += w2[y];
    }
    for (std::size_t v = u + 1; v < n; ++v) out.at(u, static_cast<NodeId>(v)) = w2[v] + phi * w3[v];
  }
}

void katz_scores(const Graph& g, double phi, const KatzOptions& opt, PairScores& out) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0 || phi == 0.0) return;
  const double rho = spectral_radius_estimate(g);
  if (phi * rho >= 1.0)
    throw NumericalError("Katz series diverges: phi * spectral radius = " +
                         std::to_string(phi * rho) + " >= 1");

  // phi * max degree bounds the contraction in the max norm; when it is below
  // one it gives a rigorous error bound, otherwise fall back to phi * rho.
  std::size_t dmax = 0;
  for (std::size_t v = 0; v < n; ++v) dmax = std::max(dmax, g.degree(static_cast<NodeId>(v)));
  const double norm_rate = phi * static_cast<double>(dmax);
  const double floor_rate = norm_rate < 1.0 ? norm_rate : phi * rho;

  std::vector<double> x(n), next(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(x.begin(), x.end(), 0.0);
    double prev_step = 0.0;
    bool done = false;
    std::size_t rising = 0;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
      // next = phi * A (e_s + x)
      double step = 0.0, norm = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        double acc = 0.0;
        for (NodeId w : g.neighbors(static_cast<NodeId>(v))) acc += x[w] + (w == s ? 1.0 : 0.0);
        next[v] = phi * acc;
        step = std::max(step, std::fabs(next[v] - x[v]));
        norm = std::max(norm, std::fabs(next[v]));
      }
      x.swap(next);
      if (!std::isfinite(norm) || norm > 1e100)
        throw NumericalError("Katz iteration diverged at source " + std::to_string(s));
      if (step == 0.0) {
        done = true;
        break;
      }
      if (it > 0) {
        const double observed = step / prev_step;
        rising = observed >= 1.0 ? rising + 1 : 0;
        const double rate = norm_rate < 1.0 ? norm_rate : std::max(observed, floor_rate);
        if (rising > 20)
          throw NumericalError("Katz iteration is not contracting at source " + std::to_string(s));
        // Geometric tail bound on the remaining error.
        if (rate < 1.0 && step * rate / (1.0 - rate) <= opt.tolerance) {
          done = true;
          break;
        }
      }
      prev_step = step;
    }
    if (!done)
      throw NumericalError("Katz iteration did not converge at source " + std::to_string(s));
    for (std::size_t v = s + 1; v < n; ++v) out.at(s, static_cast<NodeId>(v)) = x[v];
  }
}

}  // namespace

PairScores all_pair_scores(const Graph& g, const IndexSpec& spec, const KatzOptions& katz) {
  if (spec.phi < 0.0) throw std::invalid_argument("phi must be non-negative");
  PairScores out(g.node_count());
  switch (spec.kind) {
    case IndexKind::cn:
    case IndexKind::ra:
    case IndexKind::aa: two_hop_scores(g, spec.kind, out); break;
    case IndexKind::lp: lp_scores(g, spec.phi, out); break;
    case IndexKind::katz: katz_scores(g, spec.phi, katz, out); break;
  }
  return out;
}

ScoreTable score_table(const Graph& g, const IndexSpec& spec, const KatzOptions& katz) {
  const PairScores scores = all_pair_scores(g, spec, katz);
  ScoreTable t;
  t.spec = spec;
  t.connected.reserve(g.edge_count());
  t.unconnected.reserve(g.pair_count() - g.edge_count());
  const auto n = static_cast<NodeId>(g.node_count());
  for (NodeId u = 0; u < n; ++u) {
    auto adj = g.neighbors(u);
    auto it = std::upper_bound(adj.begin(), adj.end(), u);
    for (NodeId v = u + 1; v < n; ++v) {
      const bool linked = it != adj.end() && *it == v;
      if (linked) ++it;
      (linked ? t.connected : t.unconnected).push_back({u, v, scores(u, v)});
    }
  }
  return t;
}

ScoreTable score_lp(const Graph& g, double phi) { return score_table(g, {IndexKind::lp, phi}); }

ScoreTable score_katz(const Graph& g, double phi, const KatzOptions& katz) {
  return score_table(g, {IndexKind::katz, phi}, katz);
}

void write_score_table_csv(std::ostream& out, const ScoreTable& table) {
  out << "u,v,score,class\n";
  char buf[40];
  // Rows interleaved back into (u, v) order.
  std::size_t i = 0, j = 0;
  auto emit = [&](const ScoredPair& p, char cls) {
    std::snprintf(buf, sizeof buf, "%.17g", p.score);
    out << p.u << ',' << p.v << ',' << buf << ',' << cls << '\n';
  };
  auto before = [](const ScoredPair& a, const ScoredPair& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  while (i < table.connected.size() || j < table.unconnected.size()) {
    if (j == table.unconnected.size() ||
        (i < table.connected.size() && before(table.connected[i], table.unconnected[j])))
      emit(table.connected[i++], 'c');
    else
      emit(table.unconnected[j++], 'd');
  }
}

Pmf katz_connected_shift(const Pmf& p_c, double phi) { return shift(p_c, -phi); }

}  // namespace cnsdist
