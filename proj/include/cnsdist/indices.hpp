#pragma once

// Neighborhood and path-based similarity indices: CN, RA, AA, LP, Katz.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "cnsdist/graph.hpp"
#include "cnsdist/pmf.hpp"

namespace cnsdist {

enum class IndexKind { cn, ra, aa, lp, katz };

std::string_view to_string(IndexKind kind) noexcept;

inline constexpr double kDefaultLpPhi = 0.02;
inline constexpr double kDefaultKatzPhi = 0.01;

struct IndexSpec {
  IndexKind kind = IndexKind::cn;
  /// Weight of length-3 walks (LP) or per-step attenuation (Katz).
  double phi = 0.0;
};

struct KatzOptions {
  /// Bound on the sup-norm error of each column after stopping.
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
};

double score_cn(const Graph& g, NodeId a, NodeId b);
double score_ra(const Graph& g, NodeId a, NodeId b);
double score_aa(const Graph& g, NodeId a, NodeId b);

/// Scores for every unordered pair, stored as a packed strict upper triangle.
class PairScores {
 public:
  PairScores() = default;
  explicit PairScores(std::size_t n) : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  std::size_t node_count() const noexcept { return n_; }
  double operator()(NodeId a, NodeId b) const noexcept { return values_[slot(a, b)]; }
  double& at(NodeId a, NodeId b) noexcept { return values_[slot(a, b)]; }
  const std::vector<double>& raw() const noexcept { return values_; }

  /// a != b
  std::size_t slot(NodeId a, NodeId b) const noexcept {
    if (a > b) std::swap(a, b);
    const std::size_t u = a, v = b;
    return u * (2 * n_ - u - 1) / 2 + (v - u - 1);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// All-pair scores. CN/RA/AA by two-hop accumulation; LP by two sparse
/// passes per source; Katz by a per-source fixed-point solve of
/// x = phi A (e_s + x). Throws NumericalError when Katz diverges
/// (phi >= 1 / spectral radius) and std::invalid_argument for phi < 0.
PairScores all_pair_scores(const Graph& g, const IndexSpec& spec, const KatzOptions& katz = {});

/// Largest eigenvalue of A by power iteration (a lower bound that converges
/// from below for non-bipartite components).
double spectral_radius_estimate(const Graph& g, std::size_t iterations = 200);

struct ScoredPair {
  NodeId u;  // u < v
  NodeId v;
  double score;
};

/// Per-pair scores split by whether the pair is linked, ordered by (u, v).
struct ScoreTable {
  IndexSpec spec;
  std::vector<ScoredPair> connected;
  std::vector<ScoredPair> unconnected;
};

ScoreTable score_table(const Graph& g, const IndexSpec& spec, const KatzOptions& katz = {});
ScoreTable score_lp(const Graph& g, double phi = kDefaultLpPhi);
ScoreTable score_katz(const Graph& g, double phi = kDefaultKatzPhi, const KatzOptions& katz = {});

/// CSV "u,v,score,class" with class c (linked) or d (not linked).
void write_score_table_csv(std::ostream& out, const ScoreTable& table);

/// Moves the connected-pair Katz score distribution down by phi, removing
/// the direct link's own contribution.
Pmf katz_connected_shift(const Pmf& p_c, double phi);

}  // namespace cnsdist
