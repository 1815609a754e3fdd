#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnsdist/graph.hpp"

namespace cnsdist {

enum class ModelKind { rrl, mrl, er, ws, nw, unified, ba };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts the lower-case names used on the command line ("rrl", "ws", ...).
ModelKind parse_model_kind(std::string_view name);

/// min(|i-j|, n-|i-j|)
std::size_t ring_distance(std::size_t i, std::size_t j, std::size_t n);

/// Classification of the N-2 nodes t outside a pair (i,j) on a ring where
/// links exist within label distance m: `both` lie within m of i and of j,
/// `one` within m of exactly one of them, `neither` of none.
struct RingPairTypes {
  std::size_t both = 0;
  std::size_t one = 0;
  std::size_t neither = 0;
};

/// Exact counts for ring distance d (1 <= d <= n/2). Requires n >= 4m+2.
RingPairTypes ring_pair_types(std::size_t d, std::size_t n, std::size_t m);

/// Number of nodes within distance m of both i and j.
std::size_t s_count(std::size_t i, std::size_t j, std::size_t n, std::size_t m);

/// eta if ring distance <= m, alpha otherwise.
double gamma_unified(std::size_t i, std::size_t j, std::size_t n, std::size_t m, double eta,
                     double alpha);

/// Connection probabilities of the degree-driven growth model: the first m0
/// nodes form a clique, each later node i attaches with
/// Gamma_ij = 1 - (1 - k_j/Σk)^T_i, T_i chosen so that Σ_{j<i} Gamma_ij = m,
/// and degrees grow fractionally by Gamma_ij.
class BaGammaMatrix {
 public:
  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t m0() const noexcept { return m0_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    if (i < j) std::swap(i, j);
    return packed_[i * (i - 1) / 2 + j];
  }

  /// Σ_{j<i} Gamma_ij
  double row_sum_earlier(std::size_t i) const;

  /// Solved selection trials per arriving node (0 for the seed clique).
  std::span<const double> trials() const noexcept { return trials_; }
  /// Σ_{j<i} Gamma_ij - m per node after solving (non-zero only when clamped).
  std::span<const double> residuals() const noexcept { return residuals_; }

  /// Final fractional (expected) degrees.
  std::span<const double> expected_degrees() const noexcept { return degrees_; }

 private:
  friend BaGammaMatrix ba_gamma_matrix(std::size_t, std::size_t, std::size_t);
  std::size_t n_ = 0, m_ = 0, m0_ = 0;
  std::vector<double> packed_;  // strict lower triangle, row-major
  std::vector<double> trials_;
  std::vector<double> residuals_;
  std::vector<double> degrees_;
};

/// Requires 1 <= m <= m0 < n. Throws NumericalError naming the node index if
/// the trial count cannot be bracketed or bisection stalls.
BaGammaMatrix ba_gamma_matrix(std::size_t n, std::size_t m, std::size_t m0);

/// Connection-probability provider Gamma(i,j) for one of the analytic models.
/// Cheap to copy; the growth-model matrix is shared and immutable.
class ProbModel {
 public:
  static ProbModel rrl(std::size_t n, std::size_t m);
  static ProbModel mrl(std::size_t n, std::size_t m, double p_delete);
  /// Gamma = mean_degree / (n-1) for every pair.
  static ProbModel er(std::size_t n, double mean_degree);
  static ProbModel ws(std::size_t n, std::size_t m, double p_rewire);
  static ProbModel nw(std::size_t n, std::size_t m, double p_add);
  static ProbModel unified(std::size_t n, std::size_t m, double eta, double alpha);
  static ProbModel ba(std::size_t n, std::size_t m, std::size_t m0);

  ModelKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  /// Ring half-width (ring kinds) or links per arrival (BA). 0 for ER.
  std::size_t m() const noexcept { return m_; }
  std::size_t m0() const noexcept { return m0_; }
  /// The kind's own probability parameter (p^M, p^WS, p^NW, p^E).
  double p() const noexcept { return p_; }
  /// Within-ring and outside-ring probabilities (ring kinds and ER).
  double eta() const noexcept { return eta_; }
  double alpha() const noexcept { return alpha_; }

  double gamma(std::size_t i, std::size_t j) const;

  /// Gamma depends only on ring distance (all kinds except BA).
  bool ring_symmetric() const noexcept { return kind_ != ModelKind::ba; }
  /// Gamma is the same for all pairs.
  bool exchangeable() const noexcept;

  /// Σ_{i<j} Gamma_ij
  double expected_edges() const;

  const BaGammaMatrix* ba_matrix() const noexcept { return ba_.get(); }

 private:
  ProbModel() = default;
  static ProbModel ring(ModelKind kind, std::size_t n, std::size_t m, double eta, double alpha,
                        double p);

  ModelKind kind_ = ModelKind::er;
  std::size_t n_ = 0, m_ = 0, m0_ = 0;
  double p_ = 0.0, eta_ = 0.0, alpha_ = 0.0;
  std::shared_ptr<const BaGammaMatrix> ba_;
};

/// One realization. RRL is deterministic; WS rewires constructively; every
/// other kind draws an independent Bernoulli(Gamma_ij) per pair using a
/// counter-based draw keyed by (seed, i, j).
Graph sample_graph(const ProbModel& model, std::uint64_t seed);

/// Watts-Strogatz rewiring of a ring lattice: each lattice link (i, i+d),
/// d = 1..m, has its far endpoint moved with probability p to a uniformly
/// chosen node that is neither i nor already adjacent to i.
Graph sample_ws_rewired(std::size_t n, std::size_t m, double p, std::uint64_t seed);

/// Discrete power-law exponent by maximum likelihood over degrees >= k_min:
/// 1 + n_tail / Σ ln(k / (k_min - 1/2)).
double fit_power_law_exponent(std::span<const std::size_t> degrees, std::size_t k_min);

}  // namespace cnsdist
