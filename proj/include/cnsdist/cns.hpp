#pragma once

// Common-neighbor similarity (CNS) distributions: per-set distributions from
// connection probabilities, class-conditional distributions over node sets,
// ER and ring-model closed forms, and empirical distributions of graphs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnsdist/graph.hpp"
#include "cnsdist/models.hpp"
#include "cnsdist/pmf.hpp"

namespace cnsdist {

/// Factors with probability below this are dropped from per-set products.
inline constexpr double kDefaultFactorEpsilon = 1e-12;

/// Coefficients below this at either end of a running Poisson-binomial
/// product are trimmed. Total discarded mass is bounded by 2 * trials * cutoff.
inline constexpr double kTailCutoff = 1e-20;

/// Dense Poisson-binomial coefficients: probs[i] = P(count = offset + i).
struct DenseDistribution {
  std::int64_t offset = 0;
  std::vector<double> probs;

  Pmf to_pmf() const { return Pmf::from_dense(probs, offset); }
};

/// Coefficients of Π_t (1 - p_t + p_t x). Factors below `drop_below` are
/// skipped and factors equal to 1 only shift the support. Throws
/// std::invalid_argument for entries outside [0,1].
DenseDistribution poisson_binomial_dense(std::span<const double> probabilities,
                                         double drop_below = 0.0);

Pmf poisson_binomial(std::span<const double> probabilities, double drop_below = 0.0);

/// Distribution of the CNS of `set` under independent links with probability
/// Gamma: trial per outside node t with success probability Π_v Gamma(v,t).
Pmf set_cns_distribution(const ProbModel& model, const NodeSet& set,
                         double epsilon = kDefaultFactorEpsilon);
DenseDistribution set_cns_dense(const ProbModel& model, std::span<const NodeId> members,
                                double epsilon = kDefaultFactorEpsilon);

/// CNS distributions of connected (p_c), unconnected (p_d) and all (p_a)
/// node sets. For q >= 3 a set counts as connected when all of its members
/// are pairwise linked. p_c / p_d are empty when the class has no mass.
struct ClassCondDistributions {
  std::size_t q = 2;
  double chi_c = 0.0;
  std::optional<Pmf> p_c;
  std::optional<Pmf> p_d;
  Pmf p_a;

  /// Integer histograms behind the empirical distributions (absent for
  /// analytic results); count_a[w] = count_c[w] + count_d[w].
  std::vector<std::uint64_t> count_c, count_d, count_a;

  /// max_w |p_a - chi_c p_c - (1-chi_c) p_d|
  double mixture_residual() const;
};

enum class SetEnumeration { exact, sampled };

struct AnalyticOptions {
  std::size_t q = 2;
  SetEnumeration mode = SetEnumeration::exact;
  std::size_t sample_count = 100000;
  std::uint64_t seed = 0;
  double epsilon = kDefaultFactorEpsilon;
  unsigned threads = 1;
};

/// Exact mode averages per-set distributions over every set. For q = 2 and
/// ring-symmetric models this reduces to one set per ring distance; other
/// models walk all pairs. Exact q >= 3 requires an exchangeable model or at
/// most 2e6 sets. Sampled mode draws sets uniformly (needs sample_count > 0).
/// q = 1 yields the expected degree distribution in p_a only.
ClassCondDistributions class_distributions_analytic(const ProbModel& model,
                                                    const AnalyticOptions& options = {});

struct EmpiricalOptions {
  std::size_t q = 2;
  /// For q >= 3: sets drawn uniformly (all sets when C(n,q) <= sample_count).
  std::size_t sample_count = 100000;
  std::uint64_t seed = 0;
};

/// Counts CNS over all connected and all unconnected pairs of the graph.
/// p_c is empty when the graph has no edges, p_d when it is complete.
ClassCondDistributions empirical_class_distributions(const Graph& g,
                                                     const EmpiricalOptions& options = {});

struct ErClosedForm {
  double lambda = 0.0;  ///< <k>^q N^(1-q)
  Pmf exact;            ///< Binomial(N-q, (<k>/(N-1))^q)
  Pmf poisson;          ///< Poisson(lambda), truncated where terms drop below 1e-300
};

ErClosedForm er_closed_form(std::size_t n, double mean_degree, std::size_t q);

/// Binomial(trials, p) coefficients by closed form (log-gamma), index = count.
std::vector<double> binomial_coefficients(std::size_t trials, double p);

/// Pair distribution of a ring-symmetric model assembled from the three
/// binomial factors over node types (both / one / neither within m).
Pmf ring_pair_closed_form(const ProbModel& model, NodeId i, NodeId j);

/// Right-hand side of the ring convolution approximation for a WS or NW model:
/// (MRL or RRL pair distribution) * (ER pair distribution with p^E = alpha).
Pmf ring_convolution_approximation(const ProbModel& model, NodeId i, NodeId j);

struct ConvolutionGap {
  double connected_tv = 0.0;  ///< TV between the two P_c assemblies
  double all_pairs_tv = 0.0;  ///< TV between the two P_a assemblies
  double max_pair_tv = 0.0;   ///< worst single pair
};

/// Gap between exact pair distributions and the convolution approximation,
/// assembled over pairs with the model's Gamma weights. WS or NW only.
ConvolutionGap convolution_gap(const ProbModel& model);

/// {"q", "chi_c", "p_c": [[w,p],...], "p_d": ..., "p_a": ...}; absent classes
/// are null.
std::string to_json(const ClassCondDistributions& d, int indent = 2);
ClassCondDistributions class_distributions_from_json(const std::string& text);

}  // namespace cnsdist
