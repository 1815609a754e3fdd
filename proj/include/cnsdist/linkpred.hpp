#pragma once

// Link prediction evaluation: the random split protocol with sampled AUC and
// top-L Precision, and the same metrics computed directly from class score
// distributions of the full graph.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnsdist/cns.hpp"
#include "cnsdist/graph.hpp"
#include "cnsdist/indices.hpp"
#include "cnsdist/pmf.hpp"

namespace cnsdist {

struct SplitSpec {
  double epsilon = 0.1;  ///< fraction of links moved to the test set
  std::uint64_t seed = 0;
  std::size_t repetitions = 100;
};

struct Split {
  Graph training;          ///< same node set, test links removed
  std::vector<Edge> test;  ///< sorted
};

/// ceil(epsilon * |E|)
std::size_t test_set_size(std::size_t edge_count, double epsilon);

/// Draws the test links uniformly without replacement; deterministic in
/// (spec.seed, repetition). Throws std::invalid_argument when the test set
/// would be empty or epsilon is outside (0,1).
Split split(const Graph& g, const SplitSpec& spec, std::size_t repetition);

/// (n' + n''/2) / n
double auc_from_counts(std::size_t n, std::size_t higher, std::size_t tied);

inline constexpr std::size_t kDefaultComparisons = 10000;

/// Sampled AUC: each comparison takes a uniform test pair and a uniform pair
/// that is neither a training link nor a test link. `scores` must be computed
/// on the training graph.
double auc_experimental(const Graph& training, std::span<const Edge> test,
                        const PairScores& scores, std::size_t comparisons, std::uint64_t seed);
double auc_experimental(const Graph& training, std::span<const Edge> test, const IndexSpec& index,
                        std::size_t comparisons = kDefaultComparisons, std::uint64_t seed = 0);

/// Fraction of test links among the top-L training-unconnected pairs. Pairs
/// tied with the L-th score are taken uniformly at random; the return value is
/// the expectation over that choice. L = 0 means L = |test|.
double precision_experimental(const Graph& training, std::span<const Edge> test,
                              const PairScores& scores, std::size_t L = 0);
double precision_experimental(const Graph& training, std::span<const Edge> test,
                              const IndexSpec& index, std::size_t L = 0);

/// Score distributions of linked (p_c) and unlinked (p_d) pairs of `g` over
/// exact observed values. With katz_shift, p_c is moved down by phi.
ClassCondDistributions class_score_distributions(const Graph& g, const IndexSpec& index,
                                                 bool katz_shift = false,
                                                 const KatzOptions& katz = {});

/// P(score_c > score_d) + P(equal)/2 over the merged support.
double auc_theoretical(const Pmf& p_c, const Pmf& p_d);

struct PrecisionTheory {
  double exact = 0.0;
  double loose = 0.0;      ///< Phi_c / Phi at the threshold
  double threshold = 0.0;  ///< x_L
  /// Phi_c / Phi at the next larger support value; the class ratio of the
  /// threshold bin when x_L is the largest value.
  double loose_above = 0.0;
};

/// Phi_c(x) = epsilon N<k>/2 P_c(>=x), Phi_d(x) = N(N-1-<k>)/2 P_d(>=x).
/// x_L is the largest support value with Phi(x_L) >= L. Throws
/// std::invalid_argument when L exceeds the total mass Phi(min) or is 0.
PrecisionTheory precision_theoretical(const Pmf& p_c, const Pmf& p_d, std::size_t n,
                                      double mean_degree, double epsilon, double L);

struct MedianDistance {
  double xi_c = 0.0;
  double xi_d = 0.0;
  double distance = 0.0;
};

MedianDistance median_distance(const Pmf& p_c, const Pmf& p_d);

/// Index names accepted by evaluate(): cn, ra, aa, lp, katz, katz-shifted.
struct NamedIndex {
  std::string name;
  IndexSpec spec;
  bool katz_shift = false;
};

/// Throws std::invalid_argument listing the valid names for an unknown one.
NamedIndex parse_index(const std::string& name, double lp_phi = kDefaultLpPhi,
                       double katz_phi = kDefaultKatzPhi);
const std::vector<std::string>& index_names();

struct EvaluateOptions {
  std::vector<std::string> indices{"cn", "ra", "aa", "lp", "katz"};
  SplitSpec split;
  std::size_t comparisons = kDefaultComparisons;
  std::size_t L = 0;  ///< 0: test set size
  bool theory_only = false;
  double lp_phi = kDefaultLpPhi;
  double katz_phi = kDefaultKatzPhi;
  unsigned threads = 1;
};

struct IndexReport {
  std::string name;
  std::optional<double> auc_experimental;
  std::optional<double> precision_experimental;
  double auc_theoretical = 0.0;
  PrecisionTheory precision;
  MedianDistance medians;
};

struct EvalReport {
  std::size_t nodes = 0;
  std::size_t links = 0;
  double mean_degree = 0.0;
  std::size_t L = 0;
  EvaluateOptions options;
  std::vector<IndexReport> rows;
};

EvalReport evaluate(const Graph& g, const EvaluateOptions& options);

std::string to_json(const EvalReport& report, int indent = 2);
/// Plain-text table: one column per index, rows for experimental and
/// theoretical AUC / Precision, loose Precision and the medians.
std::string to_text_table(const EvalReport& report);

}  // namespace cnsdist
