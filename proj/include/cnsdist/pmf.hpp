#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cnsdist {

/// Relative tolerance under which two real scores count as the same value.
inline constexpr double kTieRelTol = 1e-12;

/// |a-b| <= kTieRelTol * max(1, |a|, |b|)
bool same_value(double a, double b) noexcept;

/// Finite discrete distribution over a strictly increasing support. Supports
/// are integer CNS values or real similarity scores; zero entries are pruned.
class Pmf {
 public:
  Pmf() = default;

  /// Validates ordering, non-negativity and |sum - 1| <= 1e-9.
  Pmf(std::vector<double> support, std::vector<double> probs);

  static Pmf point_mass(double x);

  /// dense[i] is the (unnormalized) weight of value offset + i. Normalizes by
  /// the sum; throws if the sum is not positive.
  static Pmf from_dense(std::span<const double> dense, std::int64_t offset = 0);

  /// Empirical distribution of observed values; values equal under
  /// same_value() are merged into the smallest of them.
  static Pmf from_samples(std::vector<double> values);

  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }

  /// Probability of exactly x (0 when x is not in the support).
  double at(double x) const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;
  /// Smallest support value with CDF >= 0.5.
  double median() const;
  /// P(X <= x)
  double cdf(double x) const noexcept;
  bool integer_support() const noexcept;

  /// Dense probabilities indexed by value, starting at `first`. Requires
  /// integer support.
  std::vector<double> dense(std::int64_t first = 0) const;

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Distribution of X+Y for independent X~a, Y~b. Integer supports only.
Pmf convolve(const Pmf& a, const Pmf& b);

/// Support moved by delta (values x -> x + delta).
Pmf shift(const Pmf& p, double delta);

/// 1/2 Σ |a(x) - b(x)| over the merged support.
double total_variation(const Pmf& a, const Pmf& b);

/// max_x |a(x) - b(x)|
double max_abs_difference(const Pmf& a, const Pmf& b);

/// Ascending union of supports, values merged under same_value().
std::vector<double> merged_support(const Pmf& a, const Pmf& b);

/// Two-column CSV "w,probability" with 17 significant digits. Lines starting
/// with '#' before the header carry metadata and are skipped on read.
void write_pmf_csv(std::ostream& out, const Pmf& p);
Pmf read_pmf_csv(std::istream& in);

}  // namespace cnsdist
