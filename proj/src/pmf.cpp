#include "cnsdist/pmf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cnsdist/error.hpp"

namespace cnsdist {

bool same_value(double a, double b) noexcept {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= kTieRelTol * scale;
}

Pmf::Pmf(std::vector<double> support, std::vector<double> probs) {
  if (support.size() != probs.size()) throw std::invalid_argument("support/probability size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw std::invalid_argument("non-finite support value");
    if (i > 0 && !(support[i] > support[i - 1]))
      throw std::invalid_argument("support must be strictly increasing");
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
      throw std::invalid_argument("probabilities must be finite and non-negative");
    total += probs[i];
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (probs[i] > 0.0) {
      support_.push_back(support[i]);
      probs_.push_back(probs[i]);
    }
  }
}

Pmf Pmf::point_mass(double x) { return Pmf({x}, {1.0}); }

Pmf Pmf::from_dense(std::span<const double> dense, std::int64_t offset) {
  double total = 0.0;
  for (double v : dense) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative weight in dense distribution");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("dense distribution has no mass");
  Pmf out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] > 0.0) {
      out.support_.push_back(static_cast<double>(offset + static_cast<std::int64_t>(i)));
      out.probs_.push_back(dense[i] / total);
    }
  }
  return out;
}

Pmf Pmf::from_samples(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("no samples");
  std::sort(values.begin(), values.end());
  const double total = static_cast<double>(values.size());
  Pmf out;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i + 1;
    while (j < values.size() && same_value(values[i], values[j])) ++j;
    out.support_.push_back(values[i]);
    out.probs_.push_back(static_cast<double>(j - i) / total);
    i = j;
  }
  return out;
}

double Pmf::at(double x) const noexcept {
  auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x) return 0.0;
  return probs_[static_cast<std::size_t>(it - support_.begin())];
}

double Pmf::mean() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m += support_[i] * probs_[i];
  return m;
}

double Pmf::variance() const noexcept {
  const double mu = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < size(); ++i) v += (support_[i] - mu) * (support_[i] - mu) * probs_[i];
  return v;
}

double Pmf::median() const {
  if (empty()) throw std::logic_error("median of an empty distribution");
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    acc += probs_[i];
    if (acc >= 0.5 - 1e-12) return support_[i];
  }
  return support_.back();
}

double Pmf::cdf(double x) const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < size() && support_[i] <= x; ++i) acc += probs_[i];
  return acc;
}

bool Pmf::integer_support() const noexcept {
  return std::all_of(support_.begin(), support_.end(),
                     [](double x) { return x == std::floor(x) && std::fabs(x) < 0x1p53; });
}

std::vector<double> Pmf::dense(std::int64_t first) const {
  if (!integer_support()) throw std::invalid_argument("dense view requires integer support");
  if (empty()) return {};
  const auto last = static_cast<std::int64_t>(support_.back());
  if (static_cast<std::int64_t>(support_.front()) < first)
    throw std::invalid_argument("dense view starts above the support minimum");
  std::vector<double> out(static_cast<std::size_t>(last - first + 1), 0.0);
  for (std::size_t i = 0; i < size(); ++i)
    out[static_cast<std::size_t>(static_cast<std::int64_t>(support_[i]) - first)] = probs_[i];
  return out;
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  if (!a.integer_support() || !b.integer_support())
    throw std::invalid_argument("convolution is defined for integer supports only");
  if (a.empty() || b.empty()) throw std::invalid_argument("convolution of an empty distribution");
  const auto a0 = static_cast<std::int64_t>(a.support().front());
  const auto b0 = static_cast<std::int64_t>(b.support().front());
  const auto da = a.dense(a0);
  const auto db = b.dense(b0);
  std::vector<double> out(da.size() + db.size() - 1, 0.0);
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i] == 0.0) continue;
    for (std::size_t j = 0; j < db.size(); ++j) out[i + j] += da[i] * db[j];
  }
  return Pmf::from_dense(out, a0 + b0);
}

Pmf shift(const Pmf& p, double delta) {
  std::vector<double> s(p.support().begin(), p.support().end());
  for (double& x : s) x += delta;
  return Pmf(std::move(s), std::vector<double>(p.probs().begin(), p.probs().end()));
}

std::vector<double> merged_support(const Pmf& a, const Pmf& b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.support().begin(), a.support().end());
  all.insert(all.end(), b.support().begin(), b.support().end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all)
    if (out.empty() || !same_value(out.back(), x)) out.push_back(x);
  return out;
}

namespace {

// Probabilities of a and b aligned on the merged support.
void align(const Pmf& a, const Pmf& b, std::vector<double>& pa, std::vector<double>& pb) {
  const auto grid = merged_support(a, b);
  pa.assign(grid.size(), 0.0);
  pb.assign(grid.size(), 0.0);
  auto place = [&](const Pmf& p, std::vector<double>& dst) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      while (!same_value(grid[k], p.support()[i])) ++k;
      dst[k] += p.probs()[i];
    }
  };
  place(a, pa);
  place(b, pb);
}

}  // namespace

double total_variation(const Pmf& a, const Pmf& b) {
  std::vector<double> pa, pb;
  align(a, b, pa, pb);
  double tv = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) tv += std::fabs(pa[i] - pb[i]);
  return 0.5 * tv;
}

double max_abs_difference(const Pmf& a, const Pmf& b) {
  std::vector<double> pa, pb;
  align(a, b, pa, pb);
  double m = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::fabs(pa[i] - pb[i]));
  return m;
}

namespace {

std::string format_value(double x) {
  char buf[40];
  if (x == std::floor(x) && std::fabs(x) < 0x1p53)
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
  else
    std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'", line);
  return v;
}

}  // namespace

void write_pmf_csv(std::ostream& out, const Pmf& p) {
  out << "w,probability\n";
  char buf[40];
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.probs()[i]);
    out << format_value(p.support()[i]) << ',' << buf << '\n';
  }
}

Pmf read_pmf_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<double> s, pr;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "w,probability") throw ParseError("expected header 'w,probability'", lineno);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected two columns", lineno);
    std::string_view sv(line);
    s.push_back(parse_double(sv.substr(0, comma), lineno));
    pr.push_back(parse_double(sv.substr(comma + 1), lineno));
  }
  if (!header) throw ParseError("missing CSV header");
  try {
    return Pmf(std::move(s), std::move(pr));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace cnsdist
