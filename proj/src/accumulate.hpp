#pragma once

// Internal helpers: deterministic pairwise summation of dense vectors and a
// fixed-partition parallel loop.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "cnsdist/kernels.hpp"

namespace cnsdist::detail {

/// y += a * x (x placed at `offset`), growing y as needed.
inline void add_scaled(std::vector<double>& y, const double* x, std::size_t len,
                       std::size_t offset, double a) {
  if (len == 0 || a == 0.0) return;
  if (y.size() < offset + len) y.resize(offset + len, 0.0);
  kernels::active().axpy(y.data() + offset, x, len, a);
}

/// Binary-counter tree sum: a partial sum at level L covers 2^L inputs, and
/// two partials merge only when their levels match. The summation tree is a
/// function of the input count alone, so results are order-stable.
class TreeSum {
 public:
  void add(std::vector<double> v) {
    stack_.emplace_back(0, std::move(v));
    while (stack_.size() >= 2 && stack_[stack_.size() - 1].first == stack_[stack_.size() - 2].first) {
      auto top = std::move(stack_.back());
      stack_.pop_back();
      auto& below = stack_.back();
      add_scaled(below.second, top.second.data(), top.second.size(), 0, 1.0);
      ++below.first;
    }
  }

  std::vector<double> result() const {
    if (stack_.empty()) return {};
    std::vector<double> acc = stack_.back().second;
    for (std::size_t k = stack_.size() - 1; k-- > 0;) {
      std::vector<double> left = stack_[k].second;
      add_scaled(left, acc.data(), acc.size(), 0, 1.0);
      acc = std::move(left);
    }
    return acc;
  }

  bool empty() const noexcept { return stack_.empty(); }

 private:
  std::vector<std::pair<int, std::vector<double>>> stack_;
};

/// Runs fn(i) for i in [begin, end) on up to `threads` workers, each taking a
/// contiguous slice. fn must only write to slot i of shared output.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, F&& fn) {
  const std::size_t count = end > begin ? end - begin : 0;
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mu;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &failure, &failure_mu] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cnsdist::detail
