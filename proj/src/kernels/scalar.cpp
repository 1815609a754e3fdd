#include "cnsdist/kernels.hpp"

namespace cnsdist::kernels::scalar {

void bernoulli_step(double* coeffs, std::size_t len, double p) {
  const double q = 1.0 - p;
  // Descending so coeffs[w-1] is still the old value when read.
  coeffs[len] = p * coeffs[len - 1];
  for (std::size_t w = len - 1; w > 0; --w) {
    const double keep = q * coeffs[w];
    const double shift = p * coeffs[w - 1];
    coeffs[w] = keep + shift;
  }
  coeffs[0] = q * coeffs[0];
}

void axpy(double* y, const double* x, std::size_t len, double a) {
  for (std::size_t i = 0; i < len; ++i) {
    const double t = a * x[i];
    y[i] = y[i] + t;
  }
}

std::size_t intersect_count(const std::uint32_t* a, std::size_t na,
                            const std::uint32_t* b, std::size_t nb) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < na && j < nb) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace cnsdist::kernels::scalar
