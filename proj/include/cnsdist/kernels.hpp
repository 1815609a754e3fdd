#pragma once

// Inner loops with a scalar reference and SIMD variants. The active variant is
// picked once at startup from CPUID; every variant must produce bit-identical
// results to the scalar one (no FMA contraction, same operation order).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cnsdist::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  /// Multiply the polynomial coeffs[0..len) by (1-p + p x) in place.
  /// coeffs must have room for len+1 entries; coeffs[len] is overwritten.
  void (*bernoulli_step)(double* coeffs, std::size_t len, double p);

  /// y[i] += a * x[i]
  void (*axpy)(double* y, const double* x, std::size_t len, double a);

  /// |a ∩ b| for strictly increasing arrays.
  std::size_t (*intersect_count)(const std::uint32_t* a, std::size_t na,
                                 const std::uint32_t* b, std::size_t nb);
};

bool isa_available(Isa isa) noexcept;

/// Table for a specific ISA. Throws std::invalid_argument if the CPU lacks it.
const KernelTable& table(Isa isa);

/// Currently selected table (best available unless overridden).
const KernelTable& active() noexcept;

/// Override the selection, e.g. to pin the scalar path. Not thread-safe with
/// concurrent kernel calls.
void select(Isa isa);

/// Restore CPUID-based selection.
void select_best() noexcept;

namespace scalar {
void bernoulli_step(double* coeffs, std::size_t len, double p);
void axpy(double* y, const double* x, std::size_t len, double a);
std::size_t intersect_count(const std::uint32_t* a, std::size_t na,
                            const std::uint32_t* b, std::size_t nb);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CNSDIST_HAVE_AVX2_KERNELS 1
namespace avx2 {
void bernoulli_step(double* coeffs, std::size_t len, double p);
void axpy(double* y, const double* x, std::size_t len, double a);
std::size_t intersect_count(const std::uint32_t* a, std::size_t na,
                            const std::uint32_t* b, std::size_t nb);
}  // namespace avx2
#endif

}  // namespace cnsdist::kernels
