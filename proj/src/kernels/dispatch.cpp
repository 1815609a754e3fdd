#include <atomic>
#include <stdexcept>

#include "cnsdist/kernels.hpp"

namespace cnsdist::kernels {
namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::bernoulli_step, &scalar::axpy,
                              &scalar::intersect_count};

#if defined(CNSDIST_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::bernoulli_step, &avx2::axpy,
                            &avx2::intersect_count};
#endif

const KernelTable* best() noexcept {
#if defined(CNSDIST_HAVE_AVX2_KERNELS)
  if (isa_available(Isa::avx2)) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> ptr{best()};
  return ptr;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(CNSDIST_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("kernel ISA not available on this CPU: " +
                                std::string(isa_name(isa)));
#if defined(CNSDIST_HAVE_AVX2_KERNELS)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

void select_best() noexcept { current().store(best(), std::memory_order_relaxed); }

}  // namespace cnsdist::kernels
