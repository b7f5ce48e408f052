#include <atomic>
#include <stdexcept>

#include "phonojsd/kernels.hpp"

namespace phonojsd {

namespace {

constexpr KernelTable kScalarTable{Isa::scalar, &scalar::pack_windows, &scalar::sum,
                                   &scalar::jsd_terms, &scalar::kl_terms};

#if defined(PHONOJSD_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::avx2, &avx2::pack_windows, &avx2::sum, &avx2::jsd_terms,
                                 &avx2::kl_terms};
#endif

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&kernels(detect_isa())};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PHONOJSD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("instruction set '" + std::string(to_string(isa)) +
                                "' is not available on this machine");
  }
#if defined(PHONOJSD_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& kernels() { return *active_table().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) { active_table().store(&kernels(isa), std::memory_order_relaxed); }

}  // namespace phonojsd
