#pragma once

// Inner loops shared by n-gram counting and the divergence sums.
//
// Every kernel has a portable scalar reference in namespace `scalar` and, on
// x86-64, an AVX2+FMA variant in namespace `avx2`. Callers go through
// `kernels()`, which picks the widest variant the running CPU supports. The
// test suite checks each vector variant against its scalar reference.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace phonojsd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;

  /// Packs every window of `order` ids into a 64-bit key, lane j holding
  /// (ids[i + j] + 1) << (16 * j). Writes ids.size() - order + 1 keys;
  /// requires ids.size() >= order and out large enough.
  void (*pack_windows)(std::span<const std::uint16_t> ids, int order, std::uint64_t* out);

  /// Compensated (Neumaier) sum.
  double (*sum)(std::span<const double> values);

  /// Sum over i of p_i ln(2 p_i / (p_i + q_i)) + q_i ln(2 q_i / (p_i + q_i)),
  /// where zero entries contribute nothing. Equals 2 * JSD in nats when p and q
  /// are aligned distributions over their union support.
  double (*jsd_terms)(std::span<const double> p, std::span<const double> q);

  /// Sum over i with p_i > 0 of p_i ln(p_i / q_i); +inf when some q_i == 0 < p_i.
  double (*kl_terms)(std::span<const double> p, std::span<const double> q);
};

/// Best variant supported by this CPU.
Isa detect_isa();
bool isa_supported(Isa isa);

/// Kernel table for a specific ISA; throws std::invalid_argument when the CPU
/// or the build lacks it.
const KernelTable& kernels(Isa isa);

/// The active table. Defaults to detect_isa().
const KernelTable& kernels();
/// Overrides the active table for the whole process (tests, benchmarks).
void set_active_isa(Isa isa);

namespace scalar {
void pack_windows(std::span<const std::uint16_t> ids, int order, std::uint64_t* out);
double sum(std::span<const double> values);
double jsd_terms(std::span<const double> p, std::span<const double> q);
double kl_terms(std::span<const double> p, std::span<const double> q);
}  // namespace scalar

#if defined(PHONOJSD_HAVE_AVX2)
namespace avx2 {
void pack_windows(std::span<const std::uint16_t> ids, int order, std::uint64_t* out);
double sum(std::span<const double> values);
double jsd_terms(std::span<const double> p, std::span<const double> q);
double kl_terms(std::span<const double> p, std::span<const double> q);
/// Lane-wise natural log, exposed for accuracy tests. x must be positive and
/// finite.
void log4(const double* x, double* out);
}  // namespace avx2
#endif

}  // namespace phonojsd
