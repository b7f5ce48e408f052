// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "phonojsd/kernels.hpp"

namespace phonojsd::avx2 {

namespace {

// fdlibm e_log.c constants.
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLg1 = 6.666666666666735130e-01;
constexpr double kLg2 = 3.999999999940941908e-01;
constexpr double kLg3 = 2.857142874366239149e-01;
constexpr double kLg4 = 2.222219843214978396e-01;
constexpr double kLg5 = 1.818357216161805012e-01;
constexpr double kLg6 = 1.531383769920937332e-01;
constexpr double kLg7 = 1.479819860511658591e-01;

// Natural log for positive finite lanes, following fdlibm's reduction
// x = 2^k * (1 + f) with 1 + f in [sqrt(2)/2, sqrt(2)).
inline __m256d log_pd(__m256d x) {
  const __m256d min_normal = _mm256_set1_pd(std::numeric_limits<double>::min());
  const __m256d subnormal = _mm256_cmp_pd(x, min_normal, _CMP_LT_OQ);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(0x1.0p54)), subnormal);
  const __m256d scale_fix = _mm256_and_pd(subnormal, _mm256_set1_pd(54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i hx = _mm256_and_si256(_mm256_srli_epi64(bits, 32), _mm256_set1_epi64x(0x000fffff));
  const __m256i i = _mm256_and_si256(_mm256_add_epi64(hx, _mm256_set1_epi64x(0x95f64)),
                                     _mm256_set1_epi64x(0x100000));
  const __m256i mant = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL));
  const __m256i hi = _mm256_slli_epi64(_mm256_xor_si256(i, _mm256_set1_epi64x(0x3ff00000)), 32);
  const __m256d m = _mm256_castsi256_pd(_mm256_or_si256(mant, hi));

  // Biased exponent (non-negative) converted through the 2^52 trick.
  const __m256i k_biased = _mm256_add_epi64(_mm256_srli_epi64(bits, 52), _mm256_srli_epi64(i, 20));
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  const __m256d dk_biased =
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(k_biased, _mm256_castpd_si256(magic))), magic);
  const __m256d dk =
      _mm256_sub_pd(_mm256_sub_pd(dk_biased, _mm256_set1_pd(1023.0)), scale_fix);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 = _mm256_mul_pd(
      w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_set1_pd(kLg6), _mm256_set1_pd(kLg4)),
                         _mm256_set1_pd(kLg2)));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_fmadd_pd(
             w,
             _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_set1_pd(kLg7), _mm256_set1_pd(kLg5)),
                             _mm256_set1_pd(kLg3)),
             _mm256_set1_pd(kLg1)));
  const __m256d r = _mm256_add_pd(t2, t1);

  const __m256d ln2_hi = _mm256_set1_pd(kLn2Hi);
  const __m256d ln2_lo = _mm256_set1_pd(kLn2Lo);

  // Wide branch: dk*ln2_hi - ((hfsq - (s*(hfsq+R) + dk*ln2_lo)) - f)
  const __m256d hfsq = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_mul_pd(f, f));
  const __m256d wide_inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)),
                                           _mm256_mul_pd(dk, ln2_lo));
  const __m256d wide = _mm256_sub_pd(_mm256_mul_pd(dk, ln2_hi),
                                     _mm256_sub_pd(_mm256_sub_pd(hfsq, wide_inner), f));
  // Narrow branch: dk*ln2_hi - ((s*(f-R) - dk*ln2_lo) - f)
  const __m256d narrow_inner =
      _mm256_sub_pd(_mm256_mul_pd(s, _mm256_sub_pd(f, r)), _mm256_mul_pd(dk, ln2_lo));
  const __m256d narrow =
      _mm256_sub_pd(_mm256_mul_pd(dk, ln2_hi), _mm256_sub_pd(narrow_inner, f));

  const __m256i use_wide = _mm256_and_si256(_mm256_cmpgt_epi64(hx, _mm256_set1_epi64x(0x6147a)),
                                            _mm256_cmpgt_epi64(_mm256_set1_epi64x(0x6b851), hx));
  return _mm256_blendv_pd(narrow, wide, _mm256_castsi256_pd(use_wide));
}

// Four independent compensated accumulators (Knuth two-sum per lane).
struct LaneSum {
  __m256d sum = _mm256_setzero_pd();
  __m256d carry = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d s = _mm256_add_pd(sum, x);
    const __m256d bp = _mm256_sub_pd(s, sum);
    const __m256d err =
        _mm256_add_pd(_mm256_sub_pd(sum, _mm256_sub_pd(s, bp)), _mm256_sub_pd(x, bp));
    carry = _mm256_add_pd(carry, err);
    sum = s;
  }

  double reduce() const {
    alignas(32) double parts[8];
    _mm256_store_pd(parts, sum);
    _mm256_store_pd(parts + 4, carry);
    return scalar::sum(std::span<const double>(parts, 8));
  }
};

inline __m256d load_tail(const double* src, std::size_t n) {
  alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
  std::memcpy(buf, src, n * sizeof(double));
  return _mm256_load_pd(buf);
}

// p * log(2p / (p + q)), zero where p == 0.
inline __m256d jsd_half(__m256d p, __m256d two_over_m) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero_p = _mm256_cmp_pd(p, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d ratio = _mm256_blendv_pd(_mm256_mul_pd(p, two_over_m), one, zero_p);
  return _mm256_mul_pd(p, log_pd(ratio));
}

}  // namespace

void log4(const double* x, double* out) { _mm256_storeu_pd(out, log_pd(_mm256_loadu_pd(x))); }

void pack_windows(std::span<const std::uint16_t> ids, int order, std::uint64_t* out) {
  const std::size_t n = ids.size() + 1 - static_cast<std::size_t>(order);
  const std::uint16_t* base = ids.data();
  const __m256i one = _mm256_set1_epi64x(1);
  std::size_t i = 0;
  // Each lane j-load reads ids[i + j .. i + j + 3]; the last one must stay in bounds.
  for (; i + 4 + static_cast<std::size_t>(order) - 1 <= ids.size() && i + 4 <= n; i += 4) {
    __m256i key = _mm256_setzero_si256();
    for (int j = 0; j < order; ++j) {
      const __m128i raw = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(base + i + j));
      const __m256i lane = _mm256_add_epi64(_mm256_cvtepu16_epi64(raw), one);
      key = _mm256_or_si256(key, _mm256_sll_epi64(lane, _mm_cvtsi32_si128(16 * j)));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), key);
  }
  if (i < n) scalar::pack_windows(ids.subspan(i), order, out + i);
}

double sum(std::span<const double> values) {
  LaneSum acc;
  const std::size_t n = values.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc.add(_mm256_loadu_pd(values.data() + i));
  if (i < n) acc.add(load_tail(values.data() + i, n - i));
  return acc.reduce();
}

double jsd_terms(std::span<const double> p, std::span<const double> q) {
  LaneSum acc;
  const std::size_t n = p.size();
  const __m256d two = _mm256_set1_pd(2.0);
  auto block = [&](__m256d a, __m256d b) {
    const __m256d m = _mm256_add_pd(a, b);
    // Padding lanes have m == 0; both halves are masked out through p == 0.
    const __m256d safe_m = _mm256_blendv_pd(
        m, two, _mm256_cmp_pd(m, _mm256_setzero_pd(), _CMP_EQ_OQ));
    const __m256d two_over_m = _mm256_div_pd(two, safe_m);
    acc.add(jsd_half(a, two_over_m));
    acc.add(jsd_half(b, two_over_m));
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) block(_mm256_loadu_pd(p.data() + i), _mm256_loadu_pd(q.data() + i));
  if (i < n) block(load_tail(p.data() + i, n - i), load_tail(q.data() + i, n - i));
  return acc.reduce();
}

double kl_terms(std::span<const double> p, std::span<const double> q) {
  LaneSum acc;
  const std::size_t n = p.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  bool infinite = false;
  auto block = [&](__m256d a, __m256d b) {
    const __m256d active = _mm256_cmp_pd(a, zero, _CMP_GT_OQ);
    const __m256d q_zero = _mm256_cmp_pd(b, zero, _CMP_LE_OQ);
    if (_mm256_movemask_pd(_mm256_and_pd(active, q_zero)) != 0) infinite = true;
    const __m256d ratio = _mm256_blendv_pd(one, _mm256_div_pd(a, _mm256_blendv_pd(b, one, q_zero)),
                                           _mm256_andnot_pd(q_zero, active));
    acc.add(_mm256_and_pd(active, _mm256_mul_pd(a, log_pd(ratio))));
  };
  std::size_t i = 0;
  for (; i + 4 <= n && !infinite; i += 4) {
    block(_mm256_loadu_pd(p.data() + i), _mm256_loadu_pd(q.data() + i));
  }
  if (!infinite && i < n) block(load_tail(p.data() + i, n - i), load_tail(q.data() + i, n - i));
  return infinite ? std::numeric_limits<double>::infinity() : acc.reduce();
}

}  // namespace phonojsd::avx2
