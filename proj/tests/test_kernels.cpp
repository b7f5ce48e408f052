#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "doctest.h"
#include "phonojsd/kernels.hpp"
#include "phonojsd/rng.hpp"

using namespace phonojsd;

namespace {

std::vector<double> random_distribution(Xoshiro256& rng, std::size_t n, double zero_rate) {
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    x = rng.bernoulli(zero_rate) ? 0.0 : std::exp(-8.0 * rng.uniform01());
    total += x;
  }
  if (total > 0) {
    for (auto& x : v) x /= total;
  }
  return v;
}

std::int64_t ulp_distance(double a, double b) {
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, 8);
  std::memcpy(&ib, &b, 8);
  return std::llabs(ia - ib);
}

}  // namespace

TEST_CASE("dispatch picks a supported table") {
  const auto isa = detect_isa();
  CHECK(isa_supported(isa));
  CHECK(isa_supported(Isa::scalar));
  CHECK(kernels().isa == isa);
  set_active_isa(Isa::scalar);
  CHECK(kernels().isa == Isa::scalar);
  set_active_isa(isa);
  CHECK(kernels().isa == isa);
  CHECK(to_string(Isa::scalar) == "scalar");
}

TEST_CASE("scalar pack_windows layout") {
  const std::vector<std::uint16_t> ids{0, 1, 2, 3, 4};
  std::vector<std::uint64_t> out(4);
  scalar::pack_windows(ids, 2, out.data());
  CHECK(out[0] == (1ULL | 2ULL << 16));
  CHECK(out[3] == (4ULL | 5ULL << 16));
  std::vector<std::uint64_t> four(2);
  scalar::pack_windows(ids, 4, four.data());
  CHECK(four[1] == (2ULL | 3ULL << 16 | 4ULL << 32 | 5ULL << 48));
}

TEST_CASE("scalar reference values") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  // 0.5 ln 2 + 0.5 ln(2/3)
  CHECK(scalar::kl_terms(p, q) == doctest::Approx(0.1438410362258904637).epsilon(1e-15));
  const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  CHECK(scalar::kl_terms(a, b) == std::numeric_limits<double>::infinity());
  CHECK(scalar::jsd_terms(a, b) == doctest::Approx(2 * 0.6931471805599453094).epsilon(1e-15));
  std::vector<double> cancel{1e16, 1.0, -1e16};
  CHECK(scalar::sum(cancel) == 1.0);
}

#if defined(PHONOJSD_HAVE_AVX2)

TEST_CASE("avx2 kernels match the scalar references") {
  if (!isa_supported(Isa::avx2)) return;
  Xoshiro256 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng.uniform_below(70);
    std::vector<std::uint16_t> ids(n);
    for (auto& id : ids) id = static_cast<std::uint16_t>(rng.uniform_below(65535));
    for (int order = 1; order <= 4; ++order) {
      if (n < static_cast<std::size_t>(order)) continue;
      std::vector<std::uint64_t> a(n - order + 1), b(n - order + 1);
      scalar::pack_windows(ids, order, a.data());
      avx2::pack_windows(ids, order, b.data());
      REQUIRE(a == b);
    }

    std::vector<double> values(n);
    for (auto& v : values) v = (rng.uniform01() - 0.5) * std::pow(10.0, double(rng.uniform_below(30)) - 15);
    const double s = scalar::sum(values);
    const double v = avx2::sum(values);
    CHECK(std::abs(s - v) <= 1e-15 * (std::abs(s) + 1e-300) + 1e-300);

    const auto p = random_distribution(rng, n, 0.3);
    const auto q = random_distribution(rng, n, 0.3);
    const double js = scalar::jsd_terms(p, q);
    const double jv = avx2::jsd_terms(p, q);
    CHECK(std::abs(js - jv) <= 1e-14);
    const double ks = scalar::kl_terms(p, q);
    const double kv = avx2::kl_terms(p, q);
    if (std::isinf(ks)) {
      CHECK(std::isinf(kv));
    } else {
      CHECK(std::abs(ks - kv) <= 1e-13 * std::max(1.0, std::abs(ks)));
    }
  }
}

TEST_CASE("avx2 log is within 1 ulp of libm") {
  if (!isa_supported(Isa::avx2)) return;
  Xoshiro256 rng(3);
  std::int64_t worst = 0;
  for (int i = 0; i < 200000; ++i) {
    double x[4], y[4];
    for (auto& v : x) {
      switch (rng.uniform_below(3)) {
        case 0: v = rng.uniform01() * 4.0 + 1e-300; break;
        case 1: v = std::ldexp(0.5 + rng.uniform01(), static_cast<int>(rng.uniform_below(2000)) - 1000); break;
        default: v = 1.0 + (rng.uniform01() - 0.5) * 1e-6; break;
      }
    }
    avx2::log4(x, y);
    for (int k = 0; k < 4; ++k) worst = std::max(worst, ulp_distance(y[k], std::log(x[k])));
  }
  CHECK(worst <= 1);
  double sub[4] = {4.9e-324, 1e-310, 1.0, 2.0};
  double out[4];
  avx2::log4(sub, out);
  for (int k = 0; k < 4; ++k) CHECK(ulp_distance(out[k], std::log(sub[k])) <= 1);
}

#endif
