#include <cmath>
#include <limits>

#include "phonojsd/kernels.hpp"

namespace phonojsd::scalar {

void pack_windows(std::span<const std::uint16_t> ids, int order, std::uint64_t* out) {
  const std::size_t n = ids.size() + 1 - static_cast<std::size_t>(order);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t key = 0;
    for (int j = 0; j < order; ++j) {
      key |= static_cast<std::uint64_t>(ids[i + j] + 1u) << (16 * j);
    }
    out[i] = key;
  }
}

namespace {

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double sum(std::span<const double> values) {
  Neumaier acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double jsd_terms(std::span<const double> p, std::span<const double> q) {
  Neumaier acc;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i];
    const double b = q[i];
    const double m = a + b;
    if (a > 0.0) acc.add(a * std::log(2.0 * a / m));
    if (b > 0.0) acc.add(b * std::log(2.0 * b / m));
  }
  return acc.value();
}

double kl_terms(std::span<const double> p, std::span<const double> q) {
  Neumaier acc;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    acc.add(p[i] * std::log(p[i] / q[i]));
  }
  return acc.value();
}

}  // namespace phonojsd::scalar
