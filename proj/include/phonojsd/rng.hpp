#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace phonojsd {

/// SplitMix64, used only to expand a 64-bit seed into generator state.
/// Constants: increment 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB with shifts 30/27/31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// xoshiro256** (Blackman & Vigna). All sampling in this project goes through
/// this generator so selections are bit-reproducible across platforms.
///
/// Derived operations, fixed as part of the file-format contract:
///  - uniform_below(n): draw r = next(); reject while r < (2^64 - n) mod n;
///    return r mod n.
///  - uniform01(): (next() >> 11) * 2^-53, in [0, 1).
///  - bernoulli(p): uniform01() < p.
///  - shuffle: Fisher-Yates from the back, for i = n-1 .. 1 swap(i,
///    uniform_below(i + 1)).
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  /// Independent stream for item `stream` under `seed`; used for per-sentence
  /// randomness so results do not depend on processing order.
  static Xoshiro256 for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  std::uint64_t uniform_below(std::uint64_t bound);
  double uniform01();
  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  Xoshiro256() = default;
  std::uint64_t s_[4]{};
};

}  // namespace phonojsd
