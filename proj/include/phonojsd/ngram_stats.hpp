#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phonojsd/phonemizer.hpp"

namespace phonojsd {

inline constexpr int kMaxOrder = 4;

/// An n-gram of 1..4 phoneme ids packed into one 64-bit word: lane j (bits
/// 16j..16j+15) holds ids[j] + 1, unused lanes are zero. Zero is therefore
/// never a valid key and keys of different orders never coincide.
struct NGramKey {
  int order = 0;
  std::uint64_t packed = 0;

  static NGramKey pack(std::span<const PhonemeId> ids);
  std::vector<PhonemeId> unpack() const;

  auto operator<=>(const NGramKey&) const = default;
};

/// Space-separated labels, e.g. "DH AH".
std::string format_key(const NGramKey& key, const PhonemeInventory& inventory);

using CountEntry = std::pair<std::uint64_t, std::uint64_t>;  // packed key, count

namespace detail {

/// Open-addressing (linear probing) counter keyed by non-zero packed n-grams.
/// 16 bytes per slot, load factor kept in (0.4, 0.8].
class FlatCounter {
 public:
  FlatCounter() = default;
  FlatCounter(const FlatCounter& other);
  FlatCounter& operator=(const FlatCounter& other);
  FlatCounter(FlatCounter&&) noexcept = default;
  FlatCounter& operator=(FlatCounter&&) noexcept = default;

  void add(std::uint64_t key, std::uint64_t count = 1);
  void add_keys(std::span<const std::uint64_t> keys);
  std::uint64_t count(std::uint64_t key) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t memory_bytes() const { return capacity_ * sizeof(Slot); }
  /// Largest footprint seen so far, including old + new arrays while growing.
  std::size_t peak_bytes() const { return peak_bytes_; }

  std::vector<CountEntry> sorted_entries() const;

  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t i = 0; i < capacity_; ++i) {
      if (slots_[i].key != 0) fn(slots_[i].key, slots_[i].count);
    }
  }

 private:
  struct Slot {
    std::uint64_t key;
    std::uint64_t count;
  };

  void grow();
  static std::size_t slot_for(std::uint64_t key, std::size_t mask);

  std::unique_ptr<Slot[]> slots_;
  std::size_t capacity_ = 0;
  std::size_t size_ = 0;
  std::size_t peak_bytes_ = 0;
};

}  // namespace detail

/// Exact per-order n-gram counts. Two tables can only be combined when they
/// were counted over the same inventory with the same SIL handling.
class NGramCountTable {
 public:
  NGramCountTable(std::uint64_t inventory_fingerprint, int n_max, bool include_sil);

  std::uint64_t fingerprint() const { return fingerprint_; }
  int n_max() const { return n_max_; }
  bool include_sil() const { return include_sil_; }

  std::uint64_t count(const NGramKey& key) const;
  std::uint64_t total(int order) const;
  std::size_t distinct(int order) const;
  /// Sorted by packed key.
  std::vector<CountEntry> entries(int order) const;

  void add_count(int order, std::uint64_t packed, std::uint64_t count);
  void add_keys(int order, std::span<const std::uint64_t> keys);

  /// Throws std::invalid_argument unless fingerprints, n_max and include_sil match.
  void merge_from(const NGramCountTable& other);

  std::size_t memory_bytes() const;
  std::size_t peak_bytes() const;
  std::size_t distinct_total() const;

  bool operator==(const NGramCountTable& other) const;

 private:
  const detail::FlatCounter& order_table(int order) const;

  std::uint64_t fingerprint_;
  int n_max_;
  bool include_sil_;
  std::array<detail::FlatCounter, kMaxOrder> orders_;
  std::array<std::uint64_t, kMaxOrder> totals_{};
};

/// Streaming counter: memory grows with the number of distinct n-grams only.
class NGramCounter {
 public:
  NGramCounter(const PhonemeInventory& inventory, int n_max, bool include_sil);

  /// Counts all windows of orders 1..n_max inside the sequence. Throws
  /// std::invalid_argument on a foreign inventory fingerprint or bad id.
  void add(const PhonemeSequence& sequence);
  void add_ids(std::span<const PhonemeId> ids);

  const NGramCountTable& table() const { return table_; }
  NGramCountTable take() { return std::move(table_); }

 private:
  NGramCountTable table_;
  std::size_t inventory_size_;
  PhonemeId sil_;
  std::vector<PhonemeId> filtered_;
  std::vector<std::uint64_t> keys_;
};

NGramCountTable count_ngrams(std::span<const PhonemeSequence> sequences,
                             const PhonemeInventory& inventory, int n_max, bool include_sil);

NGramCountTable merge(const NGramCountTable& a, const NGramCountTable& b);

/// Normalized counts of one order, sorted by packed key.
class NGramDistribution {
 public:
  /// Validates entries (positive, unique keys of the given order) and that the
  /// probabilities sum to 1 within 1e-9. Sorts by key.
  static NGramDistribution from_probabilities(int order, std::vector<std::pair<std::uint64_t, double>> entries,
                                              std::uint64_t inventory_fingerprint,
                                              bool include_sil);

  int order() const { return order_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  bool include_sil() const { return include_sil_; }
  std::size_t size() const { return keys_.size(); }
  std::span<const std::uint64_t> keys() const { return keys_; }
  std::span<const double> probabilities() const { return probs_; }
  /// Zero when the key is outside the support.
  double probability(const NGramKey& key) const;

 private:
  friend NGramDistribution to_distribution(const NGramCountTable& table, int order);

  int order_ = 0;
  std::uint64_t fingerprint_ = 0;
  bool include_sil_ = false;
  std::vector<std::uint64_t> keys_;
  std::vector<double> probs_;
};

/// count / total for every observed key; throws ComputationError
/// ("no n-grams observed") when the order is empty.
NGramDistribution to_distribution(const NGramCountTable& table, int order);

/// Highest-probability entries, ties broken by ascending packed key.
std::vector<std::pair<NGramKey, double>> top_k(const NGramDistribution& dist, std::size_t k);

}  // namespace phonojsd
