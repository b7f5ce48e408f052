#include "phonojsd/ngram_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "phonojsd/errors.hpp"
#include "phonojsd/kernels.hpp"

namespace phonojsd {

namespace {

void check_order(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("n-gram order must be in 1.." + std::to_string(kMaxOrder));
  }
}

int order_of(std::uint64_t packed) {
  int order = 0;
  while (order < kMaxOrder && ((packed >> (16 * order)) & 0xFFFF) != 0) ++order;
  return order;
}

}  // namespace

NGramKey NGramKey::pack(std::span<const PhonemeId> ids) {
  check_order(static_cast<int>(ids.size()));
  NGramKey key;
  key.order = static_cast<int>(ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] >= kMaxInventorySize) throw std::invalid_argument("phoneme id out of range");
    key.packed |= static_cast<std::uint64_t>(ids[j] + 1u) << (16 * j);
  }
  return key;
}

std::vector<PhonemeId> NGramKey::unpack() const {
  std::vector<PhonemeId> ids(static_cast<std::size_t>(order));
  for (int j = 0; j < order; ++j) {
    ids[static_cast<std::size_t>(j)] = static_cast<PhonemeId>(((packed >> (16 * j)) & 0xFFFF) - 1);
  }
  return ids;
}

std::string format_key(const NGramKey& key, const PhonemeInventory& inventory) {
  std::string out;
  for (PhonemeId id : key.unpack()) {
    if (!out.empty()) out.push_back(' ');
    out += inventory.label(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// FlatCounter

namespace detail {

FlatCounter::FlatCounter(const FlatCounter& other)
    : capacity_(other.capacity_), size_(other.size_), peak_bytes_(other.memory_bytes()) {
  if (capacity_ != 0) {
    slots_ = std::make_unique<Slot[]>(capacity_);
    std::memcpy(slots_.get(), other.slots_.get(), capacity_ * sizeof(Slot));
  }
}

FlatCounter& FlatCounter::operator=(const FlatCounter& other) {
  if (this != &other) *this = FlatCounter(other);
  return *this;
}

std::size_t FlatCounter::slot_for(std::uint64_t key, std::size_t mask) {
  // murmur3 finalizer
  key ^= key >> 33;
  key *= 0xff51afd7ed558ccdULL;
  key ^= key >> 33;
  key *= 0xc4ceb9fe1a85ec53ULL;
  key ^= key >> 33;
  return static_cast<std::size_t>(key) & mask;
}

void FlatCounter::grow() {
  const std::size_t new_capacity = capacity_ == 0 ? 16 : capacity_ * 2;
  auto fresh = std::make_unique<Slot[]>(new_capacity);
  peak_bytes_ = std::max(peak_bytes_, (capacity_ + new_capacity) * sizeof(Slot));
  const std::size_t mask = new_capacity - 1;
  for (std::size_t i = 0; i < capacity_; ++i) {
    const Slot& s = slots_[i];
    if (s.key == 0) continue;
    std::size_t pos = slot_for(s.key, mask);
    while (fresh[pos].key != 0) pos = (pos + 1) & mask;
    fresh[pos] = s;
  }
  slots_ = std::move(fresh);
  capacity_ = new_capacity;
}

void FlatCounter::add(std::uint64_t key, std::uint64_t count) {
  if ((size_ + 1) * 5 > capacity_ * 4) grow();
  const std::size_t mask = capacity_ - 1;
  std::size_t pos = slot_for(key, mask);
  for (;;) {
    Slot& s = slots_[pos];
    if (s.key == key) {
      s.count += count;
      return;
    }
    if (s.key == 0) {
      s.key = key;
      s.count = count;
      ++size_;
      return;
    }
    pos = (pos + 1) & mask;
  }
}

void FlatCounter::add_keys(std::span<const std::uint64_t> keys) {
  for (std::uint64_t key : keys) add(key, 1);
}

std::uint64_t FlatCounter::count(std::uint64_t key) const {
  if (capacity_ == 0 || key == 0) return 0;
  const std::size_t mask = capacity_ - 1;
  std::size_t pos = slot_for(key, mask);
  for (;;) {
    const Slot& s = slots_[pos];
    if (s.key == key) return s.count;
    if (s.key == 0) return 0;
    pos = (pos + 1) & mask;
  }
}

std::vector<CountEntry> FlatCounter::sorted_entries() const {
  std::vector<CountEntry> out;
  out.reserve(size_);
  for_each([&out](std::uint64_t k, std::uint64_t c) { out.emplace_back(k, c); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// NGramCountTable

NGramCountTable::NGramCountTable(std::uint64_t inventory_fingerprint, int n_max, bool include_sil)
    : fingerprint_(inventory_fingerprint), n_max_(n_max), include_sil_(include_sil) {
  check_order(n_max);
}

const detail::FlatCounter& NGramCountTable::order_table(int order) const {
  check_order(order);
  return orders_[static_cast<std::size_t>(order - 1)];
}

std::uint64_t NGramCountTable::count(const NGramKey& key) const {
  if (key.order < 1 || key.order > n_max_) return 0;
  return order_table(key.order).count(key.packed);
}

std::uint64_t NGramCountTable::total(int order) const {
  check_order(order);
  return totals_[static_cast<std::size_t>(order - 1)];
}

std::size_t NGramCountTable::distinct(int order) const { return order_table(order).size(); }

std::vector<CountEntry> NGramCountTable::entries(int order) const {
  return order_table(order).sorted_entries();
}

void NGramCountTable::add_count(int order, std::uint64_t packed, std::uint64_t count) {
  check_order(order);
  if (order > n_max_) throw std::invalid_argument("order exceeds table n_max");
  if (order_of(packed) != order || (order < kMaxOrder && (packed >> (16 * order)) != 0)) {
    throw std::invalid_argument("packed key does not match its order");
  }
  if (count == 0) return;
  const auto idx = static_cast<std::size_t>(order - 1);
  orders_[idx].add(packed, count);
  totals_[idx] += count;
}

void NGramCountTable::add_keys(int order, std::span<const std::uint64_t> keys) {
  const auto idx = static_cast<std::size_t>(order - 1);
  orders_[idx].add_keys(keys);
  totals_[idx] += keys.size();
}

void NGramCountTable::merge_from(const NGramCountTable& other) {
  if (other.fingerprint_ != fingerprint_) {
    throw std::invalid_argument("cannot merge count tables built over different inventories");
  }
  if (other.include_sil_ != include_sil_ || other.n_max_ != n_max_) {
    throw std::invalid_argument("cannot merge count tables with different settings");
  }
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    auto& dst = orders_[i];
    other.orders_[i].for_each([&dst](std::uint64_t k, std::uint64_t c) { dst.add(k, c); });
    totals_[i] += other.totals_[i];
  }
}

std::size_t NGramCountTable::memory_bytes() const {
  std::size_t bytes = 0;
  for (const auto& t : orders_) bytes += t.memory_bytes();
  return bytes;
}

std::size_t NGramCountTable::peak_bytes() const {
  std::size_t bytes = 0;
  for (const auto& t : orders_) bytes += t.peak_bytes();
  return bytes;
}

std::size_t NGramCountTable::distinct_total() const {
  std::size_t n = 0;
  for (const auto& t : orders_) n += t.size();
  return n;
}

bool NGramCountTable::operator==(const NGramCountTable& other) const {
  if (fingerprint_ != other.fingerprint_ || n_max_ != other.n_max_ ||
      include_sil_ != other.include_sil_ || totals_ != other.totals_) {
    return false;
  }
  for (int order = 1; order <= kMaxOrder; ++order) {
    if (entries(order) != other.entries(order)) return false;
  }
  return true;
}

NGramCountTable merge(const NGramCountTable& a, const NGramCountTable& b) {
  NGramCountTable out = a;
  out.merge_from(b);
  return out;
}

// ---------------------------------------------------------------------------
// NGramCounter

NGramCounter::NGramCounter(const PhonemeInventory& inventory, int n_max, bool include_sil)
    : table_(inventory.fingerprint(), n_max, include_sil),
      inventory_size_(inventory.size()),
      sil_(inventory.sil()) {}

void NGramCounter::add(const PhonemeSequence& sequence) {
  if (sequence.inventory != table_.fingerprint()) {
    throw std::invalid_argument("phoneme sequence was built over a different inventory");
  }
  add_ids(sequence.ids);
}

void NGramCounter::add_ids(std::span<const PhonemeId> ids) {
  filtered_.clear();
  filtered_.reserve(ids.size());
  const bool keep_sil = table_.include_sil();
  for (PhonemeId id : ids) {
    if (id >= inventory_size_) throw std::invalid_argument("phoneme id outside the inventory");
    if (keep_sil || id != sil_) filtered_.push_back(id);
  }
  const auto& k = kernels();
  for (int order = 1; order <= table_.n_max(); ++order) {
    if (filtered_.size() < static_cast<std::size_t>(order)) break;
    keys_.resize(filtered_.size() - static_cast<std::size_t>(order) + 1);
    k.pack_windows(filtered_, order, keys_.data());
    table_.add_keys(order, keys_);
  }
}

NGramCountTable count_ngrams(std::span<const PhonemeSequence> sequences,
                             const PhonemeInventory& inventory, int n_max, bool include_sil) {
  NGramCounter counter(inventory, n_max, include_sil);
  for (const auto& seq : sequences) counter.add(seq);
  return counter.take();
}

// ---------------------------------------------------------------------------
// NGramDistribution

NGramDistribution NGramDistribution::from_probabilities(
    int order, std::vector<std::pair<std::uint64_t, double>> entries,
    std::uint64_t inventory_fingerprint, bool include_sil) {
  check_order(order);
  if (entries.empty()) throw ComputationError("no n-grams observed");
  std::sort(entries.begin(), entries.end());
  NGramDistribution d;
  d.order_ = order;
  d.fingerprint_ = inventory_fingerprint;
  d.include_sil_ = include_sil;
  d.keys_.reserve(entries.size());
  d.probs_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto [key, p] = entries[i];
    if (order_of(key) != order) throw std::invalid_argument("key does not match the order");
    if (i > 0 && entries[i - 1].first == key) throw std::invalid_argument("duplicate key");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in (0, 1]");
    d.keys_.push_back(key);
    d.probs_.push_back(p);
  }
  if (std::fabs(scalar::sum(d.probs_) - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
  return d;
}

double NGramDistribution::probability(const NGramKey& key) const {
  if (key.order != order_) return 0.0;
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key.packed);
  if (it == keys_.end() || *it != key.packed) return 0.0;
  return probs_[static_cast<std::size_t>(it - keys_.begin())];
}

NGramDistribution to_distribution(const NGramCountTable& table, int order) {
  check_order(order);
  if (order > table.n_max() || table.total(order) == 0) {
    throw ComputationError("no n-grams observed at order " + std::to_string(order));
  }
  const auto entries = table.entries(order);
  const double total = static_cast<double>(table.total(order));
  NGramDistribution d;
  d.order_ = order;
  d.fingerprint_ = table.fingerprint();
  d.include_sil_ = table.include_sil();
  d.keys_.reserve(entries.size());
  d.probs_.reserve(entries.size());
  for (const auto& [key, count] : entries) {
    d.keys_.push_back(key);
    d.probs_.push_back(static_cast<double>(count) / total);
  }
  return d;
}

std::vector<std::pair<NGramKey, double>> top_k(const NGramDistribution& dist, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  std::vector<std::size_t> idx(dist.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto keys = dist.keys();
  const auto probs = dist.probabilities();
  const std::size_t n = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (probs[a] != probs[b]) return probs[a] > probs[b];
                      return keys[a] < keys[b];
                    });
  std::vector<std::pair<NGramKey, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({NGramKey{dist.order(), keys[idx[i]]}, probs[idx[i]]});
  }
  return out;
}

}  // namespace phonojsd
