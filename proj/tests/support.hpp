#pragma once
// Helpers shared by the unit tests and the acceptance runner: synthetic
// corpora and slow, independent reference implementations.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phonojsd/ngram_stats.hpp"
#include "phonojsd/rng.hpp"

namespace phonojsd::testing {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;
using Gram = std::vector<PhonemeId>;
using GramCounts = std::map<Gram, std::uint64_t>;

inline PhonemeInventory numbered_inventory(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("P" + std::to_string(i));
  return PhonemeInventory(labels);
}

/// Uniformly random sequences over all ids of the inventory (SIL included).
inline std::vector<PhonemeSequence> random_sequences(Xoshiro256& rng, const PhonemeInventory& inv,
                                                     std::size_t count, std::size_t max_len) {
  std::vector<PhonemeSequence> out(count);
  for (auto& seq : out) {
    seq.inventory = inv.fingerprint();
    const auto len = rng.uniform_below(max_len + 1);
    for (std::uint64_t i = 0; i < len; ++i) {
      seq.ids.push_back(static_cast<PhonemeId>(rng.uniform_below(inv.size())));
    }
  }
  return out;
}

/// Quadratic enumeration: every (start, length) pair of every sequence.
inline std::map<int, GramCounts> brute_force_counts(const std::vector<PhonemeSequence>& seqs,
                                                    int n_max, bool include_sil, PhonemeId sil) {
  std::map<int, GramCounts> counts;
  for (const auto& seq : seqs) {
    Gram ids;
    for (auto id : seq.ids) {
      if (include_sil || id != sil) ids.push_back(id);
    }
    for (std::size_t start = 0; start < ids.size(); ++start) {
      for (std::size_t len = 1; len <= static_cast<std::size_t>(n_max); ++len) {
        if (start + len > ids.size()) break;
        Gram g;
        for (std::size_t k = 0; k < len; ++k) g.push_back(ids[start + k]);
        ++counts[static_cast<int>(len)][g];
      }
    }
  }
  return counts;
}

/// JSD in nats with 50-digit arithmetic directly from raw counts.
inline HighPrecision reference_jsd(const GramCounts& p_counts, const GramCounts& q_counts) {
  HighPrecision p_total = 0, q_total = 0;
  for (const auto& [g, c] : p_counts) p_total += c;
  for (const auto& [g, c] : q_counts) q_total += c;
  std::map<Gram, std::pair<HighPrecision, HighPrecision>> joint;
  for (const auto& [g, c] : p_counts) joint[g].first = HighPrecision(c) / p_total;
  for (const auto& [g, c] : q_counts) joint[g].second = HighPrecision(c) / q_total;
  HighPrecision acc = 0;
  for (const auto& [g, pq] : joint) {
    const auto& [p, q] = pq;
    const HighPrecision m = (p + q) / 2;
    if (p > 0) acc += p * boost::multiprecision::log(p / m);
    if (q > 0) acc += q * boost::multiprecision::log(q / m);
  }
  return acc / 2;
}

/// A toy language: a vocabulary of random words (2-7 phonemes) over
/// `phonemes` ids fixed by `vocabulary_seed`, and sentences of 5-15 words
/// drawn with Zipf(1) word frequencies from the `sentence_seed` stream.
class ZipfLanguage {
 public:
  ZipfLanguage(std::uint64_t vocabulary_seed, std::uint64_t sentence_seed, std::size_t vocabulary,
               std::size_t phonemes)
      : rng_(sentence_seed), phonemes_(phonemes) {
    Xoshiro256 word_rng(vocabulary_seed);
    for (std::size_t w = 0; w < vocabulary; ++w) {
      Gram word(2 + word_rng.uniform_below(6));
      for (auto& id : word) id = static_cast<PhonemeId>(word_rng.uniform_below(phonemes));
      words_.push_back(std::move(word));
      cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + 1.0 / double(w + 1));
    }
  }

  Gram sentence() {
    Gram out;
    const auto n_words = 5 + rng_.uniform_below(11);
    for (std::uint64_t i = 0; i < n_words; ++i) {
      const double u = rng_.uniform01() * cumulative_.back();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto& word = words_[std::min<std::size_t>(it - cumulative_.begin(), words_.size() - 1)];
      out.insert(out.end(), word.begin(), word.end());
    }
    return out;
  }

  std::size_t phonemes() const { return phonemes_; }

 private:
  Xoshiro256 rng_;
  std::size_t phonemes_;
  std::vector<Gram> words_;
  std::vector<double> cumulative_;
};

}  // namespace phonojsd::testing
