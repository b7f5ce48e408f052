#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phonojsd/ngram_stats.hpp"

namespace phonojsd {

enum class LogBase { nats, bits };

std::string_view to_string(LogBase base);
LogBase parse_log_base(std::string_view text);

/// Converts a divergence from nats into `base`.
double from_nats(double value, LogBase base);
/// Converts a divergence expressed in `from` into `to`.
double convert_base(double value, LogBase from, LogBase to);

/// KL(P || Q). +infinity when Q misses part of P's support. Throws
/// std::invalid_argument when orders, inventories or SIL handling differ.
double kl_divergence(const NGramDistribution& p, const NGramDistribution& q,
                     LogBase base = LogBase::nats);

/// Jensen-Shannon divergence: 1/2 KL(P || M) + 1/2 KL(Q || M), M = (P + Q) / 2.
/// Always finite, symmetric, in [0, ln 2] nats (1 bit).
double js_divergence(const NGramDistribution& p, const NGramDistribution& q,
                     LogBase base = LogBase::nats);

struct SupportSizes {
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t mixture = 0;
};

struct JsdProfile {
  LogBase log_base = LogBase::nats;
  int n_max = kMaxOrder;
  std::array<std::optional<double>, kMaxOrder> jsd{};
  std::array<SupportSizes, kMaxOrder> support{};
  std::vector<std::string> warnings;  // orders omitted for lack of n-grams
  std::string speech_id;
  std::string text_id;

  std::optional<double> at(int order) const { return jsd.at(static_cast<std::size_t>(order - 1)); }
};

/// JSD per order 1..n_max between the speech-side and text-side tables.
/// Orders with no n-grams on either side are omitted and noted in warnings.
JsdProfile jsd_profile(const NGramCountTable& speech, const NGramCountTable& text, int n_max,
                       LogBase base = LogBase::nats);

}  // namespace phonojsd
