#include "phonojsd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phonojsd/errors.hpp"
#include "phonojsd/kernels.hpp"

namespace phonojsd {

namespace {

void check_compatible(const NGramDistribution& p, const NGramDistribution& q) {
  if (p.order() != q.order()) throw std::invalid_argument("distributions have different orders");
  if (p.fingerprint() != q.fingerprint()) {
    throw std::invalid_argument("distributions use different phoneme inventories");
  }
  if (p.include_sil() != q.include_sil()) {
    throw std::invalid_argument("distributions differ in SIL handling");
  }
}

struct Aligned {
  std::vector<double> p;
  std::vector<double> q;
};

// Merge-join over the sorted supports; absent keys get probability 0.
Aligned align(const NGramDistribution& p, const NGramDistribution& q) {
  const auto pk = p.keys();
  const auto qk = q.keys();
  const auto pv = p.probabilities();
  const auto qv = q.probabilities();
  Aligned out;
  out.p.reserve(pk.size() + qk.size());
  out.q.reserve(pk.size() + qk.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < pk.size() || j < qk.size()) {
    if (j == qk.size() || (i < pk.size() && pk[i] < qk[j])) {
      out.p.push_back(pv[i++]);
      out.q.push_back(0.0);
    } else if (i == pk.size() || qk[j] < pk[i]) {
      out.p.push_back(0.0);
      out.q.push_back(qv[j++]);
    } else {
      out.p.push_back(pv[i++]);
      out.q.push_back(qv[j++]);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(LogBase base) { return base == LogBase::bits ? "bits" : "nats"; }

LogBase parse_log_base(std::string_view text) {
  if (text == "nats") return LogBase::nats;
  if (text == "bits") return LogBase::bits;
  throw std::invalid_argument("unknown log base '" + std::string(text) + "'");
}

double from_nats(double value, LogBase base) {
  return base == LogBase::bits ? value / std::numbers::ln2 : value;
}

double convert_base(double value, LogBase from, LogBase to) {
  if (from == to) return value;
  return to == LogBase::bits ? value / std::numbers::ln2 : value * std::numbers::ln2;
}

double kl_divergence(const NGramDistribution& p, const NGramDistribution& q, LogBase base) {
  check_compatible(p, q);
  const auto a = align(p, q);
  const double nats = kernels().kl_terms(a.p, a.q);
  if (std::isinf(nats)) return nats;
  return from_nats(nats, base);
}

double js_divergence(const NGramDistribution& p, const NGramDistribution& q, LogBase base) {
  check_compatible(p, q);
  const auto a = align(p, q);
  const double nats = 0.5 * kernels().jsd_terms(a.p, a.q);
  // Rounding can leave a few ulps outside [0, ln 2].
  return from_nats(std::clamp(nats, 0.0, std::numbers::ln2), base);
}

JsdProfile jsd_profile(const NGramCountTable& speech, const NGramCountTable& text, int n_max,
                       LogBase base) {
  if (n_max < 1 || n_max > kMaxOrder) throw std::invalid_argument("n_max must be in 1..4");
  if (speech.fingerprint() != text.fingerprint()) {
    throw std::invalid_argument("speech and text tables use different phoneme inventories");
  }
  if (speech.include_sil() != text.include_sil()) {
    throw std::invalid_argument("speech and text tables differ in SIL handling");
  }
  if (n_max > speech.n_max() || n_max > text.n_max()) {
    throw std::invalid_argument("requested order exceeds what the tables were counted with");
  }
  JsdProfile profile;
  profile.log_base = base;
  profile.n_max = n_max;
  for (int order = 1; order <= n_max; ++order) {
    const auto idx = static_cast<std::size_t>(order - 1);
    if (speech.total(order) == 0 || text.total(order) == 0) {
      profile.warnings.push_back("order " + std::to_string(order) +
                                 " omitted: no n-grams observed on the " +
                                 (speech.total(order) == 0 ? "speech" : "text") + " side");
      continue;
    }
    const auto p = to_distribution(speech, order);
    const auto q = to_distribution(text, order);
    const auto a = align(p, q);
    profile.support[idx] = {p.size(), q.size(), a.p.size()};
    const double nats = std::clamp(0.5 * kernels().jsd_terms(a.p, a.q), 0.0, std::numbers::ln2);
    profile.jsd[idx] = from_nats(nats, base);
  }
  return profile;
}

}  // namespace phonojsd
