#include "phonojsd/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "phonojsd/errors.hpp"
#include "phonojsd/rng.hpp"

namespace phonojsd {

SpeechManifest::SpeechManifest(std::vector<UtteranceRecord> records) : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  seen.reserve(records_.size());
  for (const auto& r : records_) {
    if (r.id.empty()) throw std::invalid_argument("empty utterance id");
    if (!std::isfinite(r.duration) || r.duration < 0.0) {
      throw std::invalid_argument("utterance '" + r.id + "' has an invalid duration");
    }
    if (!seen.insert(r.id).second) throw std::invalid_argument("duplicate utterance id '" + r.id + "'");
  }
}

SpeechManifest SpeechManifest::parse(std::istream& in, std::string_view source_name) {
  std::vector<UtteranceRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(std::string(source_name) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) fail("expected utt_id<TAB>duration<TAB>transcript");
    UtteranceRecord r;
    r.id = line.substr(0, t1);
    if (r.id.empty()) fail("empty utterance id");
    const char* first = line.data() + t1 + 1;
    const char* last = line.data() + t2;
    auto [ptr, ec] = std::from_chars(first, last, r.duration);
    if (ec != std::errc() || ptr != last || !std::isfinite(r.duration) || r.duration < 0.0) {
      fail("invalid duration '" + std::string(first, last) + "'");
    }
    r.transcript = line.substr(t2 + 1);
    if (!seen.insert(r.id).second) fail("duplicate utterance id '" + r.id + "'");
    records.push_back(std::move(r));
  }
  SpeechManifest m;
  m.records_ = std::move(records);
  return m;
}

SpeechManifest SpeechManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  return parse(in, path.string());
}

double SpeechManifest::total_seconds() const {
  double total = 0.0;
  for (const auto& r : records_) total += r.duration;
  return total;
}

double SpeechManifest::max_duration() const {
  double m = 0.0;
  for (const auto& r : records_) m = std::max(m, r.duration);
  return m;
}

std::string_view to_string(SelectionProtocol protocol) {
  switch (protocol) {
    case SelectionProtocol::sentence_cap: return "sentence_cap";
    case SelectionProtocol::hour_cap: return "hour_cap";
    case SelectionProtocol::ratio_split: return "ratio_split";
  }
  return "?";
}

SelectionProtocol parse_selection_protocol(std::string_view text) {
  if (text == "sentence_cap") return SelectionProtocol::sentence_cap;
  if (text == "hour_cap") return SelectionProtocol::hour_cap;
  if (text == "ratio_split") return SelectionProtocol::ratio_split;
  throw std::invalid_argument("unknown selection protocol '" + std::string(text) + "'");
}

std::string selection_to_json(const Selection& selection) {
  nlohmann::json j;
  j["seed"] = selection.seed;
  j["protocol"] = std::string(to_string(selection.protocol));
  j["ids"] = selection.ids;
  return j.dump();
}

Selection selection_from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    Selection s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.protocol = parse_selection_protocol(j.at("protocol").get<std::string>());
    s.ids = j.at("ids").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed selection: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed selection: ") + e.what());
  }
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  k = std::min(k, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k < n) {
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

std::vector<std::string> subsample_sentences(const std::vector<std::string>& corpus,
                                             std::size_t k, std::uint64_t seed) {
  std::vector<std::string> out;
  const auto idx = subsample_indices(corpus.size(), k, seed);
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(corpus[i]);
  return out;
}

namespace {

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Xoshiro256 rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

Selection selection_from(const SpeechManifest& manifest, std::vector<std::size_t> chosen,
                         std::uint64_t seed, SelectionProtocol protocol) {
  std::sort(chosen.begin(), chosen.end());
  Selection s;
  s.seed = seed;
  s.protocol = protocol;
  s.ids.reserve(chosen.size());
  for (std::size_t i : chosen) s.ids.push_back(manifest.records()[i].id);
  return s;
}

}  // namespace

Selection subsample_speech_hours(const SpeechManifest& manifest, double target_hours,
                                 std::uint64_t seed) {
  if (!(target_hours > 0.0) || !std::isfinite(target_hours)) {
    throw std::invalid_argument("target hours must be a positive number");
  }
  if (manifest.empty()) throw std::invalid_argument("manifest is empty");
  if (!(manifest.total_seconds() > 0.0)) throw std::invalid_argument("manifest has zero total duration");

  const double target_seconds = target_hours * 3600.0;
  std::vector<std::size_t> chosen;
  double total = 0.0;
  for (std::size_t i : shuffled_order(manifest.size(), seed)) {
    if (total >= target_seconds) break;
    total += manifest.records()[i].duration;
    chosen.push_back(i);
  }
  return selection_from(manifest, std::move(chosen), seed, SelectionProtocol::hour_cap);
}

std::pair<Selection, Selection> split_train_valid(const SpeechManifest& manifest,
                                                  double valid_ratio, std::uint64_t seed) {
  if (!(valid_ratio > 0.0 && valid_ratio < 1.0)) {
    throw std::invalid_argument("valid ratio must lie strictly between 0 and 1");
  }
  if (manifest.empty()) throw std::invalid_argument("manifest is empty");
  const std::size_t n = manifest.size();
  // ceil((1 - r) N), snapping values within 1e-9 of an integer so that e.g.
  // 0.8 * 10 is 8 rather than 9.
  const double exact = (1.0 - valid_ratio) * static_cast<double>(n);
  const double nearest = std::round(exact);
  const auto n_train = static_cast<std::size_t>(
      std::fabs(exact - nearest) < 1e-9 * std::max(1.0, exact) ? nearest : std::ceil(exact));

  const auto order = shuffled_order(n, seed);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> valid(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {selection_from(manifest, std::move(train), seed, SelectionProtocol::ratio_split),
          selection_from(manifest, std::move(valid), seed, SelectionProtocol::ratio_split)};
}

MatchedTexts derive_matched_unmatched(const SpeechManifest& manifest, const Selection& selection) {
  std::unordered_set<std::string_view> chosen(selection.ids.begin(), selection.ids.end());
  std::unordered_set<std::string_view> known;
  known.reserve(manifest.size());
  for (const auto& r : manifest.records()) known.insert(r.id);
  for (const auto& id : selection.ids) {
    if (!known.contains(id)) {
      throw std::invalid_argument("selected utterance '" + id + "' is not in the manifest");
    }
  }
  MatchedTexts out;
  for (const auto& r : manifest.records()) {
    (chosen.contains(r.id) ? out.matched : out.unmatched).push_back(r.transcript);
  }
  return out;
}

}  // namespace phonojsd
