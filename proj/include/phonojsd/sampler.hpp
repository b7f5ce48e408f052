#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phonojsd {

struct UtteranceRecord {
  std::string id;
  double duration = 0.0;  // seconds
  std::string transcript;
};

/// Speech corpus represented by its transcripts. Ids are unique, durations
/// finite and non-negative.
class SpeechManifest {
 public:
  SpeechManifest() = default;
  /// Throws std::invalid_argument on duplicate ids or bad durations.
  explicit SpeechManifest(std::vector<UtteranceRecord> records);

  /// TSV: utt_id <TAB> duration_seconds <TAB> transcript. Blank lines are
  /// skipped. Throws DataError with "source:line" context.
  static SpeechManifest parse(std::istream& in, std::string_view source_name = "<manifest>");
  static SpeechManifest load(const std::filesystem::path& path);

  const std::vector<UtteranceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  double total_seconds() const;
  double max_duration() const;

 private:
  std::vector<UtteranceRecord> records_;
};

enum class SelectionProtocol { sentence_cap, hour_cap, ratio_split };

std::string_view to_string(SelectionProtocol protocol);
SelectionProtocol parse_selection_protocol(std::string_view text);

/// Chosen utterance ids, kept in manifest order.
struct Selection {
  std::vector<std::string> ids;
  std::uint64_t seed = 0;
  SelectionProtocol protocol = SelectionProtocol::hour_cap;

  bool operator==(const Selection&) const = default;
};

/// JSON {"ids": [...], "protocol": "...", "seed": n}.
std::string selection_to_json(const Selection& selection);
Selection selection_from_json(std::string_view json);

/// Uniform sample without replacement of min(k, n) sentences in their
/// original order. Picks indices by a partial Fisher-Yates over 0..n-1
/// (for i < k: swap(i, i + uniform_below(n - i))), then sorts them.
std::vector<std::string> subsample_sentences(const std::vector<std::string>& corpus,
                                             std::size_t k, std::uint64_t seed);
/// Index form of the above.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// Walks a seeded shuffle of the manifest, taking utterances until the
/// running total reaches target_hours; the crossing utterance is kept.
Selection subsample_speech_hours(const SpeechManifest& manifest, double target_hours,
                                 std::uint64_t seed);

/// Seeded shuffle; the first ceil((1 - valid_ratio) * N) go to train.
std::pair<Selection, Selection> split_train_valid(const SpeechManifest& manifest,
                                                  double valid_ratio, std::uint64_t seed);

struct MatchedTexts {
  std::vector<std::string> matched;    // transcripts of selected utterances
  std::vector<std::string> unmatched;  // transcripts of the rest
};

/// Both lists follow manifest order. Throws std::invalid_argument when the
/// selection names an id that is not in the manifest.
MatchedTexts derive_matched_unmatched(const SpeechManifest& manifest, const Selection& selection);

}  // namespace phonojsd
