#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phonojsd/rng.hpp"

namespace phonojsd {

using PhonemeId = std::uint16_t;

inline constexpr std::string_view kSilenceLabel = "SIL";
inline constexpr std::string_view kUnknownLabel = "UNK";

/// Largest inventory whose ids still pack as (id + 1) into 16 bits.
inline constexpr std::size_t kMaxInventorySize = 65535;

/// Ordered phoneme labels with dense ids. Always contains exactly one SIL.
class PhonemeInventory {
 public:
  PhonemeInventory();
  explicit PhonemeInventory(std::vector<std::string> labels);

  /// Returns the id of `label`, adding it at the end when absent.
  PhonemeId intern(std::string_view label);
  std::optional<PhonemeId> find(std::string_view label) const;

  const std::string& label(PhonemeId id) const { return labels_.at(id); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  PhonemeId sil() const { return sil_; }
  std::optional<PhonemeId> unk() const { return find(kUnknownLabel); }

  /// FNV-1a 64 over the labels in id order, each followed by a 0x00 byte.
  std::uint64_t fingerprint() const;

  bool operator==(const PhonemeInventory& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, PhonemeId> index_;
  PhonemeId sil_ = 0;
};

struct PhonemeSequence {
  std::vector<PhonemeId> ids;
  std::string origin;
  std::uint64_t inventory = 0;  // fingerprint of the inventory the ids refer to

  bool operator==(const PhonemeSequence&) const = default;
};

using Pronunciation = std::vector<PhonemeId>;

/// Word -> pronunciations, keyed by upper-cased word. Immutable once loaded.
class PronunciationLexicon {
 public:
  PronunciationLexicon() = default;

  /// Parses a CMUdict-style lexicon. Lines beginning with ";;;" are comments;
  /// "WORD(2)" adds a variant pronunciation of WORD. With `strip_stress`, a
  /// trailing stress digit 0-2 is dropped from vowel labels before they
  /// enter the inventory. Throws DataError with the line number on malformed
  /// lines and when the file cannot be opened.
  static PronunciationLexicon load(const std::filesystem::path& path, bool strip_stress);
  static PronunciationLexicon parse(std::istream& in, bool strip_stress,
                                    std::string_view source_name = "<lexicon>");

  /// Copy whose inventory also contains the UNK phoneme.
  PronunciationLexicon with_unk() const;

  const PhonemeInventory& inventory() const { return inventory_; }
  std::size_t size() const { return entries_.size(); }

  /// Case-insensitive; nullptr when the word is not in the lexicon.
  const std::vector<Pronunciation>* pronunciations(std::string_view word) const;
  const Pronunciation* primary(std::string_view word) const;

 private:
  PhonemeInventory inventory_;
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
};

enum class OovPolicy { drop_sentence, drop_word, unk };

std::string_view to_string(OovPolicy policy);
/// Accepts "drop-sentence"/"drop_sentence", "drop-word"/"drop_word", "unk".
OovPolicy parse_oov_policy(std::string_view text);

/// Upper-cases, removes punctuation except apostrophes between two
/// alphanumerics, and splits on whitespace. Invalid UTF-8 bytes are dropped.
std::vector<std::string> normalize_text(std::string_view raw);

/// Upper-case mapping used for both lexicon keys and corpus tokens.
std::string fold_case(std::string_view word);

struct PhonemizedSentence {
  bool skipped = false;  // whole sentence dropped by the OOV policy
  PhonemeSequence sequence;
  /// Interior positions in `sequence.ids` where a new word starts.
  std::vector<std::size_t> word_boundaries;
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;
};

/// Concatenates primary pronunciations. Under OovPolicy::unk the lexicon must
/// carry UNK in its inventory (see with_unk), otherwise std::invalid_argument.
PhonemizedSentence phonemize_sentence(std::span<const std::string> tokens,
                                      const PronunciationLexicon& lexicon, OovPolicy policy);

/// Inserts SIL independently with probability `rate` at each word boundary,
/// and unconditionally at the start and end of a non-empty sequence.
PhonemeSequence insert_silence(const PhonemeSequence& sequence,
                               std::span<const std::size_t> word_boundaries, double rate,
                               PhonemeId sil, Xoshiro256& rng);

struct LineOptions {
  OovPolicy oov = OovPolicy::drop_sentence;
  bool insert_silence = true;
  double sil_rate = 0.25;
  std::uint64_t seed = 0;
};

/// normalize_text -> phonemize_sentence -> insert_silence for one corpus
/// line. Silence draws come from Xoshiro256::for_stream(seed, line_index), so
/// the result depends only on the line and its index. word_boundaries of the
/// result are left empty.
PhonemizedSentence phonemize_line(std::string_view line, std::uint64_t line_index,
                                  const PronunciationLexicon& lexicon, const LineOptions& options);

}  // namespace phonojsd
