#include "phonojsd/phonemizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "phonojsd/errors.hpp"

namespace phonojsd {

// ---------------------------------------------------------------------------
// PhonemeInventory

PhonemeInventory::PhonemeInventory() : PhonemeInventory(std::vector<std::string>{}) {}

PhonemeInventory::PhonemeInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (std::find(labels_.begin(), labels_.end(), kSilenceLabel) == labels_.end()) {
    labels_.emplace_back(kSilenceLabel);
  }
  if (labels_.size() > kMaxInventorySize) {
    throw std::invalid_argument("phoneme inventory exceeds " + std::to_string(kMaxInventorySize) +
                                " labels");
  }
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw std::invalid_argument("empty phoneme label");
    if (!index_.emplace(labels_[i], static_cast<PhonemeId>(i)).second) {
      throw std::invalid_argument("duplicate phoneme label '" + labels_[i] + "'");
    }
  }
  sil_ = index_.at(std::string(kSilenceLabel));
}

PhonemeId PhonemeInventory::intern(std::string_view label) {
  if (auto id = find(label)) return *id;
  if (label.empty()) throw std::invalid_argument("empty phoneme label");
  if (labels_.size() >= kMaxInventorySize) {
    throw std::invalid_argument("phoneme inventory exceeds " + std::to_string(kMaxInventorySize) +
                                " labels");
  }
  const auto id = static_cast<PhonemeId>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

std::optional<PhonemeId> PhonemeInventory::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t PhonemeInventory::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (const auto& label : labels_) {
    for (unsigned char c : label) mix(c);
    mix(0);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Text helpers

namespace {

bool is_valid_utf8(std::string_view s) {
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::vector<UChar32> decode(std::string_view s) {
  std::vector<UChar32> cps;
  cps.reserve(s.size());
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0) cps.push_back(c);
  }
  return cps;
}

void append_utf8(std::string& out, UChar32 c) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, c);
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019; }

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) || u_isspace(c); }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// "WORD(2)" -> "WORD"
std::string_view strip_variant(std::string_view word) {
  if (word.size() < 4 || word.back() != ')') return word;
  const auto open = word.rfind('(');
  if (open == std::string_view::npos || open == 0 || open + 2 > word.size() - 1) return word;
  for (std::size_t i = open + 1; i + 1 < word.size(); ++i) {
    if (word[i] < '0' || word[i] > '9') return word;
  }
  return word.substr(0, open);
}

bool is_vowel_letter(char c) {
  switch (c) {
    case 'A': case 'E': case 'I': case 'O': case 'U':
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    default:
      return false;
  }
}

std::string_view strip_stress_marker(std::string_view label) {
  if (label.size() >= 2 && is_vowel_letter(label.front()) && label.back() >= '0' &&
      label.back() <= '2') {
    return label.substr(0, label.size() - 1);
  }
  return label;
}

}  // namespace

std::string fold_case(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (UChar32 c : decode(word)) append_utf8(out, u_toupper(c));
  return out;
}

std::vector<std::string> normalize_text(std::string_view raw) {
  const auto cps = decode(raw);
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (is_space(c)) {
      flush();
    } else if (is_apostrophe(c)) {
      if (i > 0 && i + 1 < cps.size() && u_isalnum(cps[i - 1]) && u_isalnum(cps[i + 1])) {
        current.push_back('\'');
      }
    } else if (u_ispunct(c)) {
      continue;
    } else {
      append_utf8(current, u_toupper(c));
    }
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// PronunciationLexicon

PronunciationLexicon PronunciationLexicon::load(const std::filesystem::path& path,
                                                bool strip_stress) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon '" + path.string() + "'");
  return parse(in, strip_stress, path.string());
}

PronunciationLexicon PronunciationLexicon::parse(std::istream& in, bool strip_stress,
                                                 std::string_view source_name) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, PhonemeId> ids;
  PronunciationLexicon lexicon;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = is_valid_utf8(raw) ? std::move(raw) : latin1_to_utf8(raw);
    if (line.starts_with(";;;")) continue;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                      ": expected a word followed by at least one phoneme");
    }
    Pronunciation pron;
    pron.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const std::string label(strip_stress ? strip_stress_marker(fields[f]) : fields[f]);
      auto [it, inserted] = ids.try_emplace(label, static_cast<PhonemeId>(labels.size()));
      if (inserted) {
        if (labels.size() >= kMaxInventorySize - 1) {
          throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                          ": phoneme inventory too large");
        }
        labels.push_back(label);
      }
      pron.push_back(it->second);
    }
    auto& prons = lexicon.entries_[fold_case(strip_variant(fields[0]))];
    if (std::find(prons.begin(), prons.end(), pron) == prons.end()) {
      prons.push_back(std::move(pron));
    }
  }
  if (in.bad()) throw DataError("read error in lexicon '" + std::string(source_name) + "'");
  lexicon.inventory_ = PhonemeInventory(std::move(labels));
  return lexicon;
}

PronunciationLexicon PronunciationLexicon::with_unk() const {
  PronunciationLexicon copy = *this;
  copy.inventory_.intern(kUnknownLabel);
  return copy;
}

const std::vector<Pronunciation>* PronunciationLexicon::pronunciations(
    std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end()) it = entries_.find(fold_case(word));
  return it == entries_.end() ? nullptr : &it->second;
}

const Pronunciation* PronunciationLexicon::primary(std::string_view word) const {
  const auto* prons = pronunciations(word);
  return prons == nullptr ? nullptr : &prons->front();
}

// ---------------------------------------------------------------------------
// Phonemization

std::string_view to_string(OovPolicy policy) {
  switch (policy) {
    case OovPolicy::drop_sentence: return "drop-sentence";
    case OovPolicy::drop_word: return "drop-word";
    case OovPolicy::unk: return "unk";
  }
  return "?";
}

OovPolicy parse_oov_policy(std::string_view text) {
  if (text == "drop-sentence" || text == "drop_sentence") return OovPolicy::drop_sentence;
  if (text == "drop-word" || text == "drop_word") return OovPolicy::drop_word;
  if (text == "unk") return OovPolicy::unk;
  throw std::invalid_argument("unknown OOV policy '" + std::string(text) + "'");
}

PhonemizedSentence phonemize_sentence(std::span<const std::string> tokens,
                                      const PronunciationLexicon& lexicon, OovPolicy policy) {
  std::optional<PhonemeId> unk;
  if (policy == OovPolicy::unk) {
    unk = lexicon.inventory().unk();
    if (!unk) throw std::invalid_argument("OOV policy 'unk' needs an inventory with UNK");
  }

  PhonemizedSentence result;
  result.tokens = tokens.size();
  result.sequence.inventory = lexicon.inventory().fingerprint();
  auto& ids = result.sequence.ids;
  for (const auto& token : tokens) {
    const Pronunciation* pron = lexicon.primary(token);
    if (pron == nullptr) {
      ++result.oov_tokens;
      if (policy == OovPolicy::drop_sentence) {
        result.skipped = true;
      } else if (policy == OovPolicy::unk && !result.skipped) {
        if (!ids.empty()) result.word_boundaries.push_back(ids.size());
        ids.push_back(*unk);
      }
      continue;
    }
    if (result.skipped) continue;
    if (!ids.empty()) result.word_boundaries.push_back(ids.size());
    ids.insert(ids.end(), pron->begin(), pron->end());
  }
  if (result.skipped) {
    ids.clear();
    result.word_boundaries.clear();
  }
  return result;
}

PhonemeSequence insert_silence(const PhonemeSequence& sequence,
                               std::span<const std::size_t> word_boundaries, double rate,
                               PhonemeId sil, Xoshiro256& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("silence rate must lie in [0, 1]");
  }
  const auto& ids = sequence.ids;
  std::size_t previous = 0;
  for (std::size_t b : word_boundaries) {
    if (b <= previous || b >= ids.size()) {
      throw std::invalid_argument("word boundaries must be strictly increasing interior positions");
    }
    previous = b;
  }

  PhonemeSequence out;
  out.origin = sequence.origin;
  out.inventory = sequence.inventory;
  if (ids.empty()) return out;

  out.ids.reserve(ids.size() + word_boundaries.size() + 2);
  out.ids.push_back(sil);
  auto next_boundary = word_boundaries.begin();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (next_boundary != word_boundaries.end() && *next_boundary == i) {
      if (rng.bernoulli(rate)) out.ids.push_back(sil);
      ++next_boundary;
    }
    out.ids.push_back(ids[i]);
  }
  out.ids.push_back(sil);
  return out;
}

PhonemizedSentence phonemize_line(std::string_view line, std::uint64_t line_index,
                                  const PronunciationLexicon& lexicon, const LineOptions& options) {
  const auto tokens = normalize_text(line);
  auto result = phonemize_sentence(tokens, lexicon, options.oov);
  if (!result.skipped && options.insert_silence) {
    auto rng = Xoshiro256::for_stream(options.seed, line_index);
    result.sequence = insert_silence(result.sequence, result.word_boundaries, options.sil_rate,
                                     lexicon.inventory().sil(), rng);
  }
  result.word_boundaries.clear();
  return result;
}

}  // namespace phonojsd
