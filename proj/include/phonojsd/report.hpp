#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phonojsd/canonical_json.hpp"
#include "phonojsd/divergence.hpp"
#include "phonojsd/phonemizer.hpp"
#include "phonojsd/trainability.hpp"

namespace phonojsd {

inline constexpr std::string_view kToolVersion = "phonojsd 0.1.0";

struct AnalyzeParams {
  OovPolicy oov = OovPolicy::drop_sentence;
  bool strip_stress = true;
  bool include_sil = false;
  double sil_rate = 0.25;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::nats;
  std::string profile = "clean_speech";
  std::vector<ThresholdProfile> profiles = builtin_profiles();
  double band = kDefaultBorderlineBand;
  unsigned threads = 1;
  std::string speech_id;  // defaults to the manifest file stem
  std::string text_id;    // defaults to the text file stem
};

struct CorpusStats {
  std::string id;
  double hours = 0.0;  // speech side only
  std::size_t sentences = 0;
  std::size_t skipped = 0;
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;

  double skip_rate() const {
    return sentences == 0 ? 0.0 : static_cast<double>(skipped) / static_cast<double>(sentences);
  }
};

struct PairReport {
  CorpusStats speech;
  CorpusStats text;
  OovPolicy oov = OovPolicy::drop_sentence;
  bool strip_stress = true;
  bool include_sil = false;
  double sil_rate = 0.25;
  std::uint64_t seed = 0;
  JsdProfile jsd;
  TrainabilityVerdict verdict;
  std::string version{kToolVersion};
};

/// Phonemize both sides, count 1..4-grams, compute the JSD profile and
/// classify the 4-gram value. Streams both inputs line by line.
PairReport analyze_pair(const std::filesystem::path& speech_manifest,
                        const std::filesystem::path& text_corpus,
                        const std::filesystem::path& lexicon, const AnalyzeParams& params);

PairReport analyze_streams(std::istream& speech_manifest, std::istream& text_corpus,
                           const PronunciationLexicon& lexicon, const AnalyzeParams& params,
                           std::string_view speech_source = "<speech>",
                           std::string_view text_source = "<text>");

enum class ReportFormat { json, tsv };

nlohmann::json report_to_json(const PairReport& report);
std::string tsv_header();
/// JSON is canonical (sorted keys, fixed float format); TSV is a header line
/// plus one row. Both end with a newline.
std::string emit_report(const PairReport& report, ReportFormat format,
                        FloatStyle style = FloatStyle::fixed6);

nlohmann::json jsd_profile_to_json(const JsdProfile& profile);
nlohmann::json verdict_to_json(const TrainabilityVerdict& verdict);

struct ScatterPoint {
  std::string pair;
  int order = 4;
  double jsd = 0.0;
  std::optional<double> per;
  std::string condition;
};

/// CSV with header "pair,order,jsd,per,condition", rows sorted by (pair,
/// order). Throws std::invalid_argument("duplicate scatter key") on repeated
/// (pair, order) and on out-of-range orders or PER.
std::string emit_scatter(std::vector<ScatterPoint> points);

/// One point per JSD order recorded in a PairReport JSON, all sharing `per`.
std::vector<ScatterPoint> scatter_points_from_report(const nlohmann::json& report,
                                                     const std::string& pair,
                                                     std::optional<double> per,
                                                     const std::string& condition);

}  // namespace phonojsd
