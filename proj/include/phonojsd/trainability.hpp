#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonojsd/divergence.hpp"

namespace phonojsd {

inline constexpr double kDefaultBorderlineBand = 0.02;
inline constexpr double kDefaultPerFailCut = 60.0;
/// Speech amounts at or below this many hours trigger the quantity caveat
/// for noisy-speech profiles.
inline constexpr double kLowQuantityHours = 10.0;

/// A 4-gram JSD boundary between pairs that train and pairs that do not,
/// as observed under one speech condition / feature extractor.
struct ThresholdProfile {
  std::string name;
  double threshold = 0.0;
  std::string provenance;
  std::vector<std::string> known_exceptions;
  bool noisy_speech = false;
  LogBase calibration_base = LogBase::nats;
};

/// clean_speech (0.27), robust_features_noisy_speech (0.25) and
/// base_features_noisy_speech (0.0).
std::vector<ThresholdProfile> builtin_profiles();

/// JSON list of {name, threshold, provenance, known_exceptions} with optional
/// "noisy_speech" (default false) and "log_base" (default "nats").
std::vector<ThresholdProfile> load_profiles(const std::filesystem::path& path);
std::vector<ThresholdProfile> parse_profiles(std::string_view json);

/// Throws std::invalid_argument listing the available names.
const ThresholdProfile& find_profile(std::span<const ThresholdProfile> profiles, std::string_view name);

enum class Verdict { trainable, borderline, untrainable };

std::string_view to_string(Verdict verdict);

struct TrainabilityVerdict {
  Verdict verdict = Verdict::borderline;
  double margin = 0.0;  // threshold - jsd4
  std::string profile;
  std::vector<std::string> caveats;
};

/// trainable iff margin > band, untrainable iff margin < -band, otherwise
/// borderline. jsd4 is read in the profile's calibration base. A noisy-speech
/// profile with speech_hours <= 10 adds a quantity-limitation caveat (the
/// verdict itself is unchanged).
TrainabilityVerdict classify(double jsd4, const ThresholdProfile& profile,
                             std::optional<double> speech_hours = std::nullopt,
                             double borderline_band = kDefaultBorderlineBand);

struct Observation {
  std::string label;
  double jsd4 = 0.0;
  double per = 0.0;  // percent
  std::string profile;
  std::optional<double> speech_hours;
};

enum class Agreement { agree, disagree, borderline };

std::string_view to_string(Agreement agreement);

struct ObservationOutcome {
  Observation observation;
  TrainabilityVerdict verdict;
  bool observed_failure = false;  // per >= cut
  Agreement agreement = Agreement::borderline;
};

struct ConfusionSummary {
  std::vector<ObservationOutcome> outcomes;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t borderline = 0;
  /// (agreements + borderline / 2) / total
  double accuracy = 0.0;
  /// Disagreements without a caveat to explain them.
  std::size_t unexplained_disagreements = 0;
};

/// Classifies every observation with its named profile and compares the
/// verdict with whether the observed PER reached `per_fail_cut`. Borderline
/// verdicts neither agree nor disagree and count half towards accuracy.
ConfusionSummary evaluate_against_observations(std::span<const Observation> observations,
                                               std::span<const ThresholdProfile> profiles,
                                               double per_fail_cut = kDefaultPerFailCut,
                                               double borderline_band = kDefaultBorderlineBand);

}  // namespace phonojsd
