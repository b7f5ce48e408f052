#include "phonojsd/trainability.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "phonojsd/errors.hpp"

namespace phonojsd {

namespace {

const char* const kLowQuantityException =
    "10 hours or less of noisy speech: training failed with every text set, matched text included";

}  // namespace

std::vector<ThresholdProfile> builtin_profiles() {
  return {
      {"clean_speech", 0.27,
       "4-gram JSD at the PER gap for clean read speech and clean spontaneous (talk) speech, "
       "read-speech-only wav2vec 2.0 features",
       {kLowQuantityException}, false, LogBase::nats},
      {"robust_features_noisy_speech", 0.25,
       "4-gram JSD at the PER gap for noisy telephone speech with features pre-trained on "
       "multi-domain speech including the target domain",
       {kLowQuantityException}, true, LogBase::nats},
      {"base_features_noisy_speech", 0.0,
       "noisy telephone speech with read-speech-only features: only exactly matched text trained",
       {kLowQuantityException}, true, LogBase::nats},
  };
}

std::vector<ThresholdProfile> parse_profiles(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    if (!j.is_array()) throw DataError("profiles file must hold a JSON list");
    std::vector<ThresholdProfile> out;
    for (const auto& item : j) {
      ThresholdProfile p;
      p.name = item.at("name").get<std::string>();
      p.threshold = item.at("threshold").get<double>();
      p.provenance = item.at("provenance").get<std::string>();
      p.known_exceptions = item.at("known_exceptions").get<std::vector<std::string>>();
      p.noisy_speech = item.value("noisy_speech", false);
      p.calibration_base = parse_log_base(item.value("log_base", std::string("nats")));
      if (p.name.empty()) throw DataError("profile with empty name");
      if (!(p.threshold >= 0.0) || !std::isfinite(p.threshold)) {
        throw DataError("profile '" + p.name + "' has a negative or invalid threshold");
      }
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed profiles: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed profiles: ") + e.what());
  }
}

std::vector<ThresholdProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profiles '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profiles(ss.str());
}

const ThresholdProfile& find_profile(std::span<const ThresholdProfile> profiles,
                                     std::string_view name) {
  std::string names;
  for (const auto& p : profiles) {
    if (p.name == name) return p;
    names += (names.empty() ? "" : ", ") + p.name;
  }
  throw std::invalid_argument("unknown profile '" + std::string(name) + "' (available: " + names + ")");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::trainable: return "trainable";
    case Verdict::borderline: return "borderline";
    case Verdict::untrainable: return "untrainable";
  }
  return "?";
}

std::string_view to_string(Agreement agreement) {
  switch (agreement) {
    case Agreement::agree: return "agree";
    case Agreement::disagree: return "disagree";
    case Agreement::borderline: return "borderline";
  }
  return "?";
}

TrainabilityVerdict classify(double jsd4, const ThresholdProfile& profile,
                             std::optional<double> speech_hours, double borderline_band) {
  if (!(jsd4 >= 0.0) || !std::isfinite(jsd4)) throw std::invalid_argument("jsd4 must be a non-negative number");
  if (!(borderline_band >= 0.0)) throw std::invalid_argument("borderline band must be non-negative");
  if (speech_hours && !(*speech_hours >= 0.0)) {
    throw std::invalid_argument("speech hours must be non-negative");
  }
  TrainabilityVerdict v;
  v.profile = profile.name;
  v.margin = profile.threshold - jsd4;
  if (v.margin > borderline_band) {
    v.verdict = Verdict::trainable;
  } else if (v.margin < -borderline_band) {
    v.verdict = Verdict::untrainable;
  } else {
    v.verdict = Verdict::borderline;
  }
  if (speech_hours && *speech_hours <= kLowQuantityHours && profile.noisy_speech) {
    char hours[32];
    std::snprintf(hours, sizeof hours, "%g", *speech_hours);
    std::string note = std::string("low speech quantity (") + hours +
                       " h of noisy speech): training may fail regardless of text";
    for (const auto& e : profile.known_exceptions) note += "; known exception: " + e;
    v.caveats.push_back(std::move(note));
  }
  return v;
}

ConfusionSummary evaluate_against_observations(std::span<const Observation> observations,
                                               std::span<const ThresholdProfile> profiles,
                                               double per_fail_cut, double borderline_band) {
  if (observations.empty()) throw std::invalid_argument("no observations to evaluate");
  if (!(per_fail_cut > 0.0 && per_fail_cut < 100.0)) {
    throw std::invalid_argument("PER failure cut must lie in (0, 100)");
  }
  ConfusionSummary summary;
  for (const auto& obs : observations) {
    ObservationOutcome out;
    out.observation = obs;
    out.verdict = classify(obs.jsd4, find_profile(profiles, obs.profile), obs.speech_hours,
                           borderline_band);
    out.observed_failure = obs.per >= per_fail_cut;
    if (out.verdict.verdict == Verdict::borderline) {
      out.agreement = Agreement::borderline;
      ++summary.borderline;
    } else if ((out.verdict.verdict == Verdict::untrainable) == out.observed_failure) {
      out.agreement = Agreement::agree;
      ++summary.agreements;
    } else {
      out.agreement = Agreement::disagree;
      ++summary.disagreements;
      if (out.verdict.caveats.empty()) ++summary.unexplained_disagreements;
    }
    summary.outcomes.push_back(std::move(out));
  }
  summary.accuracy = (static_cast<double>(summary.agreements) + 0.5 * static_cast<double>(summary.borderline)) /
                     static_cast<double>(observations.size());
  return summary;
}

}  // namespace phonojsd
