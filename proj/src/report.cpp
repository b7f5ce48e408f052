#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "phonojsd/errors.hpp"
#include "phonojsd/report.hpp"

namespace phonojsd {

nlohmann::json verdict_to_json(const TrainabilityVerdict& verdict) {
  return {{"label", std::string(to_string(verdict.verdict))},
          {"margin", verdict.margin},
          {"profile", verdict.profile},
          {"caveats", verdict.caveats}};
}

nlohmann::json jsd_profile_to_json(const JsdProfile& profile) {
  nlohmann::json jsd = nlohmann::json::object();
  nlohmann::json support = nlohmann::json::object();
  for (int order = 1; order <= profile.n_max; ++order) {
    const auto idx = static_cast<std::size_t>(order - 1);
    if (!profile.jsd[idx]) continue;
    jsd[std::to_string(order)] = *profile.jsd[idx];
    support[std::to_string(order)] = {{"speech", profile.support[idx].p},
                                      {"text", profile.support[idx].q},
                                      {"mixture", profile.support[idx].mixture}};
  }
  return {{"speech", profile.speech_id},
          {"text", profile.text_id},
          {"log_base", std::string(to_string(profile.log_base))},
          {"n", profile.n_max},
          {"jsd", jsd},
          {"support", support},
          {"warnings", profile.warnings}};
}

nlohmann::json report_to_json(const PairReport& report) {
  nlohmann::json jsd = nlohmann::json::object();
  for (int order = 1; order <= report.jsd.n_max; ++order) {
    if (auto v = report.jsd.at(order)) jsd[std::to_string(order)] = *v;
  }
  return {
      {"speech", {{"id", report.speech.id}, {"hours", report.speech.hours}, {"sentences", report.speech.sentences}}},
      {"text", {{"id", report.text.id}, {"sentences", report.text.sentences}}},
      {"params",
       {{"oov", std::string(to_string(report.oov))},
        {"strip_stress", report.strip_stress},
        {"include_sil", report.include_sil},
        {"sil_rate", report.sil_rate},
        {"seed", report.seed},
        {"log_base", std::string(to_string(report.jsd.log_base))}}},
      {"oov_stats",
       {{"speech_skip_rate", report.speech.skip_rate()}, {"text_skip_rate", report.text.skip_rate()}}},
      {"jsd", jsd},
      {"verdict", verdict_to_json(report.verdict)},
      {"version", report.version},
  };
}

std::string tsv_header() {
  return "speech_id\tspeech_hours\tspeech_sentences\ttext_id\ttext_sentences\toov\tstrip_stress\t"
         "include_sil\tsil_rate\tseed\tlog_base\tspeech_skip_rate\ttext_skip_rate\tjsd1\tjsd2\t"
         "jsd3\tjsd4\tverdict\tmargin\tprofile\tcaveats\tversion";
}

namespace {

// Tabs and newlines inside free text would break the row.
std::string tsv_field(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string emit_report(const PairReport& report, ReportFormat format, FloatStyle style) {
  if (format == ReportFormat::json) return canonical_dump(report_to_json(report), style) + "\n";

  auto num = [style](double v) {
    return style == FloatStyle::fixed6 ? format_fixed(v, 6) : format_shortest(v);
  };
  std::string caveats;
  for (const auto& c : report.verdict.caveats) caveats += (caveats.empty() ? "" : "; ") + c;
  std::ostringstream row;
  row << tsv_field(report.speech.id) << '\t' << num(report.speech.hours) << '\t'
      << report.speech.sentences << '\t' << tsv_field(report.text.id) << '\t'
      << report.text.sentences << '\t' << to_string(report.oov) << '\t'
      << (report.strip_stress ? "true" : "false") << '\t'
      << (report.include_sil ? "true" : "false") << '\t' << num(report.sil_rate) << '\t'
      << report.seed << '\t' << to_string(report.jsd.log_base) << '\t'
      << num(report.speech.skip_rate()) << '\t' << num(report.text.skip_rate());
  for (int order = 1; order <= kMaxOrder; ++order) {
    row << '\t';
    if (order <= report.jsd.n_max) {
      if (auto v = report.jsd.at(order)) row << num(*v);
    }
  }
  row << '\t' << to_string(report.verdict.verdict) << '\t' << num(report.verdict.margin) << '\t'
      << tsv_field(report.verdict.profile) << '\t' << tsv_field(caveats) << '\t'
      << tsv_field(report.version);
  return tsv_header() + "\n" + row.str() + "\n";
}

std::string emit_scatter(std::vector<ScatterPoint> points) {
  for (const auto& p : points) {
    if (p.order < 1 || p.order > kMaxOrder) throw std::invalid_argument("scatter order must be in 1..4");
    if (!std::isfinite(p.jsd) || p.jsd < 0.0) throw std::invalid_argument("scatter JSD must be a non-negative number");
    if (p.per && !(*p.per >= 0.0 && std::isfinite(*p.per))) {
      throw std::invalid_argument("scatter PER must be a non-negative number");
    }
  }
  std::sort(points.begin(), points.end(), [](const ScatterPoint& a, const ScatterPoint& b) {
    return std::tie(a.pair, a.order) < std::tie(b.pair, b.order);
  });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].pair == points[i - 1].pair && points[i].order == points[i - 1].order) {
      throw std::invalid_argument("duplicate scatter key (" + points[i].pair + ", " +
                                  std::to_string(points[i].order) + ")");
    }
  }
  std::string out = "pair,order,jsd,per,condition\n";
  for (const auto& p : points) {
    out += csv_field(p.pair) + "," + std::to_string(p.order) + "," + format_fixed(p.jsd, 6) + "," +
           (p.per ? format_fixed(*p.per, 2) : std::string()) + "," + csv_field(p.condition) + "\n";
  }
  return out;
}

std::vector<ScatterPoint> scatter_points_from_report(const nlohmann::json& report,
                                                     const std::string& pair,
                                                     std::optional<double> per,
                                                     const std::string& condition) {
  std::vector<ScatterPoint> points;
  try {
    for (const auto& [order, value] : report.at("jsd").items()) {
      ScatterPoint p;
      p.pair = pair;
      p.order = std::stoi(order);
      p.jsd = value.get<double>();
      p.per = per;
      p.condition = condition;
      points.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return points;
}

}  // namespace phonojsd
