#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "phonojsd/errors.hpp"
#include "phonojsd/ngram_stats.hpp"
#include "phonojsd/report.hpp"

namespace phonojsd {

namespace {

constexpr std::size_t kBatchLines = 16384;

struct Shard {
  NGramCounter counter;
  CorpusStats stats;
};

// Buffers lines and counts each batch on `threads` shards. Counts are exact
// integers and every line draws silence from its own stream, so the merged
// table does not depend on the thread count.
class ShardedPipeline {
 public:
  ShardedPipeline(const PronunciationLexicon& lexicon, const LineOptions& options,
                  bool include_sil, unsigned threads)
      : lexicon_(lexicon), options_(options) {
    const unsigned n = std::max(1u, threads);
    shards_.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
      shards_.push_back(Shard{NGramCounter(lexicon.inventory(), kMaxOrder, include_sil), {}});
    }
    batch_.reserve(kBatchLines);
  }

  void add(std::string line, std::uint64_t index) {
    batch_.push_back({std::move(line), index});
    if (batch_.size() == kBatchLines) flush();
  }

  std::pair<NGramCountTable, CorpusStats> finish() {
    flush();
    NGramCountTable table = shards_.front().counter.take();
    CorpusStats stats = shards_.front().stats;
    for (std::size_t i = 1; i < shards_.size(); ++i) {
      table.merge_from(shards_[i].counter.table());
      stats.sentences += shards_[i].stats.sentences;
      stats.skipped += shards_[i].stats.skipped;
      stats.tokens += shards_[i].stats.tokens;
      stats.oov_tokens += shards_[i].stats.oov_tokens;
    }
    return {std::move(table), stats};
  }

 private:
  struct Item {
    std::string line;
    std::uint64_t index;
  };

  void process(Shard& shard, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto result = phonemize_line(batch_[i].line, batch_[i].index, lexicon_, options_);
      ++shard.stats.sentences;
      shard.stats.tokens += result.tokens;
      shard.stats.oov_tokens += result.oov_tokens;
      if (result.skipped) {
        ++shard.stats.skipped;
        continue;
      }
      shard.counter.add(result.sequence);
    }
  }

  void flush() {
    if (batch_.empty()) return;
    const std::size_t n = batch_.size();
    const std::size_t parts = std::min(shards_.size(), n);
    if (parts <= 1) {
      process(shards_.front(), 0, n);
    } else {
      std::vector<std::exception_ptr> errors(parts);
      {
        std::vector<std::jthread> workers;
        workers.reserve(parts);
        for (std::size_t p = 0; p < parts; ++p) {
          const std::size_t begin = n * p / parts;
          const std::size_t end = n * (p + 1) / parts;
          workers.emplace_back([this, &errors, p, begin, end] {
            try {
              process(shards_[p], begin, end);
            } catch (...) {
              errors[p] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    batch_.clear();
  }

  const PronunciationLexicon& lexicon_;
  LineOptions options_;
  std::vector<Shard> shards_;
  std::vector<Item> batch_;
};

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

PairReport analyze_streams(std::istream& speech_manifest, std::istream& text_corpus,
                           const PronunciationLexicon& base_lexicon, const AnalyzeParams& params,
                           std::string_view speech_source, std::string_view text_source) {
  if (!(params.sil_rate >= 0.0 && params.sil_rate <= 1.0)) {
    throw std::invalid_argument("silence rate must lie in [0, 1]");
  }
  const ThresholdProfile& profile = find_profile(params.profiles, params.profile);
  const PronunciationLexicon lexicon =
      params.oov == OovPolicy::unk ? base_lexicon.with_unk() : base_lexicon;

  LineOptions options;
  options.oov = params.oov;
  options.insert_silence = true;
  options.sil_rate = params.sil_rate;
  options.seed = params.seed;

  // Speech side: transcripts from the manifest, streamed.
  ShardedPipeline speech(lexicon, options, params.include_sil, params.threads);
  double seconds = 0.0;
  {
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t record = 0;
    while (std::getline(speech_manifest, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (is_blank(line)) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      auto fail = [&](const std::string& what) {
        throw DataError(std::string(speech_source) + ":" + std::to_string(line_no) + ": " + what);
      };
      if (t2 == std::string::npos || t1 == 0) fail("expected utt_id<TAB>duration<TAB>transcript");
      double duration = 0.0;
      const char* first = line.data() + t1 + 1;
      const char* last = line.data() + t2;
      auto [ptr, ec] = std::from_chars(first, last, duration);
      if (ec != std::errc() || ptr != last || !std::isfinite(duration) || duration < 0.0) {
        fail("invalid duration '" + std::string(first, last) + "'");
      }
      seconds += duration;
      speech.add(line.substr(t2 + 1), record++);
    }
  }
  auto [speech_table, speech_stats] = speech.finish();

  ShardedPipeline text(lexicon, options, params.include_sil, params.threads);
  {
    std::string line;
    std::uint64_t index = 0;
    while (std::getline(text_corpus, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::uint64_t this_index = index++;
      if (is_blank(line)) continue;
      text.add(std::move(line), this_index);
    }
  }
  auto [text_table, text_stats] = text.finish();

  auto usable = [](const CorpusStats& s) { return s.sentences - s.skipped; };
  if (usable(speech_stats) == 0 || usable(text_stats) == 0) {
    throw ComputationError("no usable sentences after OOV filtering (speech skip rate " +
                           format_fixed(speech_stats.skip_rate(), 3) + " of " +
                           std::to_string(speech_stats.sentences) + ", text skip rate " +
                           format_fixed(text_stats.skip_rate(), 3) + " of " +
                           std::to_string(text_stats.sentences) + ")");
  }

  PairReport report;
  report.speech = speech_stats;
  report.speech.id = params.speech_id.empty() ? std::string(speech_source) : params.speech_id;
  report.speech.hours = seconds / 3600.0;
  report.text = text_stats;
  report.text.id = params.text_id.empty() ? std::string(text_source) : params.text_id;
  report.oov = params.oov;
  report.strip_stress = params.strip_stress;
  report.include_sil = params.include_sil;
  report.sil_rate = params.sil_rate;
  report.seed = params.seed;
  report.jsd = jsd_profile(speech_table, text_table, kMaxOrder, params.log_base);
  report.jsd.speech_id = report.speech.id;
  report.jsd.text_id = report.text.id;

  const auto jsd4 = report.jsd.at(4);
  if (!jsd4) {
    throw ComputationError("4-gram JSD unavailable: " +
                           (report.jsd.warnings.empty() ? std::string("no 4-grams")
                                                        : report.jsd.warnings.back()));
  }
  const double jsd4_calibrated = convert_base(*jsd4, params.log_base, profile.calibration_base);
  report.verdict = classify(jsd4_calibrated, profile, report.speech.hours, params.band);
  if (params.log_base != profile.calibration_base) {
    report.verdict.caveats.push_back("4-gram JSD converted from " +
                                     std::string(to_string(params.log_base)) + " to " +
                                     std::string(to_string(profile.calibration_base)) +
                                     " for classification");
  }
  for (const auto& w : report.jsd.warnings) report.verdict.caveats.push_back(w);
  return report;
}

PairReport analyze_pair(const std::filesystem::path& speech_manifest,
                        const std::filesystem::path& text_corpus,
                        const std::filesystem::path& lexicon_path, const AnalyzeParams& params) {
  const auto lexicon = PronunciationLexicon::load(lexicon_path, params.strip_stress);
  std::ifstream speech(speech_manifest, std::ios::binary);
  if (!speech) throw DataError("cannot open manifest '" + speech_manifest.string() + "'");
  std::ifstream text(text_corpus, std::ios::binary);
  if (!text) throw DataError("cannot open text corpus '" + text_corpus.string() + "'");
  AnalyzeParams resolved = params;
  if (resolved.speech_id.empty()) resolved.speech_id = speech_manifest.stem().string();
  if (resolved.text_id.empty()) resolved.text_id = text_corpus.stem().string();
  return analyze_streams(speech, text, lexicon, resolved, speech_manifest.string(),
                         text_corpus.string());
}

}  // namespace phonojsd
