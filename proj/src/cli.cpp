#include "phonojsd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "phonojsd/atomic_file.hpp"
#include "phonojsd/count_io.hpp"
#include "phonojsd/errors.hpp"
#include "phonojsd/report.hpp"
#include "phonojsd/sampler.hpp"

namespace phonojsd {

namespace {

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Input from --in when given, otherwise the process stdin stream.
class InputSource {
 public:
  InputSource(const std::string& path, std::istream& fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError("cannot open '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

void emit(const std::string& bytes, const std::string& out_path, Io& io) {
  if (out_path.empty()) {
    io.out << bytes;
    io.out.flush();
  } else {
    write_file_atomically(out_path, bytes);
  }
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<ThresholdProfile> profiles_from(const std::string& path) {
  return path.empty() ? builtin_profiles() : load_profiles(path);
}

PronunciationLexicon lexicon_for(const std::string& path, bool strip_stress, OovPolicy oov) {
  auto lexicon = PronunciationLexicon::load(path, strip_stress);
  return oov == OovPolicy::unk ? lexicon.with_unk() : lexicon;
}

// ---------------------------------------------------------------------------

struct PhonemizeArgs {
  std::string lexicon;
  std::string oov = "drop-sentence";
  bool strip_stress = true;
  double sil_rate = 0.25;
  bool no_silence = false;
  std::uint64_t seed = 0;
  std::string in_path;
  std::string out_path;
};

void run_phonemize(const PhonemizeArgs& a, Io& io) {
  LineOptions options;
  options.oov = parse_oov_policy(a.oov);
  options.sil_rate = a.sil_rate;
  options.insert_silence = !a.no_silence;
  options.seed = a.seed;
  if (!(a.sil_rate >= 0.0 && a.sil_rate <= 1.0)) {
    throw std::invalid_argument("--sil-rate must lie in [0, 1]");
  }
  const auto lexicon = lexicon_for(a.lexicon, a.strip_stress, options.oov);
  const auto& inventory = lexicon.inventory();

  InputSource input(a.in_path, io.in);
  std::string out;
  std::string line;
  std::uint64_t index = 0;
  std::size_t sentences = 0;
  std::size_t skipped = 0;
  std::size_t oov = 0;
  while (std::getline(input.get(), line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::uint64_t this_index = index++;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++sentences;
    const auto result = phonemize_line(line, this_index, lexicon, options);
    oov += result.oov_tokens;
    if (result.skipped) {
      ++skipped;
      continue;
    }
    for (std::size_t i = 0; i < result.sequence.ids.size(); ++i) {
      if (i) out.push_back(' ');
      out += inventory.label(result.sequence.ids[i]);
    }
    out.push_back('\n');
  }
  emit(out, a.out_path, io);
  io.err << "phonemize: " << sentences << " sentences, " << skipped << " skipped, " << oov
         << " OOV tokens\n";
}

// ---------------------------------------------------------------------------

struct NgramsArgs {
  int n = 4;
  bool include_sil = false;
  std::string out_path;
  std::string lexicon;
  std::string inventory;
  std::string oov = "drop-sentence";
  bool strip_stress = true;
  std::string in_path;
};

void run_ngrams(const NgramsArgs& a, Io& io) {
  if (a.lexicon.empty() == a.inventory.empty()) {
    throw std::invalid_argument("give exactly one of --lexicon or --inventory");
  }
  const PhonemeInventory inventory =
      a.lexicon.empty() ? load_inventory_sidecar(a.inventory)
                        : lexicon_for(a.lexicon, a.strip_stress, parse_oov_policy(a.oov)).inventory();

  NGramCounter counter(inventory, a.n, a.include_sil);
  InputSource input(a.in_path, io.in);
  const std::string source = a.in_path.empty() ? "<stdin>" : a.in_path;
  PhonemeSequence seq;
  seq.inventory = inventory.fingerprint();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input.get(), line)) {
    ++line_no;
    seq.ids.clear();
    std::istringstream fields(line);
    std::string label;
    while (fields >> label) {
      const auto id = inventory.find(label);
      if (!id) {
        throw DataError(source + ":" + std::to_string(line_no) + ": phoneme '" + label +
                        "' is not in the inventory");
      }
      seq.ids.push_back(*id);
    }
    counter.add(seq);
  }
  save_count_table(a.out_path, counter.table(), inventory);
  io.err << "ngrams: " << line_no << " sequences";
  for (int order = 1; order <= a.n; ++order) {
    io.err << ", " << order << "-grams " << counter.table().distinct(order) << "/"
           << counter.table().total(order);
  }
  io.err << "\n";
}

// ---------------------------------------------------------------------------

struct JsdArgs {
  std::string speech;
  std::string text;
  int n = 4;
  std::string log_base = "nats";
  bool exact = false;
  std::string out_path;
};

void run_jsd(const JsdArgs& a, Io& io) {
  const auto base = parse_log_base(a.log_base);
  const auto speech = load_count_table(a.speech);
  const auto text = load_count_table(a.text);
  JsdProfile profile;
  try {
    profile = jsd_profile(speech.table, text.table, a.n, base);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("incompatible count tables: ") + e.what());
  }
  if (std::none_of(profile.jsd.begin(), profile.jsd.end(), [](const auto& v) { return v.has_value(); })) {
    throw ComputationError("no order has n-grams on both sides");
  }
  profile.speech_id = std::filesystem::path(a.speech).stem().string();
  profile.text_id = std::filesystem::path(a.text).stem().string();
  for (const auto& w : profile.warnings) io.err << "jsd: warning: " << w << "\n";
  emit(canonical_dump(jsd_profile_to_json(profile), a.exact ? FloatStyle::exact : FloatStyle::fixed6) + "\n",
       a.out_path, io);
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string speech;
  std::string text;
  std::string lexicon;
  std::string profile = "clean_speech";
  std::string profiles;
  std::string oov = "drop-sentence";
  bool strip_stress = true;
  bool include_sil = false;
  double sil_rate = 0.25;
  std::uint64_t seed = 0;
  std::string log_base = "nats";
  double band = kDefaultBorderlineBand;
  std::string format = "json";
  std::string out_path;
  unsigned threads = 1;
  std::string speech_id;
  std::string text_id;
  bool exact = false;
};

void run_analyze(const AnalyzeArgs& a, Io& io) {
  AnalyzeParams p;
  p.oov = parse_oov_policy(a.oov);
  p.strip_stress = a.strip_stress;
  p.include_sil = a.include_sil;
  p.sil_rate = a.sil_rate;
  p.seed = a.seed;
  p.log_base = parse_log_base(a.log_base);
  p.profiles = profiles_from(a.profiles);
  p.profile = a.profile;
  p.band = a.band;
  p.threads = a.threads;
  p.speech_id = a.speech_id;
  p.text_id = a.text_id;
  if (!(p.band >= 0.0)) throw std::invalid_argument("--band must be non-negative");
  find_profile(p.profiles, p.profile);
  const auto format = a.format == "tsv" ? ReportFormat::tsv : ReportFormat::json;
  const auto report = analyze_pair(a.speech, a.text, a.lexicon, p);
  emit(emit_report(report, format, a.exact ? FloatStyle::exact : FloatStyle::fixed6), a.out_path, io);
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  double jsd4 = 0.0;
  std::string profile = "clean_speech";
  std::string profiles;
  std::optional<double> speech_hours;
  double band = kDefaultBorderlineBand;
  std::string log_base = "nats";
};

void run_classify(const ClassifyArgs& a, Io& io) {
  const auto profiles = profiles_from(a.profiles);
  const auto& profile = find_profile(profiles, a.profile);
  const auto base = parse_log_base(a.log_base);
  auto verdict = classify(convert_base(a.jsd4, base, profile.calibration_base), profile,
                          a.speech_hours, a.band);
  if (base != profile.calibration_base) {
    verdict.caveats.push_back("jsd4 converted from " + std::string(to_string(base)) + " to " +
                              std::string(to_string(profile.calibration_base)));
  }
  auto j = verdict_to_json(verdict);
  j["threshold"] = profile.threshold;
  j["jsd4"] = a.jsd4;
  io.out << canonical_dump(j) << "\n";
}

// ---------------------------------------------------------------------------

struct SubsampleArgs {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double target_hours = 10.0;
  double valid_ratio = 0.2;
  std::string in_path;
  std::string manifest;
  std::string out_path;
  std::string matched_out;
  std::string unmatched_out;
};

SpeechManifest manifest_from(const SubsampleArgs& a, Io& io) {
  if (!a.manifest.empty()) return SpeechManifest::load(a.manifest);
  return SpeechManifest::parse(io.in, "<stdin>");
}

void write_matched(const SpeechManifest& manifest, const Selection& selection,
                   const SubsampleArgs& a) {
  if (a.matched_out.empty() && a.unmatched_out.empty()) return;
  const auto texts = derive_matched_unmatched(manifest, selection);
  if (!a.matched_out.empty()) write_file_atomically(a.matched_out, join_lines(texts.matched));
  if (!a.unmatched_out.empty()) write_file_atomically(a.unmatched_out, join_lines(texts.unmatched));
}

void run_subsample_sentences(const SubsampleArgs& a, Io& io) {
  InputSource input(a.in_path, io.in);
  const auto corpus = read_lines(input.get());
  emit(join_lines(subsample_sentences(corpus, a.k, a.seed)), a.out_path, io);
}

void run_subsample_hours(const SubsampleArgs& a, Io& io) {
  const auto manifest = manifest_from(a, io);
  if (manifest.empty()) throw DataError("manifest is empty");
  const auto selection = subsample_speech_hours(manifest, a.target_hours, a.seed);
  write_matched(manifest, selection, a);
  emit(selection_to_json(selection) + "\n", a.out_path, io);
}

void run_subsample_split(const SubsampleArgs& a, Io& io) {
  const auto manifest = manifest_from(a, io);
  if (manifest.empty()) throw DataError("manifest is empty");
  const auto [train, valid] = split_train_valid(manifest, a.valid_ratio, a.seed);
  write_matched(manifest, train, a);
  const auto j = nlohmann::json{{"train", nlohmann::json::parse(selection_to_json(train))},
                                {"valid", nlohmann::json::parse(selection_to_json(valid))}};
  emit(canonical_dump(j) + "\n", a.out_path, io);
}

// ---------------------------------------------------------------------------

struct ScatterArgs {
  std::string in_path;
  std::string out_path;
};

// Input lines: pair <TAB> report.json <TAB> PER (may be empty) <TAB> condition
void run_scatter(const ScatterArgs& a, Io& io) {
  InputSource input(a.in_path, io.in);
  const std::string source = a.in_path.empty() ? "<stdin>" : a.in_path;
  std::vector<ScatterPoint> points;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(input.get())) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos || line.starts_with('#')) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    if (fields.size() != 4) throw DataError(where() + "expected pair<TAB>report<TAB>per<TAB>condition");
    std::optional<double> per;
    if (!fields[2].empty()) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), v);
      if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
        throw DataError(where() + "invalid PER '" + fields[2] + "'");
      }
      per = v;
    }
    std::ifstream report_file(fields[1]);
    if (!report_file) throw DataError(where() + "cannot open report '" + fields[1] + "'");
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(report_file);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where() + "malformed report: " + e.what());
    }
    auto more = scatter_points_from_report(report, fields[0], per, fields[3]);
    points.insert(points.end(), more.begin(), more.end());
  }
  std::string csv;
  try {
    csv = emit_scatter(std::move(points));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  emit(csv, a.out_path, io);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  Io io{in, out, err};
  CLI::App app{"Phoneme n-gram domain-mismatch analyzer for unsupervised ASR corpora", "phonojsd"};
  app.require_subcommand(1);

  PhonemizeArgs phon;
  auto* phonemize = app.add_subcommand("phonemize", "Convert text lines (stdin) to phoneme lines");
  phonemize->add_option("--lexicon", phon.lexicon, "Pronunciation lexicon (CMUdict format)")->required();
  phonemize->add_option("--oov", phon.oov, "drop-sentence | drop-word | unk")
      ->check(CLI::IsMember({"drop-sentence", "drop-word", "unk"}));
  phonemize->add_flag("--strip-stress,!--keep-stress", phon.strip_stress, "Strip vowel stress digits (default on)");
  phonemize->add_option("--sil-rate", phon.sil_rate, "Probability of SIL at a word boundary");
  phonemize->add_flag("--no-silence", phon.no_silence, "Do not insert SIL tokens at all");
  phonemize->add_option("--seed", phon.seed, "Random seed");
  phonemize->add_option("--in", phon.in_path, "Input file instead of stdin");
  phonemize->add_option("--out", phon.out_path, "Output file instead of stdout");

  NgramsArgs ng;
  auto* ngrams = app.add_subcommand("ngrams", "Count 1..n-grams of phoneme lines (stdin)");
  ngrams->add_option("--n", ng.n, "Highest order")->check(CLI::Range(1, 4));
  ngrams->add_flag("--include-sil", ng.include_sil, "Keep SIL tokens when counting");
  ngrams->add_option("--out", ng.out_path, "Count table path (a .json sidecar is written next to it)")->required();
  ngrams->add_option("--lexicon", ng.lexicon, "Lexicon that defines the phoneme inventory");
  ngrams->add_option("--inventory", ng.inventory, "Count-table sidecar that defines the inventory");
  ngrams->add_option("--oov", ng.oov, "OOV policy used when phonemizing (unk adds UNK)")
      ->check(CLI::IsMember({"drop-sentence", "drop-word", "unk"}));
  ngrams->add_flag("--strip-stress,!--keep-stress", ng.strip_stress, "Must match phonemize");
  ngrams->add_option("--in", ng.in_path, "Input file instead of stdin");

  JsdArgs js;
  auto* jsd = app.add_subcommand("jsd", "Per-order JSD between two count tables");
  jsd->add_option("--speech", js.speech, "Speech-side count table")->required();
  jsd->add_option("--text", js.text, "Text-side count table")->required();
  jsd->add_option("--n", js.n, "Highest order")->check(CLI::Range(1, 4));
  jsd->add_option("--log-base", js.log_base, "nats | bits")->check(CLI::IsMember({"nats", "bits"}));
  jsd->add_flag("--exact", js.exact, "Print floats with full precision");
  jsd->add_option("--out", js.out_path, "Output file instead of stdout");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "End-to-end speech/text compatibility report");
  analyze->add_option("--speech", an.speech, "Speech manifest (TSV)")->required();
  analyze->add_option("--text", an.text, "Text corpus, one sentence per line")->required();
  analyze->add_option("--lexicon", an.lexicon, "Pronunciation lexicon")->required();
  analyze->add_option("--profile", an.profile, "Threshold profile name");
  analyze->add_option("--profiles", an.profiles, "JSON file overriding the built-in profiles");
  analyze->add_option("--oov", an.oov, "drop-sentence | drop-word | unk")
      ->check(CLI::IsMember({"drop-sentence", "drop-word", "unk"}));
  analyze->add_flag("--strip-stress,!--keep-stress", an.strip_stress, "Strip vowel stress digits (default on)");
  analyze->add_flag("--include-sil", an.include_sil, "Count SIL tokens");
  analyze->add_option("--sil-rate", an.sil_rate, "Probability of SIL at a word boundary");
  analyze->add_option("--seed", an.seed, "Random seed");
  analyze->add_option("--log-base", an.log_base, "nats | bits")->check(CLI::IsMember({"nats", "bits"}));
  analyze->add_option("--band", an.band, "Borderline band around the threshold");
  analyze->add_option("--format", an.format, "json | tsv")->check(CLI::IsMember({"json", "tsv"}));
  analyze->add_option("--out", an.out_path, "Output file instead of stdout");
  analyze->add_option("--threads", an.threads, "Counting threads")->check(CLI::Range(1u, 256u));
  analyze->add_option("--speech-id", an.speech_id, "Speech corpus id (default: file stem)");
  analyze->add_option("--text-id", an.text_id, "Text corpus id (default: file stem)");
  analyze->add_flag("--exact", an.exact, "Print floats with full precision");

  ClassifyArgs cl;
  auto* classify_cmd = app.add_subcommand("classify", "Trainability verdict for a 4-gram JSD value");
  classify_cmd->add_option("--jsd4", cl.jsd4, "4-gram JSD")->required();
  classify_cmd->add_option("--profile", cl.profile, "Threshold profile name");
  classify_cmd->add_option("--profiles", cl.profiles, "JSON file overriding the built-in profiles");
  classify_cmd->add_option("--speech-hours", cl.speech_hours, "Amount of speech in hours");
  classify_cmd->add_option("--band", cl.band, "Borderline band around the threshold");
  classify_cmd->add_option("--log-base", cl.log_base, "Base of --jsd4")->check(CLI::IsMember({"nats", "bits"}));

  SubsampleArgs ss;
  auto* subsample = app.add_subcommand("subsample", "Seeded corpus sampling protocols");
  subsample->require_subcommand(1);
  auto* sentences = subsample->add_subcommand("sentences", "Keep k random lines of stdin, in order");
  sentences->add_option("--k", ss.k, "Number of sentences")->required();
  sentences->add_option("--seed", ss.seed, "Random seed");
  sentences->add_option("--in", ss.in_path, "Input file instead of stdin");
  sentences->add_option("--out", ss.out_path, "Output file instead of stdout");
  auto* hours = subsample->add_subcommand("hours", "Select utterances up to a duration target");
  hours->add_option("--target", ss.target_hours, "Target hours")->required();
  auto* split = subsample->add_subcommand("split", "Random train/valid split of a manifest");
  split->add_option("--valid-ratio", ss.valid_ratio, "Fraction of utterances for validation");
  for (auto* sub : {hours, split}) {
    sub->add_option("--seed", ss.seed, "Random seed");
    sub->add_option("--manifest", ss.manifest, "Manifest TSV (default: stdin)");
    sub->add_option("--out", ss.out_path, "Selection JSON output (default: stdout)");
    sub->add_option("--matched-out", ss.matched_out, "Write transcripts of the selection here");
    sub->add_option("--unmatched-out", ss.unmatched_out, "Write the remaining transcripts here");
  }

  ScatterArgs sc;
  auto* scatter = app.add_subcommand("scatter", "JSD/PER scatter CSV from analyze reports");
  scatter->add_option("--in", sc.in_path, "pair<TAB>report<TAB>per<TAB>condition lines (default: stdin)");
  scatter->add_option("--out", sc.out_path, "Output file instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*phonemize) run_phonemize(phon, io);
    else if (*ngrams) run_ngrams(ng, io);
    else if (*jsd) run_jsd(js, io);
    else if (*analyze) run_analyze(an, io);
    else if (*classify_cmd) run_classify(cl, io);
    else if (*sentences) run_subsample_sentences(ss, io);
    else if (*hours) run_subsample_hours(ss, io);
    else if (*split) run_subsample_split(ss, io);
    else if (*scatter) run_scatter(sc, io);
    return kExitOk;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace phonojsd
