#pragma once
// (4-gram JSD, PER) pairs reported for wav2vec-U style training on
// Librispeech, TED-LIUM v3 and SwitchBoard against four text corpora, with
// the threshold profile that applies to each speech condition.

#include <vector>

#include "phonojsd/trainability.hpp"

namespace phonojsd::testing {

inline std::vector<Observation> reference_observations() {
  const char* clean = "clean_speech";
  const char* base = "base_features_noisy_speech";
  const char* robust = "robust_features_noisy_speech";
  return {
      {"libri960/LibriLM", 0.0058, 20.25, clean, 960.0},
      {"libri960/Wiki", 0.1697, 26.02, clean, 960.0},
      {"libri960/NewsCrawl", 0.0785, 21.83, clean, 960.0},
      {"libri960/ImageC", 0.2635, 31.59, clean, 960.0},
      {"libri9.6/LibriLM", 0.0720, 22.51, clean, 9.6},
      {"libri9.6/Wiki", 0.2228, 29.03, clean, 9.6},
      {"libri9.6/NewsCrawl", 0.1375, 24.65, clean, 9.6},
      {"libri9.6/ImageC", 0.3003, 105.00, clean, 9.6},
      {"ted452/LibriLM", 0.0880, 31.62, clean, 452.0},
      {"ted452/Wiki", 0.1825, 35.21, clean, 452.0},
      {"ted452/NewsCrawl", 0.0841, 32.05, clean, 452.0},
      {"ted452/ImageC", 0.2678, 41.87, clean, 452.0},
      {"ted452/matched", 0.0, 28.13, clean, 452.0},
      {"ted10/LibriLM", 0.1909, 36.01, clean, 10.0},
      {"ted10/Wiki", 0.2855, 88.26, clean, 10.0},
      {"ted10/NewsCrawl", 0.1928, 33.52, clean, 10.0},
      {"ted10/ImageC", 0.3452, 85.92, clean, 10.0},
      {"ted10/matched", 0.0, 29.13, clean, 10.0},
      {"ted10/unmatched", 0.1014, 32.44, clean, 10.0},
      {"swb300/LibriLM", 0.1357, 92.10, base, 300.0},
      {"swb300/Wiki", 0.2513, 93.08, base, 300.0},
      {"swb300/NewsCrawl", 0.1499, 95.25, base, 300.0},
      {"swb300/ImageC", 0.3174, 80.15, base, 300.0},
      {"swb300/matched", 0.0, 35.80, base, 300.0},
      {"swb-all300/LibriLM", 0.1357, 44.38, robust, 300.0},
      {"swb-all300/Wiki", 0.2513, 94.12, robust, 300.0},
      {"swb-all300/NewsCrawl", 0.1499, 43.44, robust, 300.0},
      {"swb-all300/ImageC", 0.3174, 72.10, robust, 300.0},
      {"swb-all300/matched", 0.0, 32.34, robust, 300.0},
      {"swb10/LibriLM", 0.2248, 95.86, base, 10.0},
      {"swb10/matched", 0.0, 95.13, base, 10.0},
      {"swb10/unmatched", 0.0866, 93.48, base, 10.0},
      {"swb-all10/LibriLM", 0.2248, 92.10, robust, 10.0},
      {"swb-all10/matched", 0.0, 96.14, robust, 10.0},
      {"swb-all10/unmatched", 0.0866, 93.48, robust, 10.0},
      {"libri960/LibriLM/30k", 0.0822, 23.46, clean, 960.0},
      {"libri960/Wiki/30k", 0.1332, 22.56, clean, 960.0},
      {"libri960/NewsCrawl/30k", 0.1070, 22.40, clean, 960.0},
      {"libri960/ImageC/30k", 0.2213, 34.05, clean, 960.0},
      {"libri960/LibriLM/3k", 0.2478, 25.85, clean, 960.0},
      {"libri960/Wiki/3k", 0.3525, 70.08, clean, 960.0},
      {"libri960/NewsCrawl/3k", 0.3420, 69.20, clean, 960.0},
      {"libri960/ImageC/3k", 0.3647, 62.22, clean, 960.0},
      {"libri9.6/LibriLM/3k", 0.2607, 33.03, clean, 9.6},
  };
}

}  // namespace phonojsd::testing
