#pragma once

#include <filesystem>
#include <iosfwd>

#include "phonojsd/ngram_stats.hpp"
#include "phonojsd/phonemizer.hpp"

namespace phonojsd {

// Binary count-table layout, all integers little-endian:
//
//   offset  size  field
//   0       8     magic "PHNGRAMS"
//   8       4     version (1)
//   12      8     inventory fingerprint
//   20      1     include_sil (0/1)
//   21      1     n_max (1..4)
//   22      2     reserved, zero
//   24      32    entry count per order 1..4 (u64 each)
//   56      ...   per order 1..n_max: entries sorted by key, (u64 key, u64 count)
//
// A JSON sidecar "<path>.json" carries the inventory labels:
//   {"fingerprint": "<16 hex digits>", "include_sil": bool, "labels": [...],
//    "n_max": n, "totals": [t1, t2, t3, t4], "version": 1}

inline constexpr std::uint32_t kCountTableVersion = 1;

struct StoredCountTable {
  NGramCountTable table;
  PhonemeInventory inventory;
};

void write_count_table(std::ostream& out, const NGramCountTable& table);
NGramCountTable read_count_table(std::istream& in);

/// Writes `path` and `path.json` (each via temp file + rename).
void save_count_table(const std::filesystem::path& path, const NGramCountTable& table,
                      const PhonemeInventory& inventory);
/// Loads both files and checks the sidecar labels hash to the stored
/// fingerprint. Throws DataError on any mismatch or malformed input.
StoredCountTable load_count_table(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Reads an inventory from a count-table sidecar.
PhonemeInventory load_inventory_sidecar(const std::filesystem::path& sidecar);

}  // namespace phonojsd
