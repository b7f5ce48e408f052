#include "phonojsd/count_io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "phonojsd/atomic_file.hpp"
#include "phonojsd/errors.hpp"

namespace phonojsd {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'H', 'N', 'G', 'R', 'A', 'M', 'S'};

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(value) >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw DataError("count table truncated");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void write_count_table(std::ostream& out, const NGramCountTable& table) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCountTableVersion);
  put_le<std::uint64_t>(out, table.fingerprint());
  put_le<std::uint8_t>(out, table.include_sil() ? 1 : 0);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(table.n_max()));
  put_le<std::uint16_t>(out, 0);
  std::array<std::vector<CountEntry>, kMaxOrder> entries;
  for (int order = 1; order <= kMaxOrder; ++order) {
    if (order <= table.n_max()) entries[order - 1] = table.entries(order);
    put_le<std::uint64_t>(out, entries[order - 1].size());
  }
  for (const auto& list : entries) {
    for (const auto& [key, count] : list) {
      put_le<std::uint64_t>(out, key);
      put_le<std::uint64_t>(out, count);
    }
  }
}

NGramCountTable read_count_table(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a count table (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCountTableVersion) {
    throw DataError("unsupported count table version " + std::to_string(version));
  }
  const auto fingerprint = get_le<std::uint64_t>(in);
  const auto include_sil = get_le<std::uint8_t>(in);
  const auto n_max = get_le<std::uint8_t>(in);
  get_le<std::uint16_t>(in);
  if (include_sil > 1 || n_max < 1 || n_max > kMaxOrder) throw DataError("corrupt count table header");
  std::array<std::uint64_t, kMaxOrder> sizes{};
  for (auto& s : sizes) s = get_le<std::uint64_t>(in);

  NGramCountTable table(fingerprint, n_max, include_sil == 1);
  for (int order = 1; order <= kMaxOrder; ++order) {
    const auto n = sizes[order - 1];
    if (n != 0 && order > n_max) throw DataError("corrupt count table: entries above n_max");
    std::uint64_t previous = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto key = get_le<std::uint64_t>(in);
      const auto count = get_le<std::uint64_t>(in);
      if (key <= previous || count == 0) throw DataError("corrupt count table: unsorted or zero entry");
      previous = key;
      try {
        table.add_count(order, key, count);
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string("corrupt count table: ") + e.what());
      }
    }
  }
  return table;
}

void save_count_table(const std::filesystem::path& path, const NGramCountTable& table,
                      const PhonemeInventory& inventory) {
  if (inventory.fingerprint() != table.fingerprint()) {
    throw std::invalid_argument("inventory does not match the count table");
  }
  std::ostringstream bin;
  write_count_table(bin, table);
  nlohmann::json side;
  side["version"] = kCountTableVersion;
  side["fingerprint"] = hex64(table.fingerprint());
  side["include_sil"] = table.include_sil();
  side["n_max"] = table.n_max();
  side["labels"] = inventory.labels();
  auto totals = nlohmann::json::array();
  for (int order = 1; order <= kMaxOrder; ++order) totals.push_back(table.total(order));
  side["totals"] = totals;
  write_file_atomically(path, bin.str());
  write_file_atomically(sidecar_path(path), side.dump() + "\n");
}

PhonemeInventory load_inventory_sidecar(const std::filesystem::path& sidecar) {
  try {
    const auto side = nlohmann::json::parse(read_all(sidecar));
    return PhonemeInventory(side.at("labels").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed sidecar '" + sidecar.string() + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("malformed sidecar '" + sidecar.string() + "': " + e.what());
  }
}

StoredCountTable load_count_table(const std::filesystem::path& path) {
  std::istringstream bin(read_all(path));
  NGramCountTable table = [&] {
    try {
      return read_count_table(bin);
    } catch (const DataError& e) {
      throw DataError("'" + path.string() + "': " + e.what());
    }
  }();
  PhonemeInventory inventory = load_inventory_sidecar(sidecar_path(path));
  if (inventory.fingerprint() != table.fingerprint()) {
    throw DataError("sidecar labels of '" + path.string() + "' do not match the table fingerprint");
  }
  return {std::move(table), std::move(inventory)};
}

}  // namespace phonojsd
