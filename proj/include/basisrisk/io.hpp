#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

namespace basisrisk {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Shortest round-trip decimal rendering; identical bytes for identical
// doubles, so table output is reproducible byte for byte.
std::string format_double(double value);

// Writes through a temp file in the same directory plus an atomic rename, so
// interrupted runs never leave partial tables behind.
std::filesystem::path write_csv_atomic(const std::filesystem::path& directory,
                                       const Table& table);
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string sha256_hex(std::string_view bytes);
std::string sha256_hex_of_file(const std::filesystem::path& path);

// Output directory: BASISRISK_OUTDIR if set, else ./out.
std::filesystem::path default_outdir();

struct CsvFile {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const std::filesystem::path& path);

class ManifestBuilder {
 public:
  ManifestBuilder(std::string command, std::uint64_t seed);

  void set_config(nlohmann::json config);
  void add_output(const std::filesystem::path& path, std::int64_t rows);
  void set_duration_ms(double ms);

  // Writes <directory>/manifest.json atomically and returns its path.
  std::filesystem::path write(const std::filesystem::path& directory) const;

 private:
  std::string command_;
  std::uint64_t seed_;
  double duration_ms_ = 0.0;
  nlohmann::json config_;
  std::vector<std::tuple<std::string, std::string, std::int64_t>> outputs_;
};

}  // namespace basisrisk
