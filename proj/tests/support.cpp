#include "support.hpp"

#include <cmath>
#include <system_error>

#include "basisrisk/io.hpp"
#include "basisrisk/margins.hpp"
#include "basisrisk/rng.hpp"

namespace testsupport {

std::vector<basisrisk::EventRecord> make_flood_corpus(std::int64_t n,
                                                      std::uint64_t seed) {
  basisrisk::Rng rng(seed, 0);
  constexpr int kCountries = 30;
  std::vector<double> multiplier(kCountries);
  for (double& m : multiplier) m = 0.5 + 2.5 * rng.uniform();

  const basisrisk::ParetoSpec affected_spec{50.0, 1.1};
  const basisrisk::ParetoSpec severity_spec{1.0, 1.0 / 0.7};

  std::vector<basisrisk::EventRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    basisrisk::EventRecord record;
    const int country = static_cast<int>(rng.next_u64() % kCountries);
    record.country = "C" + std::to_string(country);
    record.year = 1950 + static_cast<int>(rng.next_u64() % 71);
    const double affected =
        std::ceil(basisrisk::pareto_quantile(rng.uniform(), affected_spec));
    record.affected = affected;
    const double severity =
        basisrisk::pareto_quantile(rng.uniform(), severity_spec);
    const double base = 3.0 * std::pow(affected, 0.35) *
                        multiplier[static_cast<std::size_t>(country)] *
                        severity;
    record.damage = base * std::exp(0.05 * (record.year - 1950));
    records.push_back(std::move(record));
  }
  return records;
}

void write_flood_csv(const std::filesystem::path& path,
                     const std::vector<basisrisk::EventRecord>& records) {
  std::string content = "country,year,affected,damage_usd\n";
  for (const basisrisk::EventRecord& record : records) {
    content += record.country;
    content += ',' + std::to_string(record.year);
    content += ',';
    if (record.affected)
      content += basisrisk::format_double(*record.affected);
    content += ',' + basisrisk::format_double(record.damage);
    content += '\n';
  }
  basisrisk::write_text_atomic(path, content);
}

std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto base = std::filesystem::temp_directory_path();
  std::filesystem::path dir;
  do {
    dir = base / ("basisrisk_" + tag + "_" + std::to_string(counter++));
  } while (std::filesystem::exists(dir));
  std::filesystem::create_directories(dir);
  return dir;
}

void remove_tree(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

}  // namespace testsupport
