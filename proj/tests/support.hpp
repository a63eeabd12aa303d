#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "basisrisk/flood.hpp"

namespace testsupport {

// Heavy-tailed flood-like corpus: damage is a bounded country multiplier
// times affected^0.35 times a Pareto factor with tail index 0.7, inflated
// 5% per year over 1950-2020. The Pareto factor dominates, so the damage
// tail index is 0.7.
std::vector<basisrisk::EventRecord> make_flood_corpus(std::int64_t n,
                                                      std::uint64_t seed);

void write_flood_csv(const std::filesystem::path& path,
                     const std::vector<basisrisk::EventRecord>& records);

// Fresh directory under the system temp root; caller owns cleanup.
std::filesystem::path make_temp_dir(const std::string& tag);

void remove_tree(const std::filesystem::path& path);

}  // namespace testsupport
