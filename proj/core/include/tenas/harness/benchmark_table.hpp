#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tenas/space/space_config.hpp"

namespace tenas::harness {

struct BenchmarkEntry {
  double test_accuracy = 0.0;
  std::optional<double> train_accuracy;
};

/// Architecture accuracies supplied by the user. Keys are canonical ArchIds.
struct BenchmarkTable {
  std::map<std::string, BenchmarkEntry> rows;
  std::vector<std::string> warnings;  // duplicates overwritten
  std::vector<std::string> rejected;  // "line N: reason"
};

/// Reads a CSV with header arch_id,test_accuracy[,train_accuracy]. Rows with
/// an undecodable ArchId or an accuracy outside [0, 1] are rejected and
/// listed with their line number; a repeated ArchId keeps the last row.
/// Throws ConfigError for a missing file or a malformed header.
BenchmarkTable ingest_benchmark(const std::filesystem::path& path, const space::SpaceConfig& space);
BenchmarkTable parse_benchmark(std::istream& in, const space::SpaceConfig& space);

}  // namespace tenas::harness
