#include "tenas/harness/benchmark_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tenas/common.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::harness {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::optional<double> parse_accuracy(const std::string& text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

BenchmarkTable parse_benchmark(std::istream& in, const space::SpaceConfig& space) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("benchmark table is empty");
  const auto header = split_csv(line);
  const bool has_train = header.size() == 3 && header[2] == "train_accuracy";
  if (header.size() < 2 || header[0] != "arch_id" || header[1] != "test_accuracy" ||
      (header.size() == 3 && !has_train) || header.size() > 3) {
    throw ConfigError("benchmark header must be arch_id,test_accuracy[,train_accuracy]");
  }

  BenchmarkTable table;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      table.rejected.push_back(where + "expected " + std::to_string(header.size()) + " fields");
      continue;
    }
    std::string arch;
    try {
      arch = space::decode(fields[0], space).encode();
    } catch (const ConfigError& e) {
      table.rejected.push_back(where + e.what());
      continue;
    }
    BenchmarkEntry entry;
    const auto test = parse_accuracy(fields[1]);
    if (!test || *test < 0.0 || *test > 1.0) {
      table.rejected.push_back(where + "test_accuracy '" + fields[1] + "' outside [0, 1]");
      continue;
    }
    entry.test_accuracy = *test;
    if (has_train) {
      const auto train = parse_accuracy(fields[2]);
      if (!train || *train < 0.0 || *train > 1.0) {
        table.rejected.push_back(where + "train_accuracy '" + fields[2] + "' outside [0, 1]");
        continue;
      }
      entry.train_accuracy = *train;
    }
    if (!table.rows.insert_or_assign(arch, entry).second) {
      table.warnings.push_back(where + "duplicate arch_id " + arch + " replaces the earlier row");
    }
  }
  return table;
}

BenchmarkTable ingest_benchmark(const std::filesystem::path& path, const space::SpaceConfig& space) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open benchmark table " + path.string());
  return parse_benchmark(in, space);
}

}  // namespace tenas::harness
