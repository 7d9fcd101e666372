#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace tenas::cli {

inline constexpr const char* kManifestName = "manifest.json";

/// Run manifest kept in `<out_dir>/manifest.json`. It is written as soon as
/// the run starts (status "running") and rewritten when it ends.
class Manifest {
 public:
  Manifest(std::filesystem::path out_dir, std::string command, const std::vector<std::string>& args);

  nlohmann::ordered_json& data() noexcept { return data_; }
  [[nodiscard]] const std::filesystem::path& out_dir() const noexcept { return out_dir_; }
  /// Path of an output file inside out_dir, recorded in "outputs".
  std::filesystem::path output(const std::string& name);

  void write() const;
  void finish(const std::string& status, const std::string& error = {});

 private:
  std::filesystem::path out_dir_;
  nlohmann::ordered_json data_;
};

std::string utc_timestamp();

}  // namespace tenas::cli
