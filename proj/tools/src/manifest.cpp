#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "tenas/common.hpp"

namespace tenas::cli {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Manifest::Manifest(std::filesystem::path out_dir, std::string command, const std::vector<std::string>& args)
    : out_dir_(std::move(out_dir)) {
  data_["command"] = std::move(command);
  data_["argv"] = args;
  data_["tool_version"] = TENAS_VERSION;
  data_["started_at"] = utc_timestamp();
  data_["finished_at"] = nullptr;
  data_["status"] = "running";
  data_["outputs"] = nlohmann::ordered_json::array();
}

std::filesystem::path Manifest::output(const std::string& name) {
  data_["outputs"].push_back(name);
  return out_dir_ / name;
}

void Manifest::write() const {
  std::filesystem::create_directories(out_dir_);
  const auto path = out_dir_ / kManifestName;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << data_.dump(2) << '\n';
}

void Manifest::finish(const std::string& status, const std::string& error) {
  data_["finished_at"] = utc_timestamp();
  data_["status"] = status;
  if (!error.empty()) data_["error"] = error;
  write();
}

}  // namespace tenas::cli
