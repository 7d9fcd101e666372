#include <algorithm>
#include <filesystem>
#include <string_view>
#include <utility>

#include "tenas/common.hpp"
#include "tenas/space/space_config.hpp"

namespace tenas::space {

namespace {

constexpr std::pair<std::string_view, std::string_view> kPresets[] = {
#include "preset_data.inc"
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : kPresets) names.emplace_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

SpaceConfig preset(std::string_view name) {
  for (const auto& [preset_name, text] : kPresets)
    if (preset_name == name) return SpaceConfig::from_json(text);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

SpaceConfig load_space(std::string_view name_or_path) {
  for (const auto& [preset_name, text] : kPresets)
    if (preset_name == name_or_path) return SpaceConfig::from_json(text);
  return SpaceConfig::load(std::filesystem::path(name_or_path));
}

}  // namespace tenas::space
