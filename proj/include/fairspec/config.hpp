#pragma once

#include <filesystem>
#include <string>

#include "fairspec/experiment_config.hpp"
#include "json.hpp"

namespace fairspec {

using ordered_json = nlohmann::ordered_json;

/// Parse a config document. Unknown keys, wrong types and out-of-range values
/// raise ConfigError naming the key path (e.g. "profile.levels").
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (every default filled in), in a fixed key order.
ordered_json to_json(const ExperimentConfig& config);

}  // namespace fairspec
