#pragma once

#include "iris/lamstar.hpp"
#include "iris/segmentation.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace iris {

/// Every tunable of the pipeline. Persisted as flat `key = value` text.
struct PipelineConfig {
    LocalizationConfig localization;
    int radial_res = 20;
    int angular_res = 480;
    LamstarConfig lamstar;
    int shift_range = 0;
    int train_per_class = 5;
    int threads = 1;
};

/// Sets one key; unknown keys and unparsable values throw ConfigError.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment, blank lines are ignored.
void apply_config_text(PipelineConfig& cfg, const std::string& text);

PipelineConfig load_config(const std::filesystem::path& path);

/// All keys in a fixed order with round-trippable values.
std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& cfg);

std::string config_to_string(const PipelineConfig& cfg);

/// Keys that influence template extraction; used to key the template cache.
std::string template_config_fingerprint(const PipelineConfig& cfg);

}  // namespace iris
