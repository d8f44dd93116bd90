#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bolab/diagnostics.hpp"
#include "bolab/model.hpp"

namespace bolab {

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
    int schema_version = kConfigSchemaVersion;
    PipelineSettings pipeline;
    std::vector<double> mass_ratios;  // empty unless a sweep is configured
    std::filesystem::path output_dir = "bolab_out";
};

/// Parses and validates a JSON run configuration. Every problem is reported
/// as a ConfigError naming the dotted field path, or "line L, column C" for
/// syntax errors.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::json& j, const std::string& path = "model");

}  // namespace bolab
