/**
 * @file config.hpp
 * @brief Resolved pipeline configuration and its JSON form
 */
#pragma once

#include "dhogm/fusion.hpp"
#include "dhogm/hogm.hpp"
#include "dhogm/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>
#include <vector>

namespace dhogm {

inline constexpr std::string_view kToolName = "mriqc-dhogm";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

struct PipelineConfig {
  FeatureConfig features;
  double p_low = 1.0;
  double p_high = 99.0;
  std::vector<std::size_t> mlp_layers = kDefaultLayers;
  MlpTrainConfig mlp;
  PathMode path_mode = PathMode::Fused;
};

nlohmann::json to_json(const FeatureConfig &cfg);
FeatureConfig feature_config_from_json(const nlohmann::json &j);

nlohmann::json to_json(const MlpTrainConfig &cfg);
MlpTrainConfig mlp_config_from_json(const nlohmann::json &j);

nlohmann::json to_json(const PipelineConfig &cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig pipeline_config_from_json(const nlohmann::json &j);
PipelineConfig load_pipeline_config(const std::filesystem::path &path);

/// `{format_version, tool, tool_version}` stamped into every output.
nlohmann::json provenance();

} // namespace dhogm
