/**
 * @file model_io.hpp
 * @brief Single-file JSON model holding both path classifiers
 */
#pragma once

#include "dhogm/config.hpp"
#include "dhogm/model.hpp"

#include <filesystem>
#include <string>

namespace dhogm {

struct TrainedModel {
  MlpModel mlp;
  ThresholdModel threshold;
  /// Resolved config used to extract the training features.
  PipelineConfig config;
};

nlohmann::json model_to_json(const TrainedModel &m);
/// Throws MalformedModel on schema or version problems.
TrainedModel model_from_json(const nlohmann::json &j);

void save_model(const std::filesystem::path &path, const TrainedModel &m);
TrainedModel load_model(const std::filesystem::path &path);

/// Throws FeatureConfigMismatch when features were extracted with settings
/// other than the model's.
void require_compatible(const TrainedModel &m, const FeatureConfig &extraction);

} // namespace dhogm
