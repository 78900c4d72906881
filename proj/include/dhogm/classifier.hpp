/**
 * @file classifier.hpp
 * @brief Train both paths on a cohort and decide per subject
 */
#pragma once

#include "dhogm/feature_io.hpp"
#include "dhogm/fusion.hpp"
#include "dhogm/model_io.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace dhogm {

/// MLP on every non-degenerate triplet; threshold on the d_final of subjects
/// whose 3D path is scorable.
TrainedModel train_model(std::span<const SubjectFeatures> features,
                         std::span<const QualityLabel> labels, const PipelineConfig &cfg);

PathDecision path_2d(const TrainedModel &m, const SubjectFeatures &f);
/// Unscorable when more than half of the cuboids are degenerate.
PathDecision path_3d(const TrainedModel &m, const SubjectFeatures &f);

/// Throws BothUnscorable when the requested path(s) cannot score the subject.
QualityDecision decide(const TrainedModel &m, const SubjectFeatures &f, PathMode mode);

nlohmann::json decision_to_json(const QualityDecision &d);
QualityDecision decision_from_json(const nlohmann::json &j);

/// One JSON object per line, in the given order.
std::string format_decisions(std::span<const QualityDecision> decisions);
void write_decisions(const std::filesystem::path &path,
                     std::span<const QualityDecision> decisions);
std::vector<QualityDecision> read_decisions(const std::filesystem::path &path);

} // namespace dhogm
