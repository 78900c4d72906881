/**
 * @file pipeline.hpp
 * @brief Per-subject preprocessing and feature extraction
 */
#pragma once

#include "dhogm/config.hpp"
#include "dhogm/feature_io.hpp"
#include "dhogm/manifest.hpp"
#include "dhogm/volume.hpp"

#include <optional>

namespace dhogm {

struct PreparedVolume {
  Volume volume;
  BrainMask mask;
  /// True when no mask was supplied and the Otsu fallback was used.
  bool mask_fallback = false;
};

/// mask (or Otsu fallback) -> percentile normalization -> pad/crop to the
/// target shape.
PreparedVolume prepare_volume(const Volume &raw, const std::optional<BrainMask> &mask,
                              const PipelineConfig &cfg);

/// Loads the record's files and runs prepare_volume.
PreparedVolume prepare_subject(const SubjectRecord &rec, const PipelineConfig &cfg);

/// Both paths for one standardized volume. A volume whose cuboids are all
/// degenerate still yields a row, with d_final = NaN.
SubjectFeatures extract_features(std::string subject_id, const Volume &v,
                                 const FeatureConfig &cfg, unsigned threads = 1);

} // namespace dhogm
