/**
 * @file pipeline.cpp
 */

#include "dhogm/pipeline.hpp"

#include "dhogm/error.hpp"
#include "dhogm/nifti.hpp"
#include "dhogm/volume_ops.hpp"

#include <limits>

namespace dhogm {

PreparedVolume prepare_volume(const Volume &raw, const std::optional<BrainMask> &mask,
                              const PipelineConfig &cfg) {
  PreparedVolume out{Volume{}, BrainMask{}, !mask.has_value()};
  const BrainMask m = mask ? *mask : fallback_mask(raw);
  require_same_shape(raw.shape(), m.shape(), "volume and mask");
  m.require_nonempty();
  const Volume normalized = percentile_normalize(raw, m, cfg.p_low, cfg.p_high);
  out.volume = standardize_shape(normalized, cfg.features.target_shape);
  out.mask = standardize_shape(m, cfg.features.target_shape);
  return out;
}

PreparedVolume prepare_subject(const SubjectRecord &rec, const PipelineConfig &cfg) {
  const Volume raw = nifti::load_volume(rec.volume_path);
  std::optional<BrainMask> mask;
  if (rec.mask_path) {
    mask = nifti::load_mask(*rec.mask_path);
  }
  return prepare_volume(raw, mask, cfg);
}

SubjectFeatures extract_features(std::string subject_id, const Volume &v,
                                 const FeatureConfig &cfg, unsigned threads) {
  SubjectFeatures f;
  f.subject_id = std::move(subject_id);
  f.slices = slice_features(v, cfg, threads);
  try {
    f.cuboids = cuboid_features(v, cfg, threads);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::AllCuboidsDegenerate) {
      throw;
    }
    f.cuboids.cuboid_origins = cuboid_grid(v.shape(), cfg);
    const std::size_t n = f.cuboids.cuboid_origins.size();
    f.cuboids.d3d_values.assign(n, std::numeric_limits<double>::quiet_NaN());
    f.cuboids.degenerate.assign(n, true);
    f.cuboids.d_final = std::numeric_limits<double>::quiet_NaN();
  }
  return f;
}

} // namespace dhogm
