/**
 * @file volume_ops.hpp
 * @brief Masking, percentile normalization and shape standardization
 */
#pragma once

#include "dhogm/volume.hpp"

#include <span>

namespace dhogm {

/// Canonical analysis grid.
inline constexpr Shape3 kCanonicalShape{192, 256, 256};

/// Out-of-mask voxels become 0; stage becomes Masked.
Volume apply_mask(const Volume &v, const BrainMask &m);

/// Percentile of `values` (0..100) by linear interpolation between order
/// statistics: rank = p/100 * (n-1). `values` is reordered.
double percentile(std::span<double> values, double p);

/// Clip in-mask intensities to [q_low, q_high] and map them linearly to
/// [0, 1]. Out-of-mask voxels are 0 on output. Throws DegenerateIntensity when
/// q_low == q_high.
Volume percentile_normalize(const Volume &v, const BrainMask &m,
                            double p_low = 1.0, double p_high = 99.0);

/// Zero-pad (symmetric, odd remainder on the high side) or center-crop each
/// axis to `target`; stage becomes Standardized.
Volume standardize_shape(const Volume &v, Shape3 target = kCanonicalShape);
BrainMask standardize_shape(const BrainMask &m, Shape3 target = kCanonicalShape);

/// Start offset that maps input axis `from` onto `to`: negative when padding.
std::ptrdiff_t standardize_offset(std::size_t from, std::size_t to);

/// Otsu threshold of the intensity histogram (256 bins over [min, max]).
double otsu_threshold(const Volume &v);

/// Fallback brain mask: voxels strictly above the Otsu threshold.
BrainMask fallback_mask(const Volume &v);

} // namespace dhogm
