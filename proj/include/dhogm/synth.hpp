/**
 * @file synth.hpp
 * @brief Synthetic brain-like phantoms and controlled corruptions
 */
#pragma once

#include "dhogm/volume.hpp"
#include "dhogm/volume_ops.hpp"

#include <cstdint>
#include <vector>

namespace dhogm::synth {

enum class PhantomStructure {
  /// Piecewise-constant nested ellipsoids; voxel values are exactly the
  /// contrast levels (and 0 outside).
  NestedEllipsoids,
  /// Nested ellipsoids with partial-volume edges and a smooth multiplicative
  /// intensity texture.
  PerlinTexture,
};

struct PhantomSpec {
  Shape3 shape = kCanonicalShape;
  std::uint64_t seed = 0;
  PhantomStructure structure = PhantomStructure::PerlinTexture;
  /// Outermost shell first. At least two levels, each in [0, 1].
  std::vector<double> contrast_levels{0.3, 0.7, 1.0};
  std::size_t inner_structures = 6;
  /// PerlinTexture only.
  double edge_sigma = 0.7;
  double texture_amplitude = 0.1;
  double texture_scale = 8.0;
};

struct Phantom {
  Volume volume;
  BrainMask mask;
};

Phantom make_phantom(const PhantomSpec &spec);

enum class CorruptionKind { GhostMotion, GaussianNoise, GaussianBlur };

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::GhostMotion;
  /// GhostMotion: shift in voxels. GaussianNoise: sigma on [0, 1]
  /// intensities. GaussianBlur: kernel sigma in voxels.
  double severity = 0.0;
  std::uint64_t seed = 0;
};

/// Dispatch on spec.kind. Severity 0 returns an exact copy.
Volume corrupt(const Volume &v, const CorruptionSpec &spec);

/// out = 0.5 v + 0.5 * mean of four copies shifted by +/-round(severity)
/// voxels along y and z. Shifted copies repeat the edge voxel.
Volume corrupt_motion(const Volume &v, double severity);

/// Mask that follows a corrupted volume: the union of the shifted copies for
/// GhostMotion, unchanged otherwise.
BrainMask corrupt_mask(const BrainMask &m, const CorruptionSpec &spec);

/// Adds i.i.d. N(0, sigma^2) noise; clips to [0, 1] when `clip` is set.
Volume corrupt_noise(const Volume &v, double sigma, std::uint64_t seed,
                     bool clip = true);

/// Separable Gaussian, radius ceil(3 sigma), edge voxels repeated.
Volume gaussian_blur(const Volume &v, double sigma);

/// 10 log10(max^2 / MSE). Identical volumes give +infinity.
double psnr(const Volume &reference, const Volume &test, double max_value = 1.0);

} // namespace dhogm::synth
