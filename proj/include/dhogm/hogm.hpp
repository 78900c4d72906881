/**
 * @file hogm.hpp
 * @brief Gradient magnitudes, HoGM histograms and the DHoGM slope feature
 *
 * A DHoGM value summarizes the first five non-empty bins of a
 * gradient-magnitude histogram:
 *
 *     D = sum_{n=2..5} (h[n] - h[n-1]) / h[1]  ==  (h[5] - h[1]) / h[1]
 *
 * Sharp images give a steeply falling histogram (D near -1); blur and ghosting
 * flatten it and push D up. The same statistic is used per slice (2D path)
 * and per cuboid (3D path).
 */
#pragma once

#include "dhogm/volume.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace dhogm {

/// Extraction settings that must agree between training and prediction.
struct FeatureConfig {
  std::size_t n_bins = 100;
  std::size_t slice_window = 60;
  Shape3 cuboid{96, 128, 128};
  Shape3 target_shape{192, 256, 256};

  bool operator==(const FeatureConfig &) const = default;
};

struct HogmHistogram {
  /// counts[0] is h[1], the first non-empty bin.
  std::vector<std::uint64_t> counts;
  double bin_width = 0.0;
  double first_bin_lower_edge = 0.0;
  /// Bin count before leading empty bins were dropped.
  std::size_t n_bins = 0;

  /// 1-based access matching h[n].
  std::uint64_t h(std::size_t n) const { return counts.at(n - 1); }
  std::uint64_t total() const;
};

/// Central differences inside, one-sided differences on the border. Output is
/// x-fastest, nx * ny entries. Throws TooSmall if either side is below 3.
std::vector<double> gradient_magnitude_2d(const SliceView &slice);

/// Same scheme along all three axes. Throws TooSmall if any side is below 3.
std::vector<double> gradient_magnitude_3d(const BlockView &block);

/// Uniform bins over (0, max]; bin b holds ((b-1) w, b w]. Zero magnitudes
/// are ignored and leading empty bins dropped. Throws AllZeroGradient when
/// nothing is positive.
HogmHistogram bin_magnitudes(std::span<const double> magnitudes, std::size_t n_bins);

/// bin_magnitudes with n_bins >= 6 enforced (InvalidArgument otherwise).
HogmHistogram build_hogm(std::span<const double> magnitudes, std::size_t n_bins);

/// Throws TooFewBins if fewer than five bins remain.
double dhogm_slope(const HogmHistogram &h);

/// Gradient -> histogram -> slope for a single slice or block.
double slice_dhogm(const SliceView &slice, std::size_t n_bins);
double block_dhogm(const BlockView &block, std::size_t n_bins);

/// True for the errors that mark a slice or cuboid as unusable rather than
/// the input as invalid.
bool is_degenerate_unit_error(const std::exception &e);

// ---------------------------------------------------------------------------
// 2D path

enum class Orientation : std::size_t { Axial = 0, Coronal = 1, Sagittal = 2 };

/// Volume axis sliced for each orientation: axial is z, coronal is y,
/// sagittal is x.
constexpr std::size_t orientation_axis(Orientation o) {
  return 2 - static_cast<std::size_t>(o);
}

using SliceWindows = std::array<std::vector<std::size_t>, 3>;

/// Contiguous window of `window` slices centred on L/2 along every axis
/// (indices L/2 - window/2 ... L/2 + window/2 - 1), indexed by volume axis.
SliceWindows select_slices(const Shape3 &shape, std::size_t window = 60);

struct SliceTriplet {
  double axial = 0.0;
  double coronal = 0.0;
  double sagittal = 0.0;
};

struct SliceFeatureSeries {
  /// One triplet per window position; degenerate components are NaN.
  std::vector<SliceTriplet> triplets;
  /// Triplet i is degenerate when any of its three slices is.
  std::vector<bool> degenerate;
  SliceWindows slice_indices;

  std::size_t n_degenerate() const;
  std::size_t size() const { return triplets.size(); }
};

SliceFeatureSeries slice_features(const Volume &v, const FeatureConfig &cfg = {},
                                  unsigned threads = 1);

// ---------------------------------------------------------------------------
// 3D path

using CuboidOrigin = std::array<std::size_t, 3>;

/// Three starts per axis, s_k = round(k (L - c) / 2), k = 0, 1, 2.
/// Throws ShapeMismatch unless `shape` equals cfg.target_shape.
std::vector<CuboidOrigin> cuboid_grid(const Shape3 &shape,
                                      const FeatureConfig &cfg = {});

/// Start positions along one axis.
std::array<std::size_t, 3> cuboid_starts(std::size_t length, std::size_t extent);

struct CuboidFeatureSet {
  /// One D_3D per cuboid in grid order; NaN where degenerate.
  std::vector<double> d3d_values;
  std::vector<bool> degenerate;
  std::vector<CuboidOrigin> cuboid_origins;
  /// Mean over non-degenerate cuboids, summed in grid order.
  double d_final = 0.0;

  std::size_t n_degenerate() const;
};

/// Throws AllCuboidsDegenerate if no cuboid can be scored.
CuboidFeatureSet cuboid_features(const Volume &v, const FeatureConfig &cfg = {},
                                 unsigned threads = 1);

/// A path is unscorable when more than half of its units are degenerate.
constexpr bool majority_degenerate(std::size_t degenerate, std::size_t total) {
  return 2 * degenerate > total;
}

} // namespace dhogm
