/**
 * @file hogm.cpp
 * @brief Gradient magnitude, HoGM binning, DHoGM slope, slice and cuboid paths
 */

#include "dhogm/hogm.hpp"

#include "dhogm/error.hpp"
#include "dhogm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dhogm {

namespace {

// Difference along one axis at position i of n, stride in elements.
inline double axis_diff(const float *p, std::size_t i, std::size_t n,
                        std::ptrdiff_t stride) {
  if (i == 0) {
    return static_cast<double>(p[stride]) - static_cast<double>(p[0]);
  }
  if (i == n - 1) {
    return static_cast<double>(p[0]) - static_cast<double>(p[-stride]);
  }
  return 0.5 * (static_cast<double>(p[stride]) - static_cast<double>(p[-stride]));
}

} // namespace

std::uint64_t HogmHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> gradient_magnitude_2d(const SliceView &s) {
  if (s.nx < 3 || s.ny < 3) {
    throw Error(ErrorCode::TooSmall, "2D gradient needs at least 3x3 pixels");
  }
  std::vector<double> out(s.nx * s.ny);
  for (std::size_t y = 0; y < s.ny; ++y) {
    const float *row = s.data + static_cast<std::ptrdiff_t>(y) * s.sy;
    for (std::size_t x = 0; x < s.nx; ++x) {
      const float *p = row + static_cast<std::ptrdiff_t>(x) * s.sx;
      const double gx = axis_diff(p, x, s.nx, s.sx);
      const double gy = axis_diff(p, y, s.ny, s.sy);
      out[x + s.nx * y] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

std::vector<double> gradient_magnitude_3d(const BlockView &b) {
  const Shape3 &e = b.extent;
  if (e.nx < 3 || e.ny < 3 || e.nz < 3) {
    throw Error(ErrorCode::TooSmall, "3D gradient needs at least 3x3x3 voxels");
  }
  std::vector<double> out(e.voxels());
  std::size_t k = 0;
  for (std::size_t z = 0; z < e.nz; ++z) {
    for (std::size_t y = 0; y < e.ny; ++y) {
      const float *row = b.data + static_cast<std::ptrdiff_t>(y) * b.sy +
                         static_cast<std::ptrdiff_t>(z) * b.sz;
      for (std::size_t x = 0; x < e.nx; ++x, ++k) {
        const float *p = row + static_cast<std::ptrdiff_t>(x) * b.sx;
        const double gx = axis_diff(p, x, e.nx, b.sx);
        const double gy = axis_diff(p, y, e.ny, b.sy);
        const double gz = axis_diff(p, z, e.nz, b.sz);
        out[k] = std::sqrt(gx * gx + gy * gy + gz * gz);
      }
    }
  }
  return out;
}

HogmHistogram bin_magnitudes(std::span<const double> magnitudes, std::size_t n_bins) {
  if (n_bins == 0) {
    throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  }
  double max_mag = 0.0;
  for (double m : magnitudes) {
    if (!std::isfinite(m)) {
      throw Error(ErrorCode::NonFiniteInput, "non-finite gradient magnitude");
    }
    max_mag = std::max(max_mag, m);
  }
  if (!(max_mag > 0.0)) {
    throw Error(ErrorCode::AllZeroGradient, "no positive gradient magnitude");
  }
  const double n = static_cast<double>(n_bins);
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (double m : magnitudes) {
    if (m > 0.0) {
      // bin b covers ((b-1) w, b w]
      const double pos = std::ceil(m * n / max_mag);
      const auto b = static_cast<std::size_t>(std::clamp(pos, 1.0, n));
      ++counts[b - 1];
    }
  }
  const auto first = static_cast<std::size_t>(
      std::find_if(counts.begin(), counts.end(),
                   [](std::uint64_t c) { return c > 0; }) -
      counts.begin());
  HogmHistogram h;
  h.n_bins = n_bins;
  h.bin_width = max_mag / n;
  h.first_bin_lower_edge = static_cast<double>(first) * h.bin_width;
  h.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(first),
                  counts.end());
  return h;
}

HogmHistogram build_hogm(std::span<const double> magnitudes, std::size_t n_bins) {
  if (n_bins < 6) {
    throw Error(ErrorCode::InvalidArgument, "HoGM needs at least 6 bins");
  }
  return bin_magnitudes(magnitudes, n_bins);
}

double dhogm_slope(const HogmHistogram &h) {
  if (h.counts.size() < 5) {
    throw Error(ErrorCode::TooFewBins,
                "DHoGM needs 5 bins, histogram has " +
                    std::to_string(h.counts.size()));
  }
  if (h.h(1) == 0) {
    throw Error(ErrorCode::InvalidArgument, "h[1] must be non-empty");
  }
  std::int64_t rise = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    rise += static_cast<std::int64_t>(h.h(n)) - static_cast<std::int64_t>(h.h(n - 1));
  }
  return static_cast<double>(rise) / static_cast<double>(h.h(1));
}

double slice_dhogm(const SliceView &slice, std::size_t n_bins) {
  const auto mags = gradient_magnitude_2d(slice);
  return dhogm_slope(build_hogm(mags, n_bins));
}

double block_dhogm(const BlockView &block, std::size_t n_bins) {
  const auto mags = gradient_magnitude_3d(block);
  return dhogm_slope(build_hogm(mags, n_bins));
}

bool is_degenerate_unit_error(const std::exception &e) {
  const auto *err = dynamic_cast<const Error *>(&e);
  return err != nullptr && (err->code() == ErrorCode::AllZeroGradient ||
                            err->code() == ErrorCode::TooFewBins);
}

SliceWindows select_slices(const Shape3 &shape, std::size_t window) {
  if (window == 0) {
    throw Error(ErrorCode::InvalidArgument, "slice window must be positive");
  }
  SliceWindows out;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t len = shape[axis];
    if (len < window) {
      throw Error(ErrorCode::TooSmall, "axis " + std::to_string(axis) +
                                           " shorter than the slice window");
    }
    const std::size_t start = std::min(len / 2 - std::min(len / 2, window / 2),
                                       len - window);
    out[axis].resize(window);
    std::iota(out[axis].begin(), out[axis].end(), start);
  }
  return out;
}

std::size_t SliceFeatureSeries::n_degenerate() const {
  return static_cast<std::size_t>(
      std::count(degenerate.begin(), degenerate.end(), true));
}

SliceFeatureSeries slice_features(const Volume &v, const FeatureConfig &cfg,
                                  unsigned threads) {
  SliceFeatureSeries s;
  s.slice_indices = select_slices(v.shape(), cfg.slice_window);
  const std::size_t n = cfg.slice_window;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  // values[i * 3 + o] for orientation o
  std::vector<double> values(3 * n, kNaN);
  parallel_for(3 * n, threads, [&](std::size_t job) {
    const std::size_t i = job / 3;
    const auto o = static_cast<Orientation>(job % 3);
    const std::size_t axis = orientation_axis(o);
    try {
      values[job] = slice_dhogm(v.slice(axis, s.slice_indices[axis][i]), cfg.n_bins);
    } catch (const Error &e) {
      if (!is_degenerate_unit_error(e)) {
        throw;
      }
    }
  });
  s.triplets.resize(n);
  s.degenerate.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.triplets[i] = {values[3 * i], values[3 * i + 1], values[3 * i + 2]};
    s.degenerate[i] = std::isnan(values[3 * i]) || std::isnan(values[3 * i + 1]) ||
                      std::isnan(values[3 * i + 2]);
  }
  return s;
}

std::array<std::size_t, 3> cuboid_starts(std::size_t length, std::size_t extent) {
  if (extent == 0 || extent > length) {
    throw Error(ErrorCode::ShapeMismatch, "cuboid extent " + std::to_string(extent) +
                                              " does not fit axis of length " +
                                              std::to_string(length));
  }
  const double span = static_cast<double>(length - extent);
  return {0, static_cast<std::size_t>(std::llround(span / 2.0)), length - extent};
}

std::vector<CuboidOrigin> cuboid_grid(const Shape3 &shape,
                                      const FeatureConfig &cfg) {
  require_same_shape(shape, cfg.target_shape, "cuboid_grid expects the canonical shape");
  const auto sx = cuboid_starts(shape.nx, cfg.cuboid.nx);
  const auto sy = cuboid_starts(shape.ny, cfg.cuboid.ny);
  const auto sz = cuboid_starts(shape.nz, cfg.cuboid.nz);
  std::vector<CuboidOrigin> origins;
  origins.reserve(27);
  for (std::size_t x : sx) {
    for (std::size_t y : sy) {
      for (std::size_t z : sz) {
        origins.push_back({x, y, z});
      }
    }
  }
  return origins;
}

std::size_t CuboidFeatureSet::n_degenerate() const {
  return static_cast<std::size_t>(
      std::count(degenerate.begin(), degenerate.end(), true));
}

CuboidFeatureSet cuboid_features(const Volume &v, const FeatureConfig &cfg,
                                 unsigned threads) {
  CuboidFeatureSet out;
  out.cuboid_origins = cuboid_grid(v.shape(), cfg);
  const std::size_t n = out.cuboid_origins.size();
  out.d3d_values.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.degenerate.assign(n, true);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      out.d3d_values[i] = block_dhogm(v.block(out.cuboid_origins[i], cfg.cuboid),
                                      cfg.n_bins);
    } catch (const Error &e) {
      if (!is_degenerate_unit_error(e)) {
        throw;
      }
    }
  });
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.degenerate[i] = std::isnan(out.d3d_values[i]);
    if (!out.degenerate[i]) {
      sum += out.d3d_values[i];
      ++used;
    }
  }
  if (used == 0) {
    throw Error(ErrorCode::AllCuboidsDegenerate, "no cuboid has a usable HoGM");
  }
  out.d_final = sum / static_cast<double>(used);
  return out;
}

} // namespace dhogm
