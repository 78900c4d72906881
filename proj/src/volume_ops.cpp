/**
 * @file volume_ops.cpp
 */

#include "dhogm/volume_ops.hpp"

#include "dhogm/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace dhogm {

Volume apply_mask(const Volume &v, const BrainMask &m) {
  require_same_shape(v.shape(), m.shape(), "apply_mask");
  std::vector<float> out(v.data().begin(), v.data().end());
  const auto bits = m.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (bits[i] == 0) {
      out[i] = 0.0f;
    }
  }
  return Volume(v.shape(), std::move(out), v.voxel_size(), Stage::Masked);
}

double percentile(std::span<double> values, double p) {
  if (values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "percentile of an empty set");
  }
  if (!(p >= 0.0 && p <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "percentile outside [0, 100]");
  }
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo),
                   values.end());
  const double v_lo = values[lo];
  if (frac == 0.0 || lo + 1 >= values.size()) {
    return v_lo;
  }
  const double v_hi =
      *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                        values.end());
  return v_lo + frac * (v_hi - v_lo);
}

Volume percentile_normalize(const Volume &v, const BrainMask &m, double p_low,
                            double p_high) {
  require_same_shape(v.shape(), m.shape(), "percentile_normalize");
  m.require_nonempty();
  if (!(p_low >= 0.0 && p_low < p_high && p_high <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "percentiles must satisfy 0 <= low < high <= 100");
  }
  const auto data = v.data();
  const auto bits = m.data();
  std::vector<double> inside;
  inside.reserve(m.count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (bits[i] != 0) {
      inside.push_back(data[i]);
    }
  }
  const double q_low = percentile(inside, p_low);
  const double q_high = percentile(inside, p_high);
  if (!(q_high > q_low)) {
    throw Error(ErrorCode::DegenerateIntensity,
                "in-mask percentiles coincide at " + std::to_string(q_low));
  }
  const double span = q_high - q_low;
  std::vector<float> out(data.size(), 0.0f);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (bits[i] != 0) {
      const double c = std::clamp(static_cast<double>(data[i]), q_low, q_high);
      out[i] = static_cast<float>((c - q_low) / span);
    }
  }
  return Volume(v.shape(), std::move(out), v.voxel_size(), Stage::Normalized);
}

std::ptrdiff_t standardize_offset(std::size_t from, std::size_t to) {
  if (from >= to) {
    return static_cast<std::ptrdiff_t>((from - to) / 2);
  }
  return -static_cast<std::ptrdiff_t>((to - from) / 2);
}

namespace {

template <typename T>
std::vector<T> reshape_block(std::span<const T> src, const Shape3 &from,
                             const Shape3 &to) {
  std::vector<T> out(to.voxels(), T{});
  std::array<std::ptrdiff_t, 3> off{};
  for (std::size_t a = 0; a < 3; ++a) {
    off[a] = standardize_offset(from[a], to[a]);
  }
  for (std::size_t z = 0; z < to.nz; ++z) {
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(z) + off[2];
    if (sz < 0 || sz >= static_cast<std::ptrdiff_t>(from.nz)) {
      continue;
    }
    for (std::size_t y = 0; y < to.ny; ++y) {
      const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y) + off[1];
      if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(from.ny)) {
        continue;
      }
      const std::size_t src_row =
          from.nx * (static_cast<std::size_t>(sy) +
                     from.ny * static_cast<std::size_t>(sz));
      const std::size_t dst_row = to.nx * (y + to.ny * z);
      for (std::size_t x = 0; x < to.nx; ++x) {
        const std::ptrdiff_t sx = static_cast<std::ptrdiff_t>(x) + off[0];
        if (sx >= 0 && sx < static_cast<std::ptrdiff_t>(from.nx)) {
          out[dst_row + x] = src[src_row + static_cast<std::size_t>(sx)];
        }
      }
    }
  }
  return out;
}

} // namespace

Volume standardize_shape(const Volume &v, Shape3 target) {
  if (v.shape().voxels() == 0 || target.voxels() == 0) {
    throw Error(ErrorCode::InvalidArgument, "standardize_shape needs positive shapes");
  }
  return Volume(target, reshape_block<float>(v.data(), v.shape(), target),
                v.voxel_size(), Stage::Standardized);
}

BrainMask standardize_shape(const BrainMask &m, Shape3 target) {
  return BrainMask(target,
                   reshape_block<std::uint8_t>(m.data(), m.shape(), target));
}

double otsu_threshold(const Volume &v) {
  const auto data = v.data();
  if (data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "otsu threshold of an empty volume");
  }
  const auto [mn_it, mx_it] = std::minmax_element(data.begin(), data.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  if (!(mx > mn)) {
    throw Error(ErrorCode::DegenerateIntensity, "constant volume has no Otsu split");
  }
  constexpr std::size_t kBins = 256;
  std::array<double, kBins> hist{};
  const double scale = static_cast<double>(kBins) / (mx - mn);
  for (float f : data) {
    auto b = static_cast<std::size_t>((f - mn) * scale);
    hist[std::min(b, kBins - 1)] += 1.0;
  }
  const double total = static_cast<double>(data.size());
  double sum_all = 0.0;
  for (std::size_t i = 0; i < kBins; ++i) {
    sum_all += static_cast<double>(i) * hist[i];
  }
  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  std::size_t best_bin = 0;
  for (std::size_t t = 0; t + 1 < kBins; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) {
      continue;
    }
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_bin = t;
    }
  }
  // upper edge of the last background bin
  return mn + static_cast<double>(best_bin + 1) / scale;
}

BrainMask fallback_mask(const Volume &v) {
  const double t = otsu_threshold(v);
  std::vector<std::uint8_t> bits(v.data().size());
  std::transform(v.data().begin(), v.data().end(), bits.begin(),
                 [t](float f) { return static_cast<std::uint8_t>(f > t); });
  BrainMask mask(v.shape(), std::move(bits));
  mask.require_nonempty();
  return mask;
}

} // namespace dhogm
