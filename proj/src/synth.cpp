/**
 * @file synth.cpp
 */

#include "dhogm/synth.hpp"

#include "dhogm/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace dhogm::synth {

namespace {

struct Ellipsoid {
  std::array<double, 3> center;
  std::array<double, 3> semi_axes;

  bool contains(double x, double y, double z) const {
    const double dx = (x - center[0]) / semi_axes[0];
    const double dy = (y - center[1]) / semi_axes[1];
    const double dz = (z - center[2]) / semi_axes[2];
    return dx * dx + dy * dy + dz * dz <= 1.0;
  }

  Ellipsoid grown(double by) const {
    return {center, {semi_axes[0] + by, semi_axes[1] + by, semi_axes[2] + by}};
  }
};

void paint(Volume &v, const Ellipsoid &e, float value, const Ellipsoid *clip) {
  const Shape3 &s = v.shape();
  for (std::size_t z = 0; z < s.nz; ++z) {
    for (std::size_t y = 0; y < s.ny; ++y) {
      for (std::size_t x = 0; x < s.nx; ++x) {
        const double px = static_cast<double>(x);
        const double py = static_cast<double>(y);
        const double pz = static_cast<double>(z);
        if (e.contains(px, py, pz) && (clip == nullptr || clip->contains(px, py, pz))) {
          v(x, y, z) = value;
        }
      }
    }
  }
}

double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = static_cast<std::size_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(radius);
    k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
    sum += k[i];
  }
  for (auto &w : k) {
    w /= sum;
  }
  return k;
}

// Convolve along one axis with edge repetition.
void convolve_axis(std::vector<float> &data, const Shape3 &s, std::size_t axis,
                   const std::vector<double> &kernel) {
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t len = s[axis];
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? s.nx : s.nx * s.ny);
  std::vector<double> line(len);
  std::vector<float> result(len);
  const std::size_t lines = s.voxels() / len;
  for (std::size_t l = 0; l < lines; ++l) {
    std::size_t base = 0;
    if (axis == 0) {
      base = l * s.nx;
    } else if (axis == 1) {
      base = (l % s.nx) + (l / s.nx) * s.nx * s.ny;
    } else {
      base = l;
    }
    for (std::size_t i = 0; i < len; ++i) {
      line[i] = data[base + i * stride];
    }
    const auto n = static_cast<std::ptrdiff_t>(len);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i + k, 0, n - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               line[static_cast<std::size_t>(j)];
      }
      result[static_cast<std::size_t>(i)] = static_cast<float>(acc);
    }
    for (std::size_t i = 0; i < len; ++i) {
      data[base + i * stride] = result[i];
    }
  }
}

// White noise low-passed by a Gaussian of width `scale` voxels, rescaled to
// zero mean and unit variance.
std::vector<double> smooth_noise(const Shape3 &s, double scale, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<float> field(s.voxels());
  for (auto &f : field) {
    f = static_cast<float>(normal(rng));
  }
  const auto kernel = gaussian_kernel(scale);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    convolve_axis(field, s, axis, kernel);
  }
  double mean = 0.0;
  for (float v : field) {
    mean += v;
  }
  mean /= static_cast<double>(field.size());
  double var = 0.0;
  for (float v : field) {
    var += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(var / static_cast<double>(field.size()));
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = sd > 0.0 ? (field[i] - mean) / sd : 0.0;
  }
  return out;
}

template <typename T>
std::vector<T> shifted_copy(std::span<const T> src, const Shape3 &s,
                            std::size_t axis, std::ptrdiff_t shift) {
  std::vector<T> out(src.size());
  const auto ny = static_cast<std::ptrdiff_t>(s.ny);
  const auto nz = static_cast<std::ptrdiff_t>(s.nz);
  for (std::ptrdiff_t z = 0; z < nz; ++z) {
    for (std::ptrdiff_t y = 0; y < ny; ++y) {
      std::ptrdiff_t sy = y;
      std::ptrdiff_t sz = z;
      if (axis == 1) {
        sy = std::clamp<std::ptrdiff_t>(y - shift, 0, ny - 1);
      } else {
        sz = std::clamp<std::ptrdiff_t>(z - shift, 0, nz - 1);
      }
      const std::size_t dst = s.nx * static_cast<std::size_t>(y + ny * z);
      const std::size_t from = s.nx * static_cast<std::size_t>(sy + ny * sz);
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), s.nx,
                  out.begin() + static_cast<std::ptrdiff_t>(dst));
    }
  }
  return out;
}

constexpr std::array<std::pair<std::size_t, int>, 4> kGhostShifts{
    {{1, +1}, {1, -1}, {2, +1}, {2, -1}}};

} // namespace

Phantom make_phantom(const PhantomSpec &spec) {
  if (spec.contrast_levels.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "phantom needs at least 2 contrast levels");
  }
  for (double c : spec.contrast_levels) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "contrast levels must lie in [0, 1]");
    }
  }
  const Shape3 &s = spec.shape;
  if (s.nx < 8 || s.ny < 8 || s.nz < 8) {
    throw Error(ErrorCode::TooSmall, "phantom needs at least 8 voxels per axis");
  }
  std::mt19937_64 rng(spec.seed);
  const std::array<double, 3> half{s.nx / 2.0, s.ny / 2.0, s.nz / 2.0};
  const std::array<double, 3> shape_fraction{0.78, 0.78, 0.74};

  Ellipsoid outer{};
  for (std::size_t a = 0; a < 3; ++a) {
    outer.semi_axes[a] = half[a] * shape_fraction[a] * uniform(rng, 0.9, 1.0);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    outer.center[a] = half[a] - 0.5 + uniform(rng, -0.04, 0.04) * half[a];
  }

  const bool textured = spec.structure == PhantomStructure::PerlinTexture;
  const double margin = textured ? 3.0 * spec.edge_sigma + 1.0 : 0.0;
  const std::size_t levels = spec.contrast_levels.size();

  Volume v(s);
  for (std::size_t k = 0; k < levels; ++k) {
    const double f = 1.0 - 0.75 * static_cast<double>(k) / static_cast<double>(levels);
    Ellipsoid shell{outer.center,
                    {outer.semi_axes[0] * f, outer.semi_axes[1] * f,
                     outer.semi_axes[2] * f}};
    paint(v, shell, static_cast<float>(spec.contrast_levels[k]), nullptr);
  }
  const double min_half = std::min({half[0], half[1], half[2]});
  for (std::size_t i = 0; i < spec.inner_structures; ++i) {
    Ellipsoid e{};
    for (std::size_t a = 0; a < 3; ++a) {
      e.center[a] = outer.center[a] + uniform(rng, -0.3, 0.3) * half[a];
    }
    for (std::size_t a = 0; a < 3; ++a) {
      e.semi_axes[a] = min_half * uniform(rng, 0.06, 0.15);
    }
    paint(v, e, static_cast<float>(spec.contrast_levels[i % levels]), &outer);
  }

  const Ellipsoid mask_shape = outer.grown(margin);
  BrainMask mask(s);
  for (std::size_t z = 0; z < s.nz; ++z) {
    for (std::size_t y = 0; y < s.ny; ++y) {
      for (std::size_t x = 0; x < s.nx; ++x) {
        mask.set(x, y, z, mask_shape.contains(static_cast<double>(x),
                                              static_cast<double>(y),
                                              static_cast<double>(z)));
      }
    }
  }

  if (textured) {
    if (spec.edge_sigma > 0.0) {
      v = gaussian_blur(v, spec.edge_sigma);
    }
    const auto texture = smooth_noise(s, spec.texture_scale, rng);
    auto data = v.data();
    const auto bits = mask.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (bits[i] == 0) {
        data[i] = 0.0f;
        continue;
      }
      const double t = data[i] * (1.0 + spec.texture_amplitude * texture[i]);
      data[i] = static_cast<float>(std::clamp(t, 0.0, 1.0));
    }
  }
  v.set_stage(Stage::Raw);
  return {std::move(v), std::move(mask)};
}

Volume corrupt(const Volume &v, const CorruptionSpec &spec) {
  if (!(spec.severity >= 0.0) || !std::isfinite(spec.severity)) {
    throw Error(ErrorCode::InvalidArgument, "severity must be finite and >= 0");
  }
  switch (spec.kind) {
  case CorruptionKind::GhostMotion: return corrupt_motion(v, spec.severity);
  case CorruptionKind::GaussianNoise: return corrupt_noise(v, spec.severity, spec.seed);
  case CorruptionKind::GaussianBlur: return gaussian_blur(v, spec.severity);
  }
  return v;
}

Volume corrupt_motion(const Volume &v, double severity) {
  if (!(severity >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "motion severity must be >= 0");
  }
  const auto shift = static_cast<std::ptrdiff_t>(std::llround(severity));
  if (shift == 0) {
    return v;
  }
  const Shape3 &s = v.shape();
  std::vector<double> acc(v.data().size(), 0.0);
  for (const auto &[axis, sign] : kGhostShifts) {
    const auto copy = shifted_copy<float>(v.data(), s, axis, sign * shift);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += copy[i];
    }
  }
  std::vector<float> out(acc.size());
  const auto src = v.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mixed = 0.5 * src[i] + 0.5 * (acc[i] / 4.0);
    out[i] = static_cast<float>(mixed);
  }
  return Volume(s, std::move(out), v.voxel_size(), v.stage());
}

BrainMask corrupt_mask(const BrainMask &m, const CorruptionSpec &spec) {
  if (spec.kind != CorruptionKind::GhostMotion) {
    return m;
  }
  const auto shift = static_cast<std::ptrdiff_t>(std::llround(spec.severity));
  if (shift == 0) {
    return m;
  }
  std::vector<std::uint8_t> bits(m.data().begin(), m.data().end());
  for (const auto &[axis, sign] : kGhostShifts) {
    const auto copy = shifted_copy<std::uint8_t>(m.data(), m.shape(), axis, sign * shift);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = static_cast<std::uint8_t>(bits[i] | copy[i]);
    }
  }
  return BrainMask(m.shape(), std::move(bits));
}

Volume corrupt_noise(const Volume &v, double sigma, std::uint64_t seed, bool clip) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  }
  if (sigma == 0.0) {
    return v;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<float> out(v.data().begin(), v.data().end());
  for (auto &x : out) {
    double y = x + normal(rng);
    if (clip) {
      y = std::clamp(y, 0.0, 1.0);
    }
    x = static_cast<float>(y);
  }
  return Volume(v.shape(), std::move(out), v.voxel_size(), v.stage());
}

Volume gaussian_blur(const Volume &v, double sigma) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "blur sigma must be >= 0");
  }
  if (sigma == 0.0) {
    return v;
  }
  const auto kernel = gaussian_kernel(sigma);
  std::vector<float> data(v.data().begin(), v.data().end());
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (v.shape()[axis] > 1) {
      convolve_axis(data, v.shape(), axis, kernel);
    }
  }
  return Volume(v.shape(), std::move(data), v.voxel_size(), v.stage());
}

double psnr(const Volume &reference, const Volume &test, double max_value) {
  require_same_shape(reference.shape(), test.shape(), "psnr");
  if (!(max_value > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "PSNR peak value must be positive");
  }
  const auto a = reference.data();
  const auto b = test.data();
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(max_value * max_value / mse);
}

} // namespace dhogm::synth
