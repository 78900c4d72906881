/**
 * @file volume.cpp
 */

#include "dhogm/volume.hpp"

#include "dhogm/error.hpp"

#include <algorithm>
#include <cmath>

namespace dhogm {

std::string to_string(const Shape3 &shape) {
  return "(" + std::to_string(shape.nx) + "," + std::to_string(shape.ny) +
         "," + std::to_string(shape.nz) + ")";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
  case Stage::Raw: return "raw";
  case Stage::Masked: return "masked";
  case Stage::Normalized: return "normalized";
  case Stage::Standardized: return "standardized";
  }
  return "unknown";
}

Volume::Volume(Shape3 shape, float fill, VoxelSize voxel_size)
    : m_shape(shape), m_data(shape.voxels(), fill), m_voxel_size(voxel_size) {}

Volume::Volume(Shape3 shape, std::vector<float> data, VoxelSize voxel_size,
               Stage stage)
    : m_shape(shape), m_data(std::move(data)), m_voxel_size(voxel_size),
      m_stage(stage) {
  if (m_data.size() != m_shape.voxels()) {
    throw Error(ErrorCode::ShapeMismatch,
                "data length " + std::to_string(m_data.size()) +
                    " does not match shape " + to_string(m_shape));
  }
  if (!std::all_of(m_data.begin(), m_data.end(),
                   [](float v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::NonFiniteInput, "volume contains NaN or Inf");
  }
}

SliceView Volume::slice(std::size_t axis, std::size_t pos) const {
  const auto sx = static_cast<std::ptrdiff_t>(1);
  const auto sy = static_cast<std::ptrdiff_t>(m_shape.nx);
  const auto sz = static_cast<std::ptrdiff_t>(m_shape.nx * m_shape.ny);
  if (pos >= m_shape[axis]) {
    throw Error(ErrorCode::InvalidArgument, "slice index out of range");
  }
  switch (axis) {
  case 0:
    return {m_data.data() + pos * sx, m_shape.ny, m_shape.nz, sy, sz};
  case 1:
    return {m_data.data() + pos * sy, m_shape.nx, m_shape.nz, sx, sz};
  case 2:
    return {m_data.data() + pos * sz, m_shape.nx, m_shape.ny, sx, sy};
  default:
    throw Error(ErrorCode::InvalidArgument, "axis must be 0, 1 or 2");
  }
}

BlockView Volume::block(std::array<std::size_t, 3> origin, Shape3 extent) const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (origin[a] + extent[a] > m_shape[a]) {
      throw Error(ErrorCode::InvalidArgument,
                  "block exceeds volume bounds along axis " +
                      std::to_string(a));
    }
  }
  const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(m_shape.nx);
  const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(m_shape.nx * m_shape.ny);
  return {m_data.data() + index(origin[0], origin[1], origin[2]), extent, 1, sy,
          sz};
}

BrainMask::BrainMask(Shape3 shape, bool fill)
    : m_shape(shape), m_data(shape.voxels(), fill ? 1 : 0) {}

BrainMask::BrainMask(Shape3 shape, std::vector<std::uint8_t> data)
    : m_shape(shape), m_data(std::move(data)) {
  if (m_data.size() != m_shape.voxels()) {
    throw Error(ErrorCode::ShapeMismatch, "mask data length does not match " +
                                              to_string(m_shape));
  }
  for (auto &v : m_data) {
    v = v != 0 ? 1 : 0;
  }
}

std::size_t BrainMask::count() const {
  return static_cast<std::size_t>(
      std::count(m_data.begin(), m_data.end(), std::uint8_t{1}));
}

void BrainMask::require_nonempty() const {
  if (count() == 0) {
    throw Error(ErrorCode::EmptyMask, "brain mask has no voxels set");
  }
}

void require_same_shape(const Shape3 &a, const Shape3 &b,
                        std::string_view what) {
  if (!(a == b)) {
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + ": " +
                                              to_string(a) + " vs " +
                                              to_string(b));
  }
}

} // namespace dhogm
