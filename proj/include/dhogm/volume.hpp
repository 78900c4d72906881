/**
 * @file volume.hpp
 * @brief Scalar intensity volumes, brain masks and lightweight strided views
 *
 * Voxels are stored x-fastest (NIfTI order): index = x + nx * (y + ny * z).
 * Axis 0 is x, axis 1 is y, axis 2 is z.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dhogm {

struct Shape3 {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  std::size_t operator[](std::size_t axis) const {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  std::size_t voxels() const { return nx * ny * nz; }
  bool operator==(const Shape3 &) const = default;
};

std::string to_string(const Shape3 &shape);

enum class Stage { Raw, Masked, Normalized, Standardized };

std::string_view to_string(Stage stage);

/// Read-only 2D view with element strides.
struct SliceView {
  const float *data = nullptr;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::ptrdiff_t sx = 1;
  std::ptrdiff_t sy = 0;

  float operator()(std::size_t x, std::size_t y) const {
    return data[static_cast<std::ptrdiff_t>(x) * sx +
                static_cast<std::ptrdiff_t>(y) * sy];
  }
};

/// Read-only 3D view of a sub-block with element strides.
struct BlockView {
  const float *data = nullptr;
  Shape3 extent;
  std::ptrdiff_t sx = 1;
  std::ptrdiff_t sy = 0;
  std::ptrdiff_t sz = 0;

  float operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return data[static_cast<std::ptrdiff_t>(x) * sx +
                static_cast<std::ptrdiff_t>(y) * sy +
                static_cast<std::ptrdiff_t>(z) * sz];
  }
};

class Volume {
public:
  using VoxelSize = std::array<double, 3>;

  Volume() = default;
  explicit Volume(Shape3 shape, float fill = 0.0f,
                  VoxelSize voxel_size = {1.0, 1.0, 1.0});
  Volume(Shape3 shape, std::vector<float> data,
         VoxelSize voxel_size = {1.0, 1.0, 1.0}, Stage stage = Stage::Raw);

  const Shape3 &shape() const { return m_shape; }
  const VoxelSize &voxel_size() const { return m_voxel_size; }
  Stage stage() const { return m_stage; }
  void set_stage(Stage stage) { m_stage = stage; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return x + m_shape.nx * (y + m_shape.ny * z);
  }
  float &operator()(std::size_t x, std::size_t y, std::size_t z) {
    return m_data[index(x, y, z)];
  }
  float operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return m_data[index(x, y, z)];
  }

  std::span<float> data() { return m_data; }
  std::span<const float> data() const { return m_data; }

  /// Slice perpendicular to `axis` at position `pos`; the two remaining axes
  /// keep their relative order.
  SliceView slice(std::size_t axis, std::size_t pos) const;
  BlockView block(std::array<std::size_t, 3> origin, Shape3 extent) const;
  BlockView whole() const { return block({0, 0, 0}, m_shape); }

  bool operator==(const Volume &other) const {
    return m_shape == other.m_shape && m_data == other.m_data;
  }

private:
  Shape3 m_shape;
  std::vector<float> m_data;
  VoxelSize m_voxel_size{1.0, 1.0, 1.0};
  Stage m_stage = Stage::Raw;
};

class BrainMask {
public:
  BrainMask() = default;
  explicit BrainMask(Shape3 shape, bool fill = false);
  BrainMask(Shape3 shape, std::vector<std::uint8_t> data);

  const Shape3 &shape() const { return m_shape; }
  bool operator()(std::size_t x, std::size_t y, std::size_t z) const {
    return m_data[x + m_shape.nx * (y + m_shape.ny * z)] != 0;
  }
  void set(std::size_t x, std::size_t y, std::size_t z, bool value) {
    m_data[x + m_shape.nx * (y + m_shape.ny * z)] = value ? 1 : 0;
  }
  std::span<std::uint8_t> data() { return m_data; }
  std::span<const std::uint8_t> data() const { return m_data; }

  std::size_t count() const;

  /// Throws EmptyMask when no voxel is set.
  void require_nonempty() const;

  bool operator==(const BrainMask &) const = default;

private:
  Shape3 m_shape;
  std::vector<std::uint8_t> m_data;
};

/// Throws ShapeMismatch unless both shapes are equal.
void require_same_shape(const Shape3 &a, const Shape3 &b,
                        std::string_view what);

} // namespace dhogm
