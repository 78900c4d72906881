/**
 * @file nifti.hpp
 * @brief Single-file NIfTI-1 reader/writer (.nii and .nii.gz)
 */
#pragma once

#include "dhogm/volume.hpp"

#include <cstdint>
#include <filesystem>

namespace dhogm::nifti {

/// On-disk voxel types accepted by the reader. Values are the NIfTI codes.
enum class Datatype : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Int32 = 8,
  Float32 = 16,
  Float64 = 64,
  Int8 = 256,
  UInt16 = 512,
  UInt32 = 768,
  Int64 = 1024,
  UInt64 = 1280,
};

struct Header {
  Shape3 shape;
  Volume::VoxelSize voxel_size{1.0, 1.0, 1.0};
  Datatype datatype = Datatype::Float32;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  std::int64_t vox_offset = 352;
  bool byte_swapped = false;
};

/// Parse and validate the header only.
Header read_header(const std::filesystem::path &path);

/// Load a 3D scalar volume; data is converted to float with scl_slope and
/// scl_inter applied when the slope is nonzero. Gzip is detected from content.
Volume load_volume(const std::filesystem::path &path);

/// Load a mask; any nonzero voxel is inside the brain.
BrainMask load_mask(const std::filesystem::path &path);

/// Write a volume. Gzip is used when the file name ends in ".gz". Integer
/// datatypes round to nearest and throw InvalidArgument if a value does not
/// fit.
void save_volume(const std::filesystem::path &path, const Volume &volume,
                 Datatype datatype = Datatype::Float32);

void save_mask(const std::filesystem::path &path, const BrainMask &mask,
               const Volume::VoxelSize &voxel_size = {1.0, 1.0, 1.0});

} // namespace dhogm::nifti
