/**
 * @file nifti.cpp
 * @brief NIfTI-1 single-file I/O on top of zlib
 */

#include "dhogm/nifti.hpp"

#include "dhogm/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace dhogm::nifti {

namespace {

constexpr std::int32_t kHeaderSize = 348;
constexpr std::int32_t kNifti2HeaderSize = 540;
constexpr std::int64_t kDefaultVoxOffset = 352;

struct GzCloser {
  void operator()(gzFile f) const {
    if (f != nullptr) {
      gzclose(f);
    }
  }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

std::vector<unsigned char> read_all(const std::filesystem::path &path,
                                    std::size_t limit) {
  GzHandle file(gzopen(path.string().c_str(), "rb"));
  if (!file) {
    throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  }
  std::vector<unsigned char> bytes;
  std::vector<unsigned char> chunk(1 << 20);
  while (bytes.size() < limit) {
    const auto want = static_cast<unsigned>(
        std::min<std::size_t>(chunk.size(), limit - bytes.size()));
    const int got = gzread(file.get(), chunk.data(), want);
    if (got < 0) {
      int errnum = 0;
      const char *msg = gzerror(file.get(), &errnum);
      throw Error(ErrorCode::UnreadableFile,
                  path.string() + ": " + (msg != nullptr ? msg : "read error"));
    }
    if (got == 0) {
      break;
    }
    bytes.insert(bytes.end(), chunk.begin(), chunk.begin() + got);
  }
  return bytes;
}

template <typename T> T load_raw(const unsigned char *p, bool swap) {
  std::array<unsigned char, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if (swap) {
    std::reverse(buf.begin(), buf.end());
  }
  T value;
  std::memcpy(&value, buf.data(), sizeof(T));
  return value;
}

std::size_t bytes_per_voxel(Datatype dt) {
  switch (dt) {
  case Datatype::UInt8:
  case Datatype::Int8: return 1;
  case Datatype::Int16:
  case Datatype::UInt16: return 2;
  case Datatype::Int32:
  case Datatype::UInt32:
  case Datatype::Float32: return 4;
  case Datatype::Float64:
  case Datatype::Int64:
  case Datatype::UInt64: return 8;
  }
  return 0;
}

Datatype validate_datatype(std::int16_t code) {
  switch (code) {
  case 2: case 4: case 8: case 16: case 64:
  case 256: case 512: case 768: case 1024: case 1280:
    return static_cast<Datatype>(code);
  case 32: case 1792: case 2048:
    throw Error(ErrorCode::UnsupportedDatatype, "complex voxel types are not supported");
  case 128: case 2304:
    throw Error(ErrorCode::UnsupportedDatatype, "RGB voxel types are not supported");
  default:
    throw Error(ErrorCode::UnsupportedDatatype,
                "unknown datatype code " + std::to_string(code));
  }
}

Header parse_header(const std::vector<unsigned char> &bytes,
                    const std::filesystem::path &path) {
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize)) {
    throw Error(ErrorCode::MalformedHeader,
                path.string() + ": file shorter than a NIfTI-1 header");
  }
  Header h;
  const auto sizeof_hdr = load_raw<std::int32_t>(bytes.data(), false);
  if (sizeof_hdr == kHeaderSize) {
    h.byte_swapped = false;
  } else if (load_raw<std::int32_t>(bytes.data(), true) == kHeaderSize) {
    h.byte_swapped = true;
  } else if (sizeof_hdr == kNifti2HeaderSize ||
             load_raw<std::int32_t>(bytes.data(), true) == kNifti2HeaderSize) {
    throw Error(ErrorCode::MalformedHeader,
                path.string() + ": NIfTI-2 files are not supported");
  } else {
    throw Error(ErrorCode::MalformedHeader,
                path.string() + ": bad sizeof_hdr " + std::to_string(sizeof_hdr));
  }
  const bool sw = h.byte_swapped;
  const char *magic = reinterpret_cast<const char *>(bytes.data() + 344);
  if (std::memcmp(magic, "ni1\0", 4) == 0) {
    throw Error(ErrorCode::MalformedHeader,
                path.string() + ": header/image pair files are not supported");
  }
  if (std::memcmp(magic, "n+1\0", 4) != 0) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": bad magic");
  }

  std::array<std::int16_t, 8> dim{};
  for (std::size_t i = 0; i < 8; ++i) {
    dim[i] = load_raw<std::int16_t>(bytes.data() + 40 + 2 * i, sw);
  }
  if (dim[0] != 3) {
    throw Error(ErrorCode::MalformedHeader,
                path.string() + ": expected a 3D volume, dim[0] = " +
                    std::to_string(dim[0]));
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    if (dim[i] <= 0) {
      throw Error(ErrorCode::MalformedHeader,
                  path.string() + ": non-positive dim[" + std::to_string(i) + "]");
    }
  }
  h.shape = {static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]),
             static_cast<std::size_t>(dim[3])};
  h.datatype = validate_datatype(load_raw<std::int16_t>(bytes.data() + 70, sw));
  for (std::size_t i = 0; i < 3; ++i) {
    const float p = load_raw<float>(bytes.data() + 76 + 4 * (i + 1), sw);
    h.voxel_size[i] = (std::isfinite(p) && p != 0.0f) ? std::abs(p) : 1.0;
  }
  const float vox_offset = load_raw<float>(bytes.data() + 108, sw);
  if (!std::isfinite(vox_offset) || vox_offset < static_cast<float>(kHeaderSize)) {
    throw Error(ErrorCode::MalformedHeader, path.string() + ": bad vox_offset");
  }
  h.vox_offset = static_cast<std::int64_t>(vox_offset);
  h.scl_slope = load_raw<float>(bytes.data() + 112, sw);
  h.scl_inter = load_raw<float>(bytes.data() + 116, sw);
  if (!std::isfinite(h.scl_slope)) {
    h.scl_slope = 0.0f;
  }
  if (!std::isfinite(h.scl_inter)) {
    h.scl_inter = 0.0f;
  }
  return h;
}

template <typename T>
void convert(const unsigned char *src, std::size_t n, bool swap,
             std::vector<float> &out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<float>(load_raw<T>(src + i * sizeof(T), swap));
  }
}

template <typename T> void store_raw(unsigned char *p, T value) {
  std::memcpy(p, &value, sizeof(T));
}

template <typename T>
void encode_integer(const std::span<const float> data, unsigned char *dst) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = std::nearbyint(static_cast<double>(data[i]));
    if (r < static_cast<double>(std::numeric_limits<T>::lowest()) ||
        r > static_cast<double>(std::numeric_limits<T>::max())) {
      throw Error(ErrorCode::InvalidArgument,
                  "value " + std::to_string(data[i]) +
                      " does not fit the requested integer datatype");
    }
    store_raw<T>(dst + i * sizeof(T), static_cast<T>(r));
  }
}

std::vector<unsigned char> encode(const Shape3 &shape,
                                  const Volume::VoxelSize &voxel_size,
                                  std::span<const float> data, Datatype dt) {
  static_assert(std::endian::native == std::endian::little,
                "writer assumes a little-endian host");
  const std::size_t bpv = bytes_per_voxel(dt);
  std::vector<unsigned char> out(kDefaultVoxOffset + data.size() * bpv, 0);
  unsigned char *h = out.data();
  store_raw<std::int32_t>(h + 0, kHeaderSize);
  h[38] = 'r';
  const std::array<std::int16_t, 8> dim{3,
                                        static_cast<std::int16_t>(shape.nx),
                                        static_cast<std::int16_t>(shape.ny),
                                        static_cast<std::int16_t>(shape.nz),
                                        1, 1, 1, 1};
  for (std::size_t i = 0; i < 8; ++i) {
    store_raw<std::int16_t>(h + 40 + 2 * i, dim[i]);
  }
  store_raw<std::int16_t>(h + 70, static_cast<std::int16_t>(dt));
  store_raw<std::int16_t>(h + 72, static_cast<std::int16_t>(bpv * 8));
  const std::array<float, 8> pixdim{1.0f,
                                    static_cast<float>(voxel_size[0]),
                                    static_cast<float>(voxel_size[1]),
                                    static_cast<float>(voxel_size[2]),
                                    1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t i = 0; i < 8; ++i) {
    store_raw<float>(h + 76 + 4 * i, pixdim[i]);
  }
  store_raw<float>(h + 108, static_cast<float>(kDefaultVoxOffset));
  store_raw<float>(h + 112, 1.0f);
  store_raw<float>(h + 116, 0.0f);
  h[123] = 2; // mm
  std::memcpy(h + 344, "n+1\0", 4);

  unsigned char *dst = out.data() + kDefaultVoxOffset;
  switch (dt) {
  case Datatype::Float32:
    std::memcpy(dst, data.data(), data.size() * sizeof(float));
    break;
  case Datatype::Float64:
    for (std::size_t i = 0; i < data.size(); ++i) {
      store_raw<double>(dst + 8 * i, static_cast<double>(data[i]));
    }
    break;
  case Datatype::UInt8: encode_integer<std::uint8_t>(data, dst); break;
  case Datatype::Int8: encode_integer<std::int8_t>(data, dst); break;
  case Datatype::Int16: encode_integer<std::int16_t>(data, dst); break;
  case Datatype::UInt16: encode_integer<std::uint16_t>(data, dst); break;
  case Datatype::Int32: encode_integer<std::int32_t>(data, dst); break;
  case Datatype::UInt32: encode_integer<std::uint32_t>(data, dst); break;
  case Datatype::Int64: encode_integer<std::int64_t>(data, dst); break;
  case Datatype::UInt64: encode_integer<std::uint64_t>(data, dst); break;
  }
  return out;
}

bool wants_gzip(const std::filesystem::path &path) {
  const std::string name = path.filename().string();
  return name.size() >= 3 && name.compare(name.size() - 3, 3, ".gz") == 0;
}

void write_bytes(const std::filesystem::path &path,
                 const std::vector<unsigned char> &bytes) {
  const char *mode = wants_gzip(path) ? "wb6" : "wbT";
  GzHandle file(gzopen(path.string().c_str(), mode));
  if (!file) {
    throw Error(ErrorCode::UnreadableFile, "cannot create " + path.string());
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const auto n = static_cast<unsigned>(
        std::min<std::size_t>(bytes.size() - written, 1u << 24));
    if (gzwrite(file.get(), bytes.data() + written, n) != static_cast<int>(n)) {
      throw Error(ErrorCode::UnreadableFile, "write failed for " + path.string());
    }
    written += n;
  }
}

} // namespace

Header read_header(const std::filesystem::path &path) {
  return parse_header(read_all(path, kHeaderSize), path);
}

Volume load_volume(const std::filesystem::path &path) {
  auto bytes = read_all(path, std::numeric_limits<std::size_t>::max());
  const Header h = parse_header(bytes, path);
  const std::size_t n = h.shape.voxels();
  const std::size_t bpv = bytes_per_voxel(h.datatype);
  const auto offset = static_cast<std::size_t>(h.vox_offset);
  if (bytes.size() < offset + n * bpv) {
    throw Error(ErrorCode::UnreadableFile,
                path.string() + ": truncated voxel data (expected " +
                    std::to_string(n * bpv) + " bytes)");
  }
  std::vector<float> data(n);
  const unsigned char *src = bytes.data() + offset;
  const bool sw = h.byte_swapped;
  switch (h.datatype) {
  case Datatype::UInt8: convert<std::uint8_t>(src, n, sw, data); break;
  case Datatype::Int8: convert<std::int8_t>(src, n, sw, data); break;
  case Datatype::Int16: convert<std::int16_t>(src, n, sw, data); break;
  case Datatype::UInt16: convert<std::uint16_t>(src, n, sw, data); break;
  case Datatype::Int32: convert<std::int32_t>(src, n, sw, data); break;
  case Datatype::UInt32: convert<std::uint32_t>(src, n, sw, data); break;
  case Datatype::Int64: convert<std::int64_t>(src, n, sw, data); break;
  case Datatype::UInt64: convert<std::uint64_t>(src, n, sw, data); break;
  case Datatype::Float32: convert<float>(src, n, sw, data); break;
  case Datatype::Float64: convert<double>(src, n, sw, data); break;
  }
  bytes.clear();
  bytes.shrink_to_fit();
  if (h.scl_slope != 0.0f && !(h.scl_slope == 1.0f && h.scl_inter == 0.0f)) {
    for (auto &v : data) {
      v = v * h.scl_slope + h.scl_inter;
    }
  }
  return Volume(h.shape, std::move(data), h.voxel_size, Stage::Raw);
}

BrainMask load_mask(const std::filesystem::path &path) {
  const Volume v = load_volume(path);
  std::vector<std::uint8_t> bits(v.data().size());
  std::transform(v.data().begin(), v.data().end(), bits.begin(),
                 [](float x) { return static_cast<std::uint8_t>(x != 0.0f); });
  return BrainMask(v.shape(), std::move(bits));
}

void save_volume(const std::filesystem::path &path, const Volume &volume,
                 Datatype datatype) {
  write_bytes(path, encode(volume.shape(), volume.voxel_size(), volume.data(),
                           datatype));
}

void save_mask(const std::filesystem::path &path, const BrainMask &mask,
               const Volume::VoxelSize &voxel_size) {
  std::vector<float> as_float(mask.data().begin(), mask.data().end());
  write_bytes(path, encode(mask.shape(), voxel_size, as_float, Datatype::UInt8));
}

} // namespace dhogm::nifti
