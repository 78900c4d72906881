/**
 * @file support.hpp
 * @brief Shared fixtures and independent oracles for the test suites
 */
#pragma once

#include "dhogm/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dhogm::test {

/// Directory removed on destruction.
class TempDir {
public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "dhogm_test_XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    m_path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(m_path, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return m_path; }
  std::filesystem::path operator/(const std::string &name) const { return m_path / name; }

private:
  std::filesystem::path m_path;
};

inline Volume random_volume(Shape3 shape, std::uint64_t seed, float lo = 0.0f,
                            float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> data(shape.voxels());
  for (auto &v : data) {
    v = dist(rng);
  }
  return Volume(shape, std::move(data));
}

/// Volume filled from f(x, y, z).
template <typename F>
Volume volume_from(Shape3 shape, F &&f) {
  Volume v(shape);
  for (std::size_t z = 0; z < shape.nz; ++z) {
    for (std::size_t y = 0; y < shape.ny; ++y) {
      for (std::size_t x = 0; x < shape.nx; ++x) {
        v(x, y, z) = static_cast<float>(f(x, y, z));
      }
    }
  }
  return v;
}

/// Finite difference of g at integer position i in [0, n), written out case by
/// case with explicit neighbour indices.
template <typename G>
double oracle_diff(G &&g, long i, long n) {
  if (i == 0) {
    return g(1) - g(0);
  }
  if (i == n - 1) {
    return g(n - 1) - g(n - 2);
  }
  return (g(i + 1) - g(i - 1)) / 2.0;
}

/// Brute-force 3D gradient magnitude over the whole volume, x-fastest.
inline std::vector<double> oracle_gradient_3d(const Volume &v) {
  const auto s = v.shape();
  const long nx = static_cast<long>(s.nx);
  const long ny = static_cast<long>(s.ny);
  const long nz = static_cast<long>(s.nz);
  auto at = [&](long x, long y, long z) {
    return static_cast<double>(v.data()[static_cast<std::size_t>(x + nx * (y + ny * z))]);
  };
  std::vector<double> out;
  for (long z = 0; z < nz; ++z) {
    for (long y = 0; y < ny; ++y) {
      for (long x = 0; x < nx; ++x) {
        const double gx = oracle_diff([&](long i) { return at(i, y, z); }, x, nx);
        const double gy = oracle_diff([&](long i) { return at(x, i, z); }, y, ny);
        const double gz = oracle_diff([&](long i) { return at(x, y, i); }, z, nz);
        out.push_back(std::sqrt(gx * gx + gy * gy + gz * gz));
      }
    }
  }
  return out;
}

/// Brute-force 2D gradient magnitude of an nx-by-ny image stored x-fastest.
inline std::vector<double> oracle_gradient_2d(const std::vector<double> &img, long nx, long ny) {
  auto at = [&](long x, long y) { return img[static_cast<std::size_t>(x + nx * y)]; };
  std::vector<double> out;
  for (long y = 0; y < ny; ++y) {
    for (long x = 0; x < nx; ++x) {
      const double gx = oracle_diff([&](long i) { return at(i, y); }, x, nx);
      const double gy = oracle_diff([&](long i) { return at(x, i); }, y, ny);
      out.push_back(std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

/// Linear-interpolation percentile computed from a fully sorted copy.
inline double oracle_percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

} // namespace dhogm::test
