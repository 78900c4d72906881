#include "support.hpp"

#include "dhogm/error.hpp"
#include "dhogm/hogm.hpp"
#include "dhogm/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <set>

using namespace dhogm;
using namespace dhogm::synth;

namespace {

const Shape3 kSmall{48, 64, 64};

FeatureConfig small_features() {
  FeatureConfig cfg;
  cfg.target_shape = kSmall;
  cfg.cuboid = {24, 32, 32};
  cfg.slice_window = 30;
  return cfg;
}

PhantomSpec small_spec(std::uint64_t seed) {
  PhantomSpec s;
  s.shape = kSmall;
  s.seed = seed;
  return s;
}

bool same_bits(const Volume &a, const Volume &b) {
  return a.shape() == b.shape() &&
         std::equal(a.data().begin(), a.data().end(), b.data().begin(), b.data().end(),
                    [](float x, float y) { return std::memcmp(&x, &y, sizeof x) == 0; });
}

} // namespace

TEST_CASE("phantom construction") {
  SUBCASE("deterministic per seed") {
    const auto a = make_phantom(small_spec(3));
    const auto b = make_phantom(small_spec(3));
    CHECK(same_bits(a.volume, b.volume));
    CHECK(std::equal(a.mask.data().begin(), a.mask.data().end(), b.mask.data().begin()));
    CHECK_FALSE(same_bits(a.volume, make_phantom(small_spec(4)).volume));
  }
  SUBCASE("nested ellipsoids carry exactly the contrast levels") {
    auto spec = small_spec(1);
    spec.structure = PhantomStructure::NestedEllipsoids;
    spec.contrast_levels = {0.3, 0.7};
    const auto p = make_phantom(spec);
    std::set<float> values(p.volume.data().begin(), p.volume.data().end());
    CHECK(values == std::set<float>{0.0f, 0.3f, 0.7f});
  }
  SUBCASE("intensities in [0, 1] and nonzero voxels inside the mask") {
    for (auto structure : {PhantomStructure::NestedEllipsoids, PhantomStructure::PerlinTexture}) {
      auto spec = small_spec(2);
      spec.structure = structure;
      const auto p = make_phantom(spec);
      const auto v = p.volume.data();
      const auto m = p.mask.data();
      std::size_t inside = 0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(v[i] >= 0.0f);
        CHECK(v[i] <= 1.0f);
        if (v[i] != 0.0f) {
          CHECK(m[i] != 0);
        }
        inside += m[i] != 0 ? 1 : 0;
      }
      CHECK(inside > v.size() / 10);
      CHECK(inside < v.size());
    }
  }
  SUBCASE("needs two contrast levels") {
    auto spec = small_spec(0);
    spec.contrast_levels = {0.5};
    CHECK_THROWS_AS(make_phantom(spec), Error);
  }
}

TEST_CASE("severity zero is the identity") {
  const auto p = make_phantom(small_spec(5));
  for (auto kind : {CorruptionKind::GhostMotion, CorruptionKind::GaussianNoise,
                    CorruptionKind::GaussianBlur}) {
    const CorruptionSpec spec{kind, 0.0, 17};
    CHECK(same_bits(corrupt(p.volume, spec), p.volume));
    const auto m = corrupt_mask(p.mask, spec);
    CHECK(std::equal(m.data().begin(), m.data().end(), p.mask.data().begin()));
  }
}

TEST_CASE("ghost motion") {
  const auto p = make_phantom(small_spec(6));
  SUBCASE("convex combination keeps the value range") {
    const auto lo = *std::min_element(p.volume.data().begin(), p.volume.data().end());
    const auto hi = *std::max_element(p.volume.data().begin(), p.volume.data().end());
    for (double s : {1.0, 2.0, 4.0, 8.0}) {
      const auto m = corrupt_motion(p.volume, s);
      for (float x : m.data()) {
        CHECK(x >= lo);
        CHECK(x <= hi);
      }
    }
  }
  SUBCASE("matches a direct per-voxel oracle") {
    const auto v = test::random_volume({5, 7, 6}, 1);
    const auto out = corrupt_motion(v, 2.2);
    const auto clampi = [](long i, long n) { return std::max(0L, std::min(i, n - 1)); };
    for (long z = 0; z < 6; ++z) {
      for (long y = 0; y < 7; ++y) {
        for (long x = 0; x < 5; ++x) {
          const auto at = [&](long yy, long zz) {
            return static_cast<double>(v(static_cast<std::size_t>(x),
                                         static_cast<std::size_t>(clampi(yy, 7)),
                                         static_cast<std::size_t>(clampi(zz, 6))));
          };
          const double expect = 0.5 * at(y, z) +
                                0.125 * (at(y - 2, z) + at(y + 2, z) + at(y, z - 2) + at(y, z + 2));
          CHECK(out(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                    static_cast<std::size_t>(z)) == doctest::Approx(expect).epsilon(1e-6));
        }
      }
    }
  }
  SUBCASE("ghost mask covers the ghosts") {
    const CorruptionSpec spec{CorruptionKind::GhostMotion, 4.0, 0};
    const auto m = corrupt_mask(p.mask, spec);
    const auto v = corrupt(p.volume, spec);
    for (std::size_t i = 0; i < v.data().size(); ++i) {
      if (v.data()[i] != 0.0f) {
        CHECK(m.data()[i] != 0);
      }
    }
  }
}

TEST_CASE("motion flattens the gradient histograms") {
  const FeatureConfig cfg = small_features();
  for (std::uint64_t seed : {0u, 1u}) {
    const auto p = make_phantom(small_spec(seed));
    const auto severe = corrupt_motion(p.volume, 8.0);

    const auto clean3 = cuboid_features(p.volume, cfg);
    const auto bad3 = cuboid_features(severe, cfg);
    CHECK(clean3.d_final < bad3.d_final);
    // the centre cuboid on its own
    CHECK(clean3.d3d_values[13] < bad3.d3d_values[13]);

  }
}

TEST_CASE("motion flattens per-slice histograms at full resolution") {
  const auto p = make_phantom(PhantomSpec{});
  const auto severe = corrupt_motion(p.volume, 8.0);
  const auto clean = slice_features(p.volume);
  const auto bad = slice_features(severe);
  REQUIRE(clean.size() == 60);
  std::size_t larger = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto &a = clean.triplets[i];
    const auto &b = bad.triplets[i];
    for (auto [x, y] : {std::pair{a.axial, b.axial}, std::pair{a.coronal, b.coronal},
                        std::pair{a.sagittal, b.sagittal}}) {
      CHECK(std::isfinite(x));
      ++total;
      larger += y > x ? 1 : 0;
    }
  }
  CHECK(static_cast<double>(larger) >= 0.9 * static_cast<double>(total));
}

TEST_CASE("gaussian noise") {
  SUBCASE("empirical sigma within 2% on 64^3") {
    const Volume flat(Shape3{64, 64, 64}, std::vector<float>(64 * 64 * 64, 0.5f));
    for (double sigma : {0.0103, 0.05}) {
      const auto noisy = corrupt_noise(flat, sigma, 7, false);
      double sum = 0.0;
      double ss = 0.0;
      for (std::size_t i = 0; i < noisy.data().size(); ++i) {
        const double d = static_cast<double>(noisy.data()[i]) - 0.5;
        sum += d;
        ss += d * d;
      }
      const double n = static_cast<double>(noisy.data().size());
      const double sd = std::sqrt(ss / n - (sum / n) * (sum / n));
      CHECK(std::abs(sd - sigma) <= 0.02 * sigma);
    }
  }
  SUBCASE("deterministic per seed and clipped by default") {
    const auto p = make_phantom(small_spec(8));
    CHECK(same_bits(corrupt_noise(p.volume, 0.2, 3), corrupt_noise(p.volume, 0.2, 3)));
    CHECK_FALSE(same_bits(corrupt_noise(p.volume, 0.2, 3), corrupt_noise(p.volume, 0.2, 4)));
    const auto noisy = corrupt_noise(p.volume, 0.2, 3);
    for (float x : noisy.data()) {
      CHECK(x >= 0.0f);
      CHECK(x <= 1.0f);
    }
  }
  SUBCASE("PSNR closed forms") {
    const auto v = test::random_volume({16, 16, 16}, 2, 0.0f, 0.8f);
    CHECK(psnr(v, v) == std::numeric_limits<double>::infinity());
    std::vector<float> shifted(v.data().begin(), v.data().end());
    for (auto &x : shifted) {
      x += 0.1f;
    }
    CHECK(psnr(v, Volume(v.shape(), shifted)) == doctest::Approx(20.0).epsilon(1e-5));
    CHECK_THROWS_AS(psnr(v, Volume(Shape3{16, 16, 15})), Error);

    const double analytic = 20.0 * std::log10(1.0 / 0.0103);
    CHECK(analytic == doctest::Approx(39.74).epsilon(1e-4));
    const Volume flat(Shape3{64, 64, 64}, std::vector<float>(64 * 64 * 64, 0.5f));
    const double got = psnr(flat, corrupt_noise(flat, 0.0103, 11, false));
    CHECK(std::abs(got - analytic) <= 0.1);
  }
  SUBCASE("PSNR strictly decreasing in sigma") {
    const auto p = make_phantom(small_spec(9));
    double last = std::numeric_limits<double>::infinity();
    for (double sigma : {0.001, 0.005, 0.01, 0.05}) {
      const double d = psnr(p.volume, corrupt_noise(p.volume, sigma, 1));
      CHECK(d < last);
      last = d;
    }
  }
}

TEST_CASE("gaussian blur") {
  const auto p = make_phantom(small_spec(10));
  SUBCASE("preserves a constant volume") {
    const Volume flat(Shape3{9, 9, 9}, std::vector<float>(729, 0.25f));
    const auto blurred = gaussian_blur(flat, 1.5);
    for (float x : blurred.data()) {
      CHECK(x == doctest::Approx(0.25f).epsilon(1e-6));
    }
  }
  SUBCASE("stronger blur moves further from the original") {
    double last = std::numeric_limits<double>::infinity();
    for (double sigma : {0.5, 1.0, 2.0}) {
      const double d = psnr(p.volume, gaussian_blur(p.volume, sigma));
      CHECK(d < last);
      last = d;
    }
  }
  SUBCASE("negative severities are rejected") {
    CHECK_THROWS_AS(gaussian_blur(p.volume, -1.0), Error);
    CHECK_THROWS_AS(corrupt_motion(p.volume, -1.0), Error);
    CHECK_THROWS_AS(corrupt_noise(p.volume, -0.1, 0), Error);
  }
}
