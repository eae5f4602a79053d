#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <numbers>
#include <set>

#include "rshape/features.hpp"
#include "rshape/random.hpp"

namespace rshape {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::uint32_t> encode(const TileCoder& coder, std::array<double, 4> s) { return coder.encode(s).indices; }

TEST(TileCoderConfigTest, CartPoleTableSize) {
  const auto cfg = cartpole_tile_config();
  // Three slots per bounded dimension, two for the wrapping angle.
  EXPECT_EQ(cfg.tiles_per_tiling(), 3u * 3u * 2u * 3u);
  EXPECT_EQ(cfg.total_table_size(), 432u);
}

TEST(TileCoderConfigTest, RejectsInconsistentConfigs) {
  TileCoderConfig c = cartpole_tile_config();
  c.wrap_mask.pop_back();
  EXPECT_THROW(TileCoder{c}, std::invalid_argument);
  c = cartpole_tile_config();
  c.bounds_per_dim[0] = {1.0, 1.0};
  EXPECT_THROW(TileCoder{c}, std::invalid_argument);
  c = cartpole_tile_config();
  c.num_tilings = 0;
  EXPECT_THROW(TileCoder{c}, std::invalid_argument);
}

TEST(TileCoderTest, CentreAndCornerIndicesByHand) {
  const TileCoder coder(cartpole_tile_config());
  // The centre sits at one tile width in every dimension, so floor(1 + t/8) = 1:
  // within-tiling index ((1*3 + 1)*2 + 1)*3 + 1 = 28.
  const auto centre = encode(coder, {0.0, 0.0, 0.0, 0.0});
  const auto corner = encode(coder, {-2.4, -3.0, -kPi, -3.5});
  for (std::uint32_t t = 0; t < 8; ++t) {
    EXPECT_EQ(centre[t], t * 54 + 28);
    EXPECT_EQ(corner[t], t * 54);
  }
}

TEST(TileCoderTest, WrongDimensionThrows) {
  const TileCoder coder(cartpole_tile_config());
  const std::array<double, 3> s{0.0, 0.0, 0.0};
  EXPECT_THROW(coder.encode(s), std::invalid_argument);
}

TEST(TileCoderTest, OutOfBoundsClampsOnBoundedDimensions) {
  const TileCoder coder(cartpole_tile_config());
  EXPECT_EQ(encode(coder, {10.0, 0.1, 0.2, -0.3}), encode(coder, {2.4, 0.1, 0.2, -0.3}));
  EXPECT_EQ(encode(coder, {0.1, -50.0, 0.2, 90.0}), encode(coder, {0.1, -3.0, 0.2, 3.5}));
}

TEST(TileCoderTest, AngleWrapsAroundPlusMinusPi) {
  const TileCoder coder(cartpole_tile_config());
  EXPECT_EQ(encode(coder, {0.3, 0.2, kPi, 0.1}), encode(coder, {0.3, 0.2, -kPi, 0.1}));
  EXPECT_EQ(encode(coder, {0.3, 0.2, 0.7 + 2 * kPi, 0.1}), encode(coder, {0.3, 0.2, 0.7, 0.1}));
  EXPECT_EQ(encode(coder, {0.3, 0.2, 0.7 - 6 * kPi, 0.1}), encode(coder, {0.3, 0.2, 0.7, 0.1}));
}

TEST(TileCoderTest, NearbyStatesShareMoreTilesThanDistantOnes) {
  const TileCoder coder(cartpole_tile_config());
  auto shared = [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] == b[i] ? 1 : 0;
    return n;
  };
  const auto base = encode(coder, {0.1, 0.1, 0.1, 0.1});
  EXPECT_EQ(shared(base, encode(coder, {0.1, 0.1, 0.1, 0.1})), 8);
  EXPECT_GE(shared(base, encode(coder, {0.12, 0.1, 0.1, 0.1})), 7);
  EXPECT_EQ(shared(base, encode(coder, {2.4, 0.1, 0.1, 0.1})), 0);
}

TEST(TileCoderPropertyTest, RandomStatesHaveOneFeaturePerTilingInRange) {
  const TileCoder coder(cartpole_tile_config());
  Rng rng(42);
  for (int i = 0; i < 20000; ++i) {
    const std::array<double, 4> s{uniform_real(rng, -5, 5), uniform_real(rng, -5, 5), uniform_real(rng, -10, 10),
                                  uniform_real(rng, -5, 5)};
    const auto f = coder.encode(s);
    ASSERT_EQ(f.size(), 8u);
    for (std::size_t t = 0; t < 8; ++t) {
      ASSERT_GE(f.indices[t], t * 54);
      ASSERT_LT(f.indices[t], (t + 1) * 54);
    }
    ASSERT_EQ(std::set<std::uint32_t>(f.indices.begin(), f.indices.end()).size(), 8u);
    ASSERT_EQ(coder.encode(s), f);
  }
}

TEST(TileCoderTest, OneDimensionalOffsetsMatchDisplacement) {
  TileCoderConfig c;
  c.num_tilings = 4;
  c.tiles_per_dim = {1};
  c.bounds_per_dim = {{0.0, 1.0}};
  c.wrap_mask = {false};
  const TileCoder coder(c);
  // Tiling t covers [0, 1 - t/4) with slot 0 and the rest with slot 1.
  const std::array<double, 1> x{0.6};
  const auto f = coder.encode(x);
  EXPECT_EQ(f.indices, (std::vector<std::uint32_t>{0, 2, 5, 7}));
}

}  // namespace
}  // namespace rshape
