#pragma once

// Grid tile coding over a bounded continuous state. Tilings are displaced by
// i/num_tilings of a tile width in every dimension. Non-wrapping dimensions
// get one extra tile per tiling to absorb the displacement; wrapping
// dimensions identify coordinates modulo (high - low).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rshape {

struct TileCoderConfig {
  int num_tilings = 8;
  std::vector<int> tiles_per_dim;
  std::vector<std::pair<double, double>> bounds_per_dim;
  std::vector<bool> wrap_mask;

  std::size_t dims() const { return tiles_per_dim.size(); }

  void validate() const {
    if (num_tilings < 1) throw std::invalid_argument("tile coder needs at least one tiling");
    if (tiles_per_dim.empty()) throw std::invalid_argument("tile coder needs at least one dimension");
    if (bounds_per_dim.size() != dims() || wrap_mask.size() != dims())
      throw std::invalid_argument("tile coder per-dimension lists differ in length");
    for (std::size_t d = 0; d < dims(); ++d) {
      if (tiles_per_dim[d] < 1) throw std::invalid_argument("tiles per dimension must be positive");
      const auto [lo, hi] = bounds_per_dim[d];
      if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("tile coder bounds must be finite with high > low");
    }
  }

  // Slots per dimension within one tiling.
  int span(std::size_t d) const { return tiles_per_dim[d] + (wrap_mask[d] ? 0 : 1); }

  std::size_t tiles_per_tiling() const {
    std::size_t n = 1;
    for (std::size_t d = 0; d < dims(); ++d) n *= static_cast<std::size_t>(span(d));
    return n;
  }

  std::size_t total_table_size() const {
    return static_cast<std::size_t>(num_tilings) * tiles_per_tiling();
  }
};

// 8 tilings of 2 tiles per dimension over (x, x_dot, theta, theta_dot), with
// the pole angle wrapping over [-pi, pi).
inline TileCoderConfig cartpole_tile_config() {
  TileCoderConfig c;
  c.num_tilings = 8;
  c.tiles_per_dim = {2, 2, 2, 2};
  c.bounds_per_dim = {{-2.4, 2.4}, {-3.0, 3.0}, {-std::numbers::pi, std::numbers::pi}, {-3.5, 3.5}};
  c.wrap_mask = {false, false, true, false};
  return c;
}

struct ActiveFeatures {
  std::vector<std::uint32_t> indices;

  std::size_t size() const { return indices.size(); }
  friend bool operator==(const ActiveFeatures&, const ActiveFeatures&) = default;
};

class TileCoder {
 public:
  explicit TileCoder(TileCoderConfig config) : config_(std::move(config)) {
    config_.validate();
    table_size_ = config_.total_table_size();
  }

  const TileCoderConfig& config() const { return config_; }
  std::size_t table_size() const { return table_size_; }
  int num_tilings() const { return config_.num_tilings; }

  ActiveFeatures encode(std::span<const double> state) const {
    if (state.size() != config_.dims())
      throw std::invalid_argument("state has " + std::to_string(state.size()) +
                                  " components, tile coder expects " +
                                  std::to_string(config_.dims()));
    // Position of each component in tile-width units, relative to low.
    std::vector<double> scaled(config_.dims());
    for (std::size_t d = 0; d < config_.dims(); ++d) {
      const auto [lo, hi] = config_.bounds_per_dim[d];
      const int tiles = config_.tiles_per_dim[d];
      double u = (state[d] - lo) / (hi - lo);
      if (config_.wrap_mask[d]) {
        u -= std::floor(u);
      } else {
        u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
      }
      scaled[d] = snap(u * tiles);
    }

    ActiveFeatures out;
    out.indices.reserve(static_cast<std::size_t>(config_.num_tilings));
    const std::size_t per_tiling = config_.tiles_per_tiling();
    for (int t = 0; t < config_.num_tilings; ++t) {
      const double offset = static_cast<double>(t) / config_.num_tilings;
      std::size_t index = 0;
      for (std::size_t d = 0; d < config_.dims(); ++d) {
        const int tiles = config_.tiles_per_dim[d];
        long coord = static_cast<long>(std::floor(scaled[d] + offset));
        if (config_.wrap_mask[d]) {
          coord %= tiles;
          if (coord < 0) coord += tiles;
        }
        index = index * static_cast<std::size_t>(config_.span(d)) + static_cast<std::size_t>(coord);
      }
      out.indices.push_back(static_cast<std::uint32_t>(static_cast<std::size_t>(t) * per_tiling + index));
    }
    return out;
  }

 private:
  // Tile boundaries are resolved at 2^-30 of a tile width so that rounding
  // noise (e.g. from adding a wrap period) cannot move a point across one.
  static double snap(double v) { return std::nearbyint(v * 0x1.0p30) * 0x1.0p-30; }

  TileCoderConfig config_;
  std::size_t table_size_ = 0;
};

}  // namespace rshape
