#ifndef GRAINSIZE_RASTER_HPP
#define GRAINSIZE_RASTER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace grainsize {

using LabelId = std::uint16_t;
inline constexpr LabelId kMaxLabel = 65535;

/// Row-major single-plane grid. All image-like values in the library share this shape.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{});
  Grid(int width, int height, std::vector<T> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& at(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& at(int x, int y) const noexcept { return data_[index(x, y)]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit grayscale image (micrographs, edge-style annotation masks).
using GrayImage = Grid<std::uint8_t>;

/// Boolean grid; stored as bytes (0 or 1).
using BinaryMask = Grid<std::uint8_t>;

/// Instance label grid: 0 is background, every other value is one grain.
using LabelMask = Grid<LabelId>;

/// Pixel-level bounding box, inclusive on both ends.
struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = -1;
  int max_y = -1;

  bool operator==(const BoundingBox&) const = default;
};

struct InstanceStats {
  LabelId id = 0;
  std::size_t area = 0;
  BoundingBox bbox;
};

/// Per-instance area and bounding box, sorted by id. Background is excluded.
std::vector<InstanceStats> instance_index(const LabelMask& mask);

/// Number of distinct nonzero ids.
std::size_t instance_count(const LabelMask& mask);

/// Renumbers ids to 1..K preserving their relative order.
LabelMask compact_labels(const LabelMask& mask);

/// Multi-channel raster of 8- or 16-bit samples, interleaved. Used for stitching
/// arbitrary micrographs without committing to a pixel type.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;

  std::size_t row_stride() const noexcept { return static_cast<std::size_t>(width) * channels; }
  bool operator==(const Raster&) const = default;
};

}  // namespace grainsize

#include "grainsize/raster_impl.hpp"

#endif  // GRAINSIZE_RASTER_HPP
