#include "grainsize/mask_prep.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "disjoint_set.hpp"
#include "grainsize/error.hpp"

namespace grainsize {
namespace {

using detail::DisjointSet;

std::vector<std::pair<int, int>> disk_offsets(int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    }
  }
  return offsets;
}

}  // namespace

void PrepConfig::validate() const {
  if (threshold <= 0 || threshold > 255) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be in (0, 255], got " + std::to_string(threshold));
  }
  if (erosion_radius < 0) throw Error(ErrorCode::InvalidArgument, "erosion radius must be >= 0");
  if (min_area < 0) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 0");
  if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
    throw Error(ErrorCode::InvalidArgument, "connectivity must be 4 or 8");
  }
}

BinaryMask binarize_interiors(const GrayImage& image, int threshold) {
  BinaryMask out(image.width(), image.height());
  auto dst = out.pixels();
  const auto src = image.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] < threshold ? 1 : 0;
  return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "erosion radius must be >= 0");
  if (radius == 0) return mask;
  const auto offsets = disk_offsets(radius);
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      bool keep = true;
      for (const auto& [dx, dy] : offsets) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!mask.contains(nx, ny) || !mask.at(nx, ny)) {
          keep = false;
          break;
        }
      }
      out.at(x, y) = keep ? 1 : 0;
    }
  }
  return out;
}

ComponentLabels label_components_raw(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Grid<std::uint32_t> provisional(w, h, 0);
  DisjointSet sets;
  sets.make();  // slot 0 stands for background

  const bool eight = connectivity == Connectivity::Eight;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      // Already-visited neighbours: W, N, and for 8-connectivity NW and NE.
      std::uint32_t neighbours[4];
      int n = 0;
      if (x > 0 && provisional.at(x - 1, y)) neighbours[n++] = provisional.at(x - 1, y);
      if (y > 0 && provisional.at(x, y - 1)) neighbours[n++] = provisional.at(x, y - 1);
      if (eight && y > 0) {
        if (x > 0 && provisional.at(x - 1, y - 1)) neighbours[n++] = provisional.at(x - 1, y - 1);
        if (x + 1 < w && provisional.at(x + 1, y - 1)) neighbours[n++] = provisional.at(x + 1, y - 1);
      }
      if (n == 0) {
        provisional.at(x, y) = sets.make();
        continue;
      }
      std::uint32_t label = neighbours[0];
      for (int i = 1; i < n; ++i) label = std::min(label, neighbours[i]);
      provisional.at(x, y) = label;
      for (int i = 0; i < n; ++i) sets.unite(label, neighbours[i]);
    }
  }

  // Roots are visited in increasing provisional order, which is raster order of first pixels.
  std::vector<std::uint32_t> final_id(sets.size(), 0);
  std::uint32_t count = 0;
  for (std::uint32_t i = 1; i < sets.size(); ++i) {
    const std::uint32_t root = sets.find(i);
    if (root == i) final_id[i] = ++count;
  }
  for (std::uint32_t i = 1; i < sets.size(); ++i) final_id[i] = final_id[sets.find(i)];

  ComponentLabels out{Grid<std::uint32_t>(w, h, 0), count};
  auto dst = out.labels.pixels();
  const auto src = provisional.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = final_id[src[i]];
  return out;
}

LabelMask label_components(const BinaryMask& mask, Connectivity connectivity) {
  const ComponentLabels raw = label_components_raw(mask, connectivity);
  if (raw.count > kMaxLabel) {
    throw Error(ErrorCode::LabelOverflow, std::to_string(raw.count) + " components exceed the 16-bit label range");
  }
  LabelMask out(mask.width(), mask.height());
  auto dst = out.pixels();
  const auto src = raw.labels.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<LabelId>(src[i]);
  return out;
}

BinaryMask filter_small(const ComponentLabels& components, int min_area) {
  if (min_area < 0) throw Error(ErrorCode::InvalidArgument, "min_area must be >= 0");
  std::vector<std::size_t> area(static_cast<std::size_t>(components.count) + 1, 0);
  for (const auto id : components.labels.pixels()) ++area[id];
  BinaryMask out(components.labels.width(), components.labels.height());
  auto dst = out.pixels();
  const auto src = components.labels.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = (src[i] != 0 && area[src[i]] >= static_cast<std::size_t>(min_area)) ? 1 : 0;
  }
  return out;
}

LabelMask prepare_mask(const GrayImage& raw, const PrepConfig& config) {
  config.validate();
  const BinaryMask interiors = binarize_interiors(raw, config.threshold);
  const BinaryMask separated = erode(interiors, config.erosion_radius);
  const ComponentLabels components = label_components_raw(separated, config.connectivity);
  const BinaryMask kept = filter_small(components, config.min_area);
  // Filtering removes whole components, so relabelling the survivors with the same
  // connectivity reproduces them with contiguous ids.
  return label_components(kept, config.connectivity);
}

}  // namespace grainsize
