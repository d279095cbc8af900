#include "grainsize/raster.hpp"

#include <algorithm>

namespace grainsize {

std::vector<InstanceStats> instance_index(const LabelMask& mask) {
  std::vector<InstanceStats> table(static_cast<std::size_t>(kMaxLabel) + 1);
  std::vector<bool> seen(table.size(), false);
  for (int y = 0; y < mask.height(); ++y) {
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      const LabelId id = row[x];
      if (id == 0) continue;
      auto& s = table[id];
      if (!seen[id]) {
        seen[id] = true;
        s.id = id;
        s.bbox = {x, y, x, y};
      } else {
        s.bbox.min_x = std::min(s.bbox.min_x, x);
        s.bbox.max_x = std::max(s.bbox.max_x, x);
        s.bbox.max_y = y;
      }
      ++s.area;
    }
  }
  std::vector<InstanceStats> out;
  for (std::size_t id = 1; id < table.size(); ++id) {
    if (seen[id]) out.push_back(table[id]);
  }
  return out;
}

std::size_t instance_count(const LabelMask& mask) {
  std::vector<bool> seen(static_cast<std::size_t>(kMaxLabel) + 1, false);
  std::size_t n = 0;
  for (const LabelId id : mask.pixels()) {
    if (id != 0 && !seen[id]) {
      seen[id] = true;
      ++n;
    }
  }
  return n;
}

LabelMask compact_labels(const LabelMask& mask) {
  std::vector<LabelId> remap(static_cast<std::size_t>(kMaxLabel) + 1, 0);
  for (const LabelId id : mask.pixels()) {
    if (id != 0) remap[id] = 1;
  }
  LabelId next = 0;
  for (std::size_t id = 1; id < remap.size(); ++id) {
    if (remap[id] != 0) remap[id] = ++next;
  }
  LabelMask out(mask.width(), mask.height());
  auto dst = out.pixels();
  const auto src = mask.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = remap[src[i]];
  return out;
}

}  // namespace grainsize
