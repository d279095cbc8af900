#ifndef GRAINSIZE_MASK_PREP_HPP
#define GRAINSIZE_MASK_PREP_HPP

#include <cstdint>

#include "grainsize/raster.hpp"

namespace grainsize {

enum class Connectivity { Four = 4, Eight = 8 };

struct PrepConfig {
  int threshold = 128;
  int erosion_radius = 1;
  int min_area = 200;
  Connectivity connectivity = Connectivity::Four;

  void validate() const;
};

/// Component ids before the 16-bit contract is applied.
struct ComponentLabels {
  Grid<std::uint32_t> labels;
  std::uint32_t count = 0;
};

/// Set where intensity < threshold (grain interiors of an edge-style annotation).
BinaryMask binarize_interiors(const GrayImage& image, int threshold);

/// Structuring element of radius r: offsets with dx^2 + dy^2 <= r^2. Radius 1 is the
/// 5-pixel cross. Pixels outside the image count as unset.
BinaryMask erode(const BinaryMask& mask, int radius);

/// Two-pass union-find labelling. Ids follow raster order of each component's first pixel.
ComponentLabels label_components_raw(const BinaryMask& mask, Connectivity connectivity);

/// As label_components_raw, but throws LabelOverflow above 65535 components.
LabelMask label_components(const BinaryMask& mask, Connectivity connectivity);

/// Drops components with area < min_area.
BinaryMask filter_small(const ComponentLabels& components, int min_area);

/// binarize -> erode -> label -> filter_small -> relabel contiguous.
LabelMask prepare_mask(const GrayImage& raw, const PrepConfig& config);

}  // namespace grainsize

#endif  // GRAINSIZE_MASK_PREP_HPP
