#ifndef GRAINSIZE_SYNTH_HPP
#define GRAINSIZE_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "grainsize/jeffries.hpp"
#include "grainsize/raster.hpp"

namespace grainsize {

struct Degradation {
  double merge_fraction = 0.0;
  double split_fraction = 0.0;
  std::uint64_t rng_seed = 0;
};

struct SynthSpec {
  int width = 512;
  int height = 512;
  int n_seeds = 100;
  std::uint64_t rng_seed = 0;
  int boundary_thickness = 0;
  std::optional<Degradation> degradation;

  void validate() const;
};

struct SynthField {
  LabelMask labels;
  // 255 on boundaries, 0 in interiors.
  GrayImage edges;
  std::vector<Point> seeds;
};

/// Uniform seeds in [0, width) x [0, height), drawn from a 64-bit Mersenne twister.
std::vector<Point> random_seeds(int width, int height, int n_seeds, std::uint64_t rng_seed);

/// Nearest-seed labelling (ties to the lowest seed index). Boundaries of
/// `boundary_thickness` pixels are cut out of the label mask as background.
SynthField voronoi_from_seeds(int width, int height, const std::vector<Point>& seeds,
                              int boundary_thickness);

SynthField generate_voronoi(const SynthSpec& spec);

/// Seeds per mm^2 over the whole canvas.
double true_density(const SynthSpec& spec, const Calibration& calibration);

/// Merges round(merge_fraction * K) random adjacent pairs, then bisects
/// round(split_fraction * K) random instances along a chord through their centroid.
/// Output ids are compacted to 1..K'.
LabelMask degrade(const LabelMask& mask, const Degradation& degradation);

}  // namespace grainsize

#endif  // GRAINSIZE_SYNTH_HPP
