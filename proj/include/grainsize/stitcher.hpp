#ifndef GRAINSIZE_STITCHER_HPP
#define GRAINSIZE_STITCHER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "grainsize/raster.hpp"

namespace grainsize {

struct PatchCoordinate {
  std::string group_id;
  int row = 0;
  int col = 0;

  auto operator<=>(const PatchCoordinate&) const = default;
};

inline constexpr const char* kDefaultPatchPattern =
    R"((?<group>.+)_r(?<row>\d+)_c(?<col>\d+)\.(png|tif|tiff)$)";

struct StitchPlan {
  int rows = 3;
  int cols = 4;
  // Expected patch size; 0 means take it from the first patch of each group.
  int patch_width = 0;
  int patch_height = 0;
  // Regular expressions with named captures `group`, `row` and `col`.
  std::string filename_pattern = kDefaultPatchPattern;
  std::optional<std::string> mask_pattern;
  // Re-run connected components on stitched masks so grains cut by a seam become one.
  bool relabel_masks = true;

  void validate() const;
};

struct Patch {
  PatchCoordinate coord;
  Raster image;
};

/// Throws NoMatch when the name does not match or the captured cell is off the grid.
PatchCoordinate parse_coordinate(const std::string& filename, const std::string& pattern, int rows,
                                 int cols);

/// Places patch (r, c) pixel (y, x) at (r * ph + y, c * pw + x).
Raster stitch_group(const std::vector<Patch>& patches, const StitchPlan& plan);

/// Inverse of stitch_group. Output patches are in row-major grid order.
std::vector<Patch> split_grid(const Raster& image, int rows, int cols, const std::string& group_id = {});

/// Unifies instances across patch seams: pixels of one patch stay together when they
/// share a label; across a seam any two nonzero 4-neighbours are joined. Output ids are
/// 1..K in raster order.
LabelMask relabel_stitched(const LabelMask& stitched, int patch_width, int patch_height);

struct SkippedGroup {
  std::string group_id;
  std::string reason;
};

struct StitchSummary {
  std::vector<std::string> groups;
  std::vector<SkippedGroup> skipped;
  std::vector<std::string> errors;
  // Files in the input directory that match neither pattern.
  std::vector<std::string> ignored;
};

/// Stitches every complete group found in `input_dir`. Incomplete groups and per-file
/// failures are reported in the summary, not thrown.
StitchSummary stitch_dataset(const std::filesystem::path& input_dir, const StitchPlan& plan,
                             const std::filesystem::path& output_dir, int jobs = 1);

}  // namespace grainsize

#endif  // GRAINSIZE_STITCHER_HPP
