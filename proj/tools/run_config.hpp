#ifndef GRAINSIZE_TOOLS_RUN_CONFIG_HPP
#define GRAINSIZE_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cli {

/// Bad configuration or flags; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PrepSection {
  int threshold = 128;
  int erosion_radius = 1;
  int min_area = 200;
  int connectivity = 4;
};

struct StitchSection {
  int rows = 3;
  int cols = 4;
  int patch_width = 0;
  int patch_height = 0;
  std::string filename_pattern;
  std::optional<std::string> mask_pattern;
  bool relabel_masks = true;
};

struct EvalSection {
  double boundary_tolerance = 2.0;
  std::vector<double> iou_thresholds;
};

struct RobustnessSection {
  std::vector<int> targets{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<std::string> modes{"gt-derived", "gt-free"};
};

struct SynthSection {
  int width = 512;
  int height = 512;
  int n_seeds = 100;
  std::uint64_t rng_seed = 0;
  int boundary_thickness = 0;
  int count = 1;
  double merge_fraction = 0.0;
  double split_fraction = 0.0;
  std::uint64_t degrade_seed = 0;
};

struct IoSection {
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> gt;
  std::optional<std::string> pred;
  std::optional<std::string> overlay_dir;
  std::optional<std::string> micrograph_dir;
  std::optional<std::string> report_dir;
  std::string format = "json";
};

struct RunConfig {
  double calibration = 2.26;
  int target_grains = 60;
  std::string circle_mode = "gt-derived";
  int jobs = 1;
  PrepSection prep;
  StitchSection stitch;
  EvalSection eval;
  RobustnessSection robustness;
  SynthSection synth;
  IoSection io;

  /// Library defaults for the fields that mirror library structs.
  static RunConfig defaults();

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Missing keys keep their current value; unknown keys are rejected.
void merge_json(RunConfig& c, const nlohmann::json& j);

RunConfig load_config(const std::string& path);

}  // namespace cli

#endif  // GRAINSIZE_TOOLS_RUN_CONFIG_HPP
