#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "handles.hpp"
#include "run_config.hpp"

namespace {

using cli::RunConfig;

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<double> calibration;
  std::optional<int> target;
  std::optional<std::string> mode;
  std::optional<std::string> overlay_dir;
  std::optional<int> jobs;
  std::optional<std::string> format;
  std::optional<std::string> report_dir;
  bool dump_config = false;
};

struct CommandFlags {
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> gt;
  std::optional<std::string> pred;
  std::optional<std::string> micrograph_dir;
  // stitch
  std::optional<int> rows;
  std::optional<int> cols;
  std::optional<int> patch_width;
  std::optional<int> patch_height;
  std::optional<std::string> pattern;
  std::optional<std::string> mask_pattern;
  bool no_relabel = false;
  // prep
  std::optional<int> threshold;
  std::optional<int> erosion_radius;
  std::optional<int> min_area;
  std::optional<int> connectivity;
  // evaluate
  std::optional<double> boundary_tolerance;
  // robustness
  std::vector<int> targets;
  std::vector<std::string> modes;
  // synth
  std::optional<int> seeds;
  std::optional<int> size;
  std::optional<int> width;
  std::optional<int> height;
  std::optional<std::uint64_t> rng_seed;
  std::optional<int> count;
  std::optional<int> boundary_thickness;
  std::optional<double> merge;
  std::optional<double> split;
  std::optional<std::uint64_t> degrade_seed;
  // analyze
  std::vector<std::string> masks;
};

template <typename T>
void set_if(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

template <typename T>
void set_if(const std::optional<T>& flag, std::optional<T>& field) {
  if (flag) field = *flag;
}

RunConfig effective_config(const CommonFlags& common, const CommandFlags& f) {
  RunConfig c = common.config ? cli::load_config(*common.config) : RunConfig::defaults();
  set_if(common.calibration, c.calibration);
  set_if(common.target, c.target_grains);
  set_if(common.mode, c.circle_mode);
  set_if(common.overlay_dir, c.io.overlay_dir);
  set_if(common.jobs, c.jobs);
  set_if(common.format, c.io.format);
  set_if(common.report_dir, c.io.report_dir);

  set_if(f.input, c.io.input);
  set_if(f.output, c.io.output);
  set_if(f.gt, c.io.gt);
  set_if(f.pred, c.io.pred);
  set_if(f.micrograph_dir, c.io.micrograph_dir);

  set_if(f.rows, c.stitch.rows);
  set_if(f.cols, c.stitch.cols);
  set_if(f.patch_width, c.stitch.patch_width);
  set_if(f.patch_height, c.stitch.patch_height);
  set_if(f.pattern, c.stitch.filename_pattern);
  set_if(f.mask_pattern, c.stitch.mask_pattern);
  if (f.no_relabel) c.stitch.relabel_masks = false;

  set_if(f.threshold, c.prep.threshold);
  set_if(f.erosion_radius, c.prep.erosion_radius);
  set_if(f.min_area, c.prep.min_area);
  set_if(f.connectivity, c.prep.connectivity);

  set_if(f.boundary_tolerance, c.eval.boundary_tolerance);

  if (!f.targets.empty()) c.robustness.targets = f.targets;
  if (!f.modes.empty()) c.robustness.modes = f.modes;

  set_if(f.seeds, c.synth.n_seeds);
  if (f.size) c.synth.width = c.synth.height = *f.size;
  set_if(f.width, c.synth.width);
  set_if(f.height, c.synth.height);
  set_if(f.rng_seed, c.synth.rng_seed);
  set_if(f.count, c.synth.count);
  set_if(f.boundary_thickness, c.synth.boundary_thickness);
  set_if(f.merge, c.synth.merge_fraction);
  set_if(f.split, c.synth.split_fraction);
  set_if(f.degrade_seed, c.synth.degrade_seed);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jeffries planimetric grain size measurement on instance label masks"};
  app.set_version_flag("--version", std::string(gs_version()));
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags common;
  CommandFlags f;
  app.add_option("--config", common.config, "JSON run configuration; flags override it");
  app.add_option("--calibration", common.calibration, "Pixels per micrometre (default 2.26)");
  app.add_option("--target", common.target, "Target number of grains wholly inside the test circle (default 60)");
  app.add_option("--mode", common.mode, "Circle mode for evaluate")->check(CLI::IsMember({"gt-derived", "gt-free"}));
  app.add_option("--overlay-dir", common.overlay_dir, "Write classification overlays here");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "Report format on stdout")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--report-dir", common.report_dir, "Also write CSV and JSON reports to this directory");
  app.add_flag("--dump-config", common.dump_config, "Print the effective configuration as JSON and exit");

  auto* stitch = app.add_subcommand("stitch", "Reassemble patch grids into full-field images");
  stitch->add_option("--input", f.input, "Directory of patches");
  stitch->add_option("--output", f.output, "Directory for stitched images");
  stitch->add_option("--rows", f.rows, "Patch rows per group");
  stitch->add_option("--cols", f.cols, "Patch columns per group");
  stitch->add_option("--patch-width", f.patch_width, "Expected patch width (0 = infer)");
  stitch->add_option("--patch-height", f.patch_height, "Expected patch height (0 = infer)");
  stitch->add_option("--pattern", f.pattern, "Image filename regex with named groups group, row, col");
  stitch->add_option("--mask-pattern", f.mask_pattern, "Mask filename regex with the same named groups");
  stitch->add_flag("--no-relabel", f.no_relabel, "Keep patch labels instead of re-unifying across seams");

  auto* prep = app.add_subcommand("prep", "Convert edge-style annotations into 16-bit label masks");
  prep->add_option("--input", f.input, "Grayscale annotation file or directory");
  prep->add_option("--output", f.output, "Directory for label TIFFs");
  prep->add_option("--threshold", f.threshold, "Interior threshold (pixel < threshold)");
  prep->add_option("--erosion-radius", f.erosion_radius, "Erosion radius in pixels");
  prep->add_option("--min-area", f.min_area, "Smallest component kept, in pixels");
  prep->add_option("--connectivity", f.connectivity, "4 or 8")->check(CLI::IsMember({4, 8}));

  auto* analyze = app.add_subcommand("analyze", "Jeffries planimetric count on label masks");
  analyze->add_option("masks", f.masks, "Mask files or directories");
  analyze->add_option("--input", f.input, "Mask file or directory");
  analyze->add_option("--micrograph-dir", f.micrograph_dir, "Micrographs matched by file stem, for overlays");

  auto* evaluate = app.add_subcommand("evaluate", "Compare predicted masks with ground truth");
  evaluate->add_option("--gt", f.gt, "Ground-truth mask directory");
  evaluate->add_option("--pred", f.pred, "Predicted mask directory");
  evaluate->add_option("--boundary-tolerance", f.boundary_tolerance, "Boundary F1 tolerance in pixels");

  auto* robustness = app.add_subcommand("robustness", "Sweep target grain counts and circle modes");
  robustness->add_option("--gt", f.gt, "Ground-truth mask directory");
  robustness->add_option("--pred", f.pred, "Predicted mask directory");
  robustness->add_option("--targets", f.targets, "Target grain counts")->delimiter(',');
  robustness->add_option("--modes", f.modes, "Circle modes")
      ->delimiter(',')
      ->check(CLI::IsMember({"gt-derived", "gt-free"}));

  auto* synth = app.add_subcommand("synth", "Generate synthetic Voronoi mask pairs");
  synth->add_option("--output", f.output, "Output directory");
  synth->add_option("--seeds", f.seeds, "Voronoi seeds per field");
  synth->add_option("--size", f.size, "Square canvas side in pixels");
  synth->add_option("--width", f.width, "Canvas width");
  synth->add_option("--height", f.height, "Canvas height");
  synth->add_option("--rng-seed", f.rng_seed, "Seed of the first field; field i uses seed + i");
  synth->add_option("--count", f.count, "Number of fields");
  synth->add_option("--boundary-thickness", f.boundary_thickness, "Background boundary width in the labels");
  synth->add_option("--merge", f.merge, "Fraction of grains merged into a neighbour in the prediction");
  synth->add_option("--split", f.split, "Fraction of grains bisected in the prediction");
  synth->add_option("--degrade-seed", f.degrade_seed, "Seed of the degradation of the first field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    const RunConfig config = effective_config(common, f);
    if (common.dump_config) {
      std::cout << nlohmann::json(config).dump(2) << '\n';
      return cli::kExitOk;
    }
    if (stitch->parsed()) return cli::cmd_stitch(config);
    if (prep->parsed()) return cli::cmd_prep(config);
    if (analyze->parsed()) return cli::cmd_analyze(config, f.masks);
    if (evaluate->parsed()) return cli::cmd_evaluate(config);
    if (robustness->parsed()) return cli::cmd_robustness(config);
    if (synth->parsed()) return cli::cmd_synth(config);
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const cli::ApiError& e) {
    std::cerr << "error: " << e.status_name() << ": " << e.what() << '\n';
    return e.status() == GS_ERR_INVALID_ARGUMENT ? cli::kExitUsage : cli::kExitPartial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitPartial;
  }
  return cli::kExitUsage;
}
