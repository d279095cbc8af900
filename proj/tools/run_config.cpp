#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "grainsize/grainsize.h"

namespace cli {
namespace {

using nlohmann::json;
using Setter = std::function<void(const json&)>;

template <typename T>
Setter bind(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

template <typename T>
Setter bind(std::optional<T>& field) {
  return [&field](const json& v) {
    if (v.is_null()) {
      field.reset();
    } else {
      field = v.get<T>();
    }
  };
}

void apply(const json& j, const std::string& where, const std::map<std::string, Setter>& fields) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw UsageError("unknown config key " + where + "." + key);
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw UsageError("config key " + where + "." + key + ": " + e.what());
    }
  }
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  gs_prep_config prep;
  gs_prep_config_default(&prep);
  c.prep = {prep.threshold, prep.erosion_radius, prep.min_area, prep.connectivity};
  gs_stitch_plan plan;
  gs_stitch_plan_default(&plan);
  c.stitch.rows = plan.rows;
  c.stitch.cols = plan.cols;
  c.stitch.patch_width = plan.patch_width;
  c.stitch.patch_height = plan.patch_height;
  c.stitch.filename_pattern = plan.filename_pattern;
  c.stitch.relabel_masks = plan.relabel_masks != 0;
  gs_eval_config eval;
  gs_eval_config_default(&eval);
  c.calibration = eval.pixels_per_micron;
  c.target_grains = eval.target;
  c.eval.boundary_tolerance = eval.boundary_tolerance;
  for (int k = 0; k < 10; ++k) c.eval.iou_thresholds.push_back(0.5 + 0.05 * k);
  gs_synth_spec synth;
  gs_synth_spec_default(&synth);
  c.synth.width = synth.width;
  c.synth.height = synth.height;
  c.synth.n_seeds = synth.n_seeds;
  c.synth.rng_seed = synth.rng_seed;
  c.synth.boundary_thickness = synth.boundary_thickness;
  return c;
}

void RunConfig::validate() const {
  if (!(calibration > 0.0) || !std::isfinite(calibration)) throw UsageError("calibration must be positive");
  if (target_grains < 1) throw UsageError("target must be at least 1");
  if (circle_mode != "gt-derived" && circle_mode != "gt-free") {
    throw UsageError("mode must be gt-derived or gt-free, got " + circle_mode);
  }
  if (jobs < 1) throw UsageError("jobs must be at least 1");
  if (io.format != "json" && io.format != "csv") throw UsageError("format must be csv or json");
  if (eval.iou_thresholds.empty()) throw UsageError("eval.iou_thresholds must not be empty");
  for (const int t : robustness.targets) {
    if (t < 1) throw UsageError("robustness targets must be at least 1");
  }
  for (const auto& m : robustness.modes) {
    if (m != "gt-derived" && m != "gt-free") throw UsageError("unknown robustness mode " + m);
  }
  if (synth.count < 1) throw UsageError("synth.count must be at least 1");
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"calibration", c.calibration},
           {"target_grains", c.target_grains},
           {"circle_mode", c.circle_mode},
           {"jobs", c.jobs},
           {"prep",
            {{"threshold", c.prep.threshold},
             {"erosion_radius", c.prep.erosion_radius},
             {"min_area", c.prep.min_area},
             {"connectivity", c.prep.connectivity}}},
           {"stitch",
            {{"rows", c.stitch.rows},
             {"cols", c.stitch.cols},
             {"patch_width", c.stitch.patch_width},
             {"patch_height", c.stitch.patch_height},
             {"filename_pattern", c.stitch.filename_pattern},
             {"mask_pattern", opt(c.stitch.mask_pattern)},
             {"relabel_masks", c.stitch.relabel_masks}}},
           {"eval", {{"boundary_tolerance", c.eval.boundary_tolerance}, {"iou_thresholds", c.eval.iou_thresholds}}},
           {"robustness", {{"targets", c.robustness.targets}, {"modes", c.robustness.modes}}},
           {"synth",
            {{"width", c.synth.width},
             {"height", c.synth.height},
             {"n_seeds", c.synth.n_seeds},
             {"rng_seed", c.synth.rng_seed},
             {"boundary_thickness", c.synth.boundary_thickness},
             {"count", c.synth.count},
             {"merge_fraction", c.synth.merge_fraction},
             {"split_fraction", c.synth.split_fraction},
             {"degrade_seed", c.synth.degrade_seed}}},
           {"io",
            {{"input", opt(c.io.input)},
             {"output", opt(c.io.output)},
             {"gt", opt(c.io.gt)},
             {"pred", opt(c.io.pred)},
             {"overlay_dir", opt(c.io.overlay_dir)},
             {"micrograph_dir", opt(c.io.micrograph_dir)},
             {"report_dir", opt(c.io.report_dir)},
             {"format", c.io.format}}}};
}

void merge_json(RunConfig& c, const json& j) {
  apply(j, "config",
        {{"calibration", bind(c.calibration)},
         {"target_grains", bind(c.target_grains)},
         {"circle_mode", bind(c.circle_mode)},
         {"jobs", bind(c.jobs)},
         {"prep",
          [&](const json& v) {
            apply(v, "prep",
                  {{"threshold", bind(c.prep.threshold)},
                   {"erosion_radius", bind(c.prep.erosion_radius)},
                   {"min_area", bind(c.prep.min_area)},
                   {"connectivity", bind(c.prep.connectivity)}});
          }},
         {"stitch",
          [&](const json& v) {
            apply(v, "stitch",
                  {{"rows", bind(c.stitch.rows)},
                   {"cols", bind(c.stitch.cols)},
                   {"patch_width", bind(c.stitch.patch_width)},
                   {"patch_height", bind(c.stitch.patch_height)},
                   {"filename_pattern", bind(c.stitch.filename_pattern)},
                   {"mask_pattern", bind(c.stitch.mask_pattern)},
                   {"relabel_masks", bind(c.stitch.relabel_masks)}});
          }},
         {"eval",
          [&](const json& v) {
            apply(v, "eval",
                  {{"boundary_tolerance", bind(c.eval.boundary_tolerance)},
                   {"iou_thresholds", bind(c.eval.iou_thresholds)}});
          }},
         {"robustness",
          [&](const json& v) {
            apply(v, "robustness", {{"targets", bind(c.robustness.targets)}, {"modes", bind(c.robustness.modes)}});
          }},
         {"synth",
          [&](const json& v) {
            apply(v, "synth",
                  {{"width", bind(c.synth.width)},
                   {"height", bind(c.synth.height)},
                   {"n_seeds", bind(c.synth.n_seeds)},
                   {"rng_seed", bind(c.synth.rng_seed)},
                   {"boundary_thickness", bind(c.synth.boundary_thickness)},
                   {"count", bind(c.synth.count)},
                   {"merge_fraction", bind(c.synth.merge_fraction)},
                   {"split_fraction", bind(c.synth.split_fraction)},
                   {"degrade_seed", bind(c.synth.degrade_seed)}});
          }},
         {"io", [&](const json& v) {
            apply(v, "io",
                  {{"input", bind(c.io.input)},
                   {"output", bind(c.io.output)},
                   {"gt", bind(c.io.gt)},
                   {"pred", bind(c.io.pred)},
                   {"overlay_dir", bind(c.io.overlay_dir)},
                   {"micrograph_dir", bind(c.io.micrograph_dir)},
                   {"report_dir", bind(c.io.report_dir)},
                   {"format", bind(c.io.format)}});
          }}});
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig c = RunConfig::defaults();
  merge_json(c, j);
  return c;
}

}  // namespace cli
