#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "handles.hpp"
#include "report.hpp"
#include "worker_pool.hpp"

namespace cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Failure {
  std::string status;
  std::string message;
};

Failure capture(const std::exception& e) {
  if (const auto* api = dynamic_cast<const ApiError*>(&e)) return {api->status_name(), api->what()};
  return {"error", e.what()};
}

json to_json(const Failure& f) { return {{"status", f.status}, {"error", f.message}}; }

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

const std::string& require_path(const std::optional<std::string>& value, const char* flag) {
  if (!value || value->empty()) throw UsageError(std::string("missing required ") + flag);
  return *value;
}

gs_circle_mode mode_of(const std::string& text) {
  return text == "gt-free" ? GS_MODE_GT_FREE : GS_MODE_GT_DERIVED;
}

const char* mode_name(gs_circle_mode mode) { return mode == GS_MODE_GT_FREE ? "gt-free" : "gt-derived"; }

bool below_astm_minimum(const RunConfig& config) { return config.target_grains < 50; }

void announce_astm_warning(const RunConfig& config) {
  if (below_astm_minimum(config)) std::cerr << "astm_warning: " << kAstmWarning << '\n';
}

/// Prints the report in the configured format and, with io.report_dir, stores both forms.
void publish(const RunConfig& config, const std::string& name, const json& doc, const CsvTable& table) {
  const std::string text_json = doc.dump(2) + "\n";
  const std::string text_csv = table.str();
  std::cout << (config.io.format == "csv" ? text_csv : text_json);
  if (config.io.report_dir) {
    const fs::path dir(*config.io.report_dir);
    fs::create_directories(dir);
    write_file_atomic(dir / (name + ".json"), text_json);
    write_file_atomic(dir / (name + ".csv"), text_csv);
  }
}

json circle_json(const gs_circle& c) {
  return {{"cx", c.cx}, {"cy", c.cy}, {"radius", c.radius}, {"area_mm2", json_number(c.physical_area_mm2)}};
}

json jeffries_json(const gs_jeffries_result& r) {
  return {{"n_inside", r.n_inside},         {"n_intercepted", r.n_intercepted}, {"f", json_number(r.f)},
          {"n_a", json_number(r.n_a)},      {"g", json_number(r.g)},           {"circle", circle_json(r.circle)}};
}

std::optional<fs::path> find_by_stem(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".tif", ".tiff", ".PNG", ".TIF", ".TIFF"}) {
    const fs::path candidate = dir / (stem + ext);
    if (fs::is_regular_file(candidate)) return candidate;
  }
  return std::nullopt;
}

void render(const gs_mask* mask, const gs_circle& circle, const std::optional<fs::path>& micrograph,
            const fs::path& out) {
  ImagePtr base;
  if (micrograph) base = read_image(micrograph->string());
  check(gs_render_overlay(base.get(), mask, &circle, nullptr, out.string().c_str()));
}

// ---- pairing gt/pred directories ----

struct PairSource {
  std::string name;
  fs::path gt;
  fs::path pred;
};

struct Pairing {
  std::vector<PairSource> pairs;
  std::vector<std::string> unmatched;
  std::vector<std::pair<std::string, Failure>> errors;
};

Pairing pair_directories(const fs::path& gt_dir, const fs::path& pred_dir) {
  auto index = [](const fs::path& dir, std::map<std::string, std::vector<fs::path>>& out) {
    for (const auto& p : list_images(dir)) out[p.stem().string()].push_back(p);
  };
  std::map<std::string, std::vector<fs::path>> gt;
  std::map<std::string, std::vector<fs::path>> pred;
  index(gt_dir, gt);
  index(pred_dir, pred);
  Pairing out;
  for (const auto& [stem, files] : gt) {
    const auto it = pred.find(stem);
    if (it == pred.end()) {
      out.unmatched.push_back("gt/" + files.front().filename().string());
      warn("no prediction for " + files.front().filename().string() + "; pair skipped");
      continue;
    }
    if (files.size() > 1 || it->second.size() > 1) {
      out.errors.push_back({stem, {"invalid argument", "several files share the name " + stem}});
      continue;
    }
    out.pairs.push_back({files.front().filename().string(), files.front(), it->second.front()});
  }
  for (const auto& [stem, files] : pred) {
    if (!gt.count(stem)) {
      out.unmatched.push_back("pred/" + files.front().filename().string());
      warn("no ground truth for " + files.front().filename().string() + "; pair skipped");
    }
  }
  return out;
}

json errors_json(const std::vector<std::pair<std::string, Failure>>& errors) {
  json out = json::array();
  for (const auto& [name, f] : errors) {
    json e = to_json(f);
    e["file"] = name;
    out.push_back(e);
  }
  return out;
}

}  // namespace

// ---- stitch ----

int cmd_stitch(const RunConfig& config) {
  const std::string& input = require_path(config.io.input, "--input");
  const std::string& output = require_path(config.io.output, "--output");
  gs_stitch_plan plan;
  gs_stitch_plan_default(&plan);
  plan.rows = config.stitch.rows;
  plan.cols = config.stitch.cols;
  plan.patch_width = config.stitch.patch_width;
  plan.patch_height = config.stitch.patch_height;
  plan.filename_pattern = config.stitch.filename_pattern.c_str();
  plan.mask_pattern = config.stitch.mask_pattern ? config.stitch.mask_pattern->c_str() : nullptr;
  plan.relabel_masks = config.stitch.relabel_masks ? 1 : 0;

  gs_stitch_summary* raw = nullptr;
  check(gs_stitch_dataset(input.c_str(), &plan, output.c_str(), config.jobs, &raw));
  const SummaryPtr summary(raw);

  json doc{{"groups", gs_stitch_summary_group_count(raw)},
           {"stitched", json::array()},
           {"skipped", json::array()},
           {"errors", json::array()}};
  for (size_t i = 0; i < gs_stitch_summary_group_count(raw); ++i) {
    doc["stitched"].push_back(gs_stitch_summary_group(raw, i));
  }
  for (size_t i = 0; i < gs_stitch_summary_skipped_count(raw); ++i) {
    const std::string group = gs_stitch_summary_skipped_group(raw, i);
    const std::string reason = gs_stitch_summary_skipped_reason(raw, i);
    warn("group " + group + " skipped: " + reason);
    doc["skipped"].push_back({{"group", group}, {"reason", reason}});
  }
  for (size_t i = 0; i < gs_stitch_summary_error_count(raw); ++i) {
    doc["errors"].push_back(gs_stitch_summary_error(raw, i));
  }
  std::cout << doc.dump(2) << '\n';
  return gs_stitch_summary_error_count(raw) == 0 ? kExitOk : kExitPartial;
}

// ---- prep ----

int cmd_prep(const RunConfig& config) {
  const fs::path input(require_path(config.io.input, "--input"));
  const fs::path output(require_path(config.io.output, "--output"));
  const std::vector<fs::path> files = fs::is_directory(input) ? list_images(input) : std::vector<fs::path>{input};
  fs::create_directories(output);
  const gs_prep_config prep{config.prep.threshold, config.prep.erosion_radius, config.prep.min_area,
                            config.prep.connectivity};

  struct Outcome {
    fs::path written;
    size_t instances = 0;
    std::optional<Failure> failure;
  };
  std::vector<Outcome> outcomes(files.size());
  for_each_index(files.size(), config.jobs, [&](size_t i) {
    try {
      const ImagePtr raw = read_image(files[i].string());
      gs_mask* m = nullptr;
      check(gs_prepare_mask(raw.get(), &prep, &m));
      const MaskPtr mask(m);
      const fs::path out = output / (files[i].stem().string() + ".tif");
      check(gs_mask_write(mask.get(), out.string().c_str()));
      outcomes[i].written = out;
      outcomes[i].instances = gs_mask_instance_count(mask.get());
    } catch (const std::exception& e) {
      outcomes[i].failure = capture(e);
    }
  });

  json doc{{"succeeded", json::array()}, {"failed", json::array()}};
  bool any_failed = false;
  for (size_t i = 0; i < files.size(); ++i) {
    if (outcomes[i].failure) {
      any_failed = true;
      json f = to_json(*outcomes[i].failure);
      f["input"] = files[i].string();
      doc["failed"].push_back(f);
    } else {
      doc["succeeded"].push_back(
          {{"input", files[i].string()}, {"output", outcomes[i].written.string()}, {"instances", outcomes[i].instances}});
    }
  }
  std::cout << doc.dump(2) << '\n';
  return any_failed ? kExitPartial : kExitOk;
}

// ---- analyze ----

int cmd_analyze(const RunConfig& config, const std::vector<std::string>& inputs) {
  std::vector<std::string> sources = inputs;
  if (sources.empty() && config.io.input) sources.push_back(*config.io.input);
  if (sources.empty()) throw UsageError("no input masks given");
  std::vector<fs::path> files;
  for (const auto& s : sources) {
    if (fs::is_directory(s)) {
      const auto listed = list_images(s);
      files.insert(files.end(), listed.begin(), listed.end());
    } else {
      files.emplace_back(s);
    }
  }
  std::stable_sort(files.begin(), files.end(),
                   [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (config.io.overlay_dir) fs::create_directories(*config.io.overlay_dir);
  announce_astm_warning(config);

  struct Outcome {
    gs_jeffries_result result{};
    std::optional<Failure> failure;
  };
  std::vector<Outcome> outcomes(files.size());
  for_each_index(files.size(), config.jobs, [&](size_t i) {
    try {
      const MaskPtr mask = read_mask(files[i].string());
      check(gs_analyze(mask.get(), config.calibration, config.target_grains, nullptr, &outcomes[i].result));
      if (config.io.overlay_dir) {
        const std::string stem = files[i].stem().string();
        std::optional<fs::path> micrograph;
        if (config.io.micrograph_dir) {
          micrograph = find_by_stem(*config.io.micrograph_dir, stem);
          if (!micrograph) warn("no micrograph for " + stem + "; overlay drawn on the mask alone");
        }
        render(mask.get(), outcomes[i].result.circle, micrograph,
               fs::path(*config.io.overlay_dir) / (stem + "_overlay.png"));
      }
    } catch (const std::exception& e) {
      outcomes[i].failure = capture(e);
    }
  });

  json doc{{"calibration", config.calibration}, {"target_grains", config.target_grains}};
  if (below_astm_minimum(config)) doc["astm_warning"] = kAstmWarning;
  doc["images"] = json::array();
  std::vector<std::string> header{"file", "n_inside", "n_intercepted", "f", "n_a", "g",
                                  "cx", "cy", "radius", "area_mm2", "status", "error"};
  if (below_astm_minimum(config)) header.push_back("astm_warning");
  CsvTable table(header);
  size_t failed = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    std::vector<std::string> row{name};
    if (const auto& f = outcomes[i].failure) {
      ++failed;
      warn(name + ": " + f->message);
      json entry = to_json(*f);
      entry["file"] = name;
      doc["images"].push_back(entry);
      row.insert(row.end(), 9, "");
      row.push_back(f->status);
      row.push_back(f->message);
    } else {
      const auto& r = outcomes[i].result;
      json entry = jeffries_json(r);
      entry["file"] = name;
      doc["images"].push_back(entry);
      row.insert(row.end(), {std::to_string(r.n_inside), std::to_string(r.n_intercepted), csv_number(r.f),
                             csv_number(r.n_a), csv_number(r.g), csv_number(r.circle.cx), csv_number(r.circle.cy),
                             csv_number(r.circle.radius), csv_number(r.circle.physical_area_mm2), "ok", ""});
    }
    if (below_astm_minimum(config)) row.push_back(kAstmWarning);
    table.add(row);
  }
  doc["failed"] = failed;
  publish(config, "analyze", doc, table);
  return !files.empty() && failed == files.size() ? kExitPartial : kExitOk;
}

// ---- evaluate ----

int cmd_evaluate(const RunConfig& config) {
  const fs::path gt_dir(require_path(config.io.gt, "--gt"));
  const fs::path pred_dir(require_path(config.io.pred, "--pred"));
  Pairing pairing = pair_directories(gt_dir, pred_dir);
  if (config.io.overlay_dir) fs::create_directories(*config.io.overlay_dir);
  announce_astm_warning(config);

  gs_eval_config eval;
  gs_eval_config_default(&eval);
  eval.pixels_per_micron = config.calibration;
  eval.target = config.target_grains;
  eval.mode = mode_of(config.circle_mode);
  eval.boundary_tolerance = config.eval.boundary_tolerance;
  eval.iou_thresholds = config.eval.iou_thresholds.data();
  eval.iou_threshold_count = config.eval.iou_thresholds.size();

  struct Outcome {
    gs_pair_record record{};
    std::optional<Failure> failure;
  };
  std::vector<Outcome> outcomes(pairing.pairs.size());
  for_each_index(pairing.pairs.size(), config.jobs, [&](size_t i) {
    const PairSource& src = pairing.pairs[i];
    try {
      const MaskPtr gt = read_mask(src.gt.string());
      const MaskPtr pred = read_mask(src.pred.string());
      check(gs_evaluate_pair(gt.get(), pred.get(), &eval, &outcomes[i].record));
      if (config.io.overlay_dir) {
        const fs::path dir(*config.io.overlay_dir);
        const std::string stem = src.gt.stem().string();
        render(gt.get(), outcomes[i].record.gt.circle, std::nullopt, dir / (stem + "_gt_overlay.png"));
        render(pred.get(), outcomes[i].record.pred.circle, std::nullopt, dir / (stem + "_pred_overlay.png"));
      }
    } catch (const std::exception& e) {
      outcomes[i].failure = capture(e);
    }
  });

  std::vector<gs_pair_record> records;
  json pairs = json::array();
  CsvTable table({"file", "mode", "ap50", "map_50_95", "boundary_f1", "count_error", "gt_instances",
                  "pred_instances", "gt_n_inside", "gt_n_intercepted", "gt_n_a", "gt_g", "pred_n_inside",
                  "pred_n_intercepted", "pred_n_a", "pred_g", "n_inside_mape", "n_intercepted_mape", "n_a_mape",
                  "g_mape"});
  const std::string mode = mode_name(eval.mode);
  for (size_t i = 0; i < pairing.pairs.size(); ++i) {
    const std::string& name = pairing.pairs[i].name;
    if (outcomes[i].failure) {
      warn(name + ": " + outcomes[i].failure->message);
      pairing.errors.push_back({name, *outcomes[i].failure});
      continue;
    }
    const gs_pair_record& r = outcomes[i].record;
    records.push_back(r);
    pairs.push_back({{"file", name},
                     {"ap50", r.ap50},
                     {"map_50_95", r.map_50_95},
                     {"boundary_f1", r.boundary_f1},
                     {"count_error", r.count_error},
                     {"gt_instances", r.gt_instances},
                     {"pred_instances", r.pred_instances},
                     {"gt", jeffries_json(r.gt)},
                     {"pred", jeffries_json(r.pred)},
                     {"n_inside_mape", json_number(r.ape_n_inside)},
                     {"n_intercepted_mape", json_number(r.ape_n_intercepted)},
                     {"n_a_mape", json_number(r.ape_n_a)},
                     {"g_mape", json_number(r.ape_g)}});
    table.add({name, mode, csv_number(r.ap50), csv_number(r.map_50_95), csv_number(r.boundary_f1),
               std::to_string(r.count_error), std::to_string(r.gt_instances), std::to_string(r.pred_instances),
               std::to_string(r.gt.n_inside), std::to_string(r.gt.n_intercepted), csv_number(r.gt.n_a),
               csv_number(r.gt.g), std::to_string(r.pred.n_inside), std::to_string(r.pred.n_intercepted),
               csv_number(r.pred.n_a), csv_number(r.pred.g), csv_number(r.ape_n_inside),
               csv_number(r.ape_n_intercepted), csv_number(r.ape_n_a), csv_number(r.ape_g)});
  }

  gs_eval_aggregate agg{};
  check(gs_aggregate(records.data(), records.size(), &agg));
  table.add({"MEAN", mode, csv_number(agg.ap50), csv_number(agg.map_50_95), csv_number(agg.boundary_f1),
             csv_number(agg.count_error), "", "", csv_number(agg.gt_n_inside), csv_number(agg.gt_n_intercepted),
             csv_number(agg.gt_n_a), csv_number(agg.gt_g), csv_number(agg.pred_n_inside),
             csv_number(agg.pred_n_intercepted), csv_number(agg.pred_n_a), csv_number(agg.pred_g),
             csv_number(agg.n_inside_mape), csv_number(agg.n_intercepted_mape), csv_number(agg.n_a_mape),
             csv_number(agg.g_mape)});

  json doc{{"config",
            {{"calibration", config.calibration},
             {"target_grains", config.target_grains},
             {"circle_mode", mode},
             {"boundary_tolerance", config.eval.boundary_tolerance},
             {"iou_thresholds", config.eval.iou_thresholds}}}};
  if (below_astm_minimum(config)) doc["astm_warning"] = kAstmWarning;
  doc["pairs"] = pairs;
  doc["aggregate"] = {{"images", agg.images},
                      {"ap50", json_number(agg.ap50)},
                      {"map_50_95", json_number(agg.map_50_95)},
                      {"boundary_f1", json_number(agg.boundary_f1)},
                      {"count_error", json_number(agg.count_error)},
                      {"gt_n_inside", json_number(agg.gt_n_inside)},
                      {"gt_n_intercepted", json_number(agg.gt_n_intercepted)},
                      {"gt_n_a", json_number(agg.gt_n_a)},
                      {"gt_g", json_number(agg.gt_g)},
                      {"pred_n_inside", json_number(agg.pred_n_inside)},
                      {"pred_n_intercepted", json_number(agg.pred_n_intercepted)},
                      {"pred_n_a", json_number(agg.pred_n_a)},
                      {"pred_g", json_number(agg.pred_g)},
                      {"n_inside_mape", json_number(agg.n_inside_mape)},
                      {"n_intercepted_mape", json_number(agg.n_intercepted_mape)},
                      {"n_a_mape", json_number(agg.n_a_mape)},
                      {"g_mape", json_number(agg.g_mape)}};
  doc["unmatched"] = pairing.unmatched;
  doc["errors"] = errors_json(pairing.errors);
  publish(config, "evaluate", doc, table);
  if (!pairing.errors.empty()) return kExitPartial;
  return kExitOk;
}

// ---- robustness ----

int cmd_robustness(const RunConfig& config) {
  const fs::path gt_dir(require_path(config.io.gt, "--gt"));
  const fs::path pred_dir(require_path(config.io.pred, "--pred"));
  Pairing pairing = pair_directories(gt_dir, pred_dir);

  std::vector<MaskPtr> gt(pairing.pairs.size());
  std::vector<MaskPtr> pred(pairing.pairs.size());
  std::vector<std::optional<Failure>> load_failures(pairing.pairs.size());
  for_each_index(pairing.pairs.size(), config.jobs, [&](size_t i) {
    try {
      gt[i] = read_mask(pairing.pairs[i].gt.string());
      pred[i] = read_mask(pairing.pairs[i].pred.string());
    } catch (const std::exception& e) {
      load_failures[i] = capture(e);
    }
  });
  std::vector<const gs_mask*> gt_ptrs;
  std::vector<const gs_mask*> pred_ptrs;
  std::vector<const char*> names;
  for (size_t i = 0; i < pairing.pairs.size(); ++i) {
    if (load_failures[i]) {
      warn(pairing.pairs[i].name + ": " + load_failures[i]->message);
      pairing.errors.push_back({pairing.pairs[i].name, *load_failures[i]});
      continue;
    }
    gt_ptrs.push_back(gt[i].get());
    pred_ptrs.push_back(pred[i].get());
    names.push_back(pairing.pairs[i].name.c_str());
  }
  std::vector<gs_circle_mode> modes;
  for (const auto& m : config.robustness.modes) modes.push_back(mode_of(m));
  if (std::any_of(config.robustness.targets.begin(), config.robustness.targets.end(), [](int t) { return t < 50; })) {
    std::cerr << "astm_warning: " << kAstmWarning << " (targets below 50 in sweep)\n";
  }

  gs_robustness_table* raw = nullptr;
  check(gs_robustness_sweep(gt_ptrs.data(), pred_ptrs.data(), names.data(), gt_ptrs.size(), config.calibration,
                            config.robustness.targets.data(), config.robustness.targets.size(), modes.data(),
                            modes.size(), config.jobs, &raw));
  const TablePtr sweep(raw);

  json rows = json::array();
  CsvTable table({"target", "mode", "images", "gt_count", "gt_n_a", "gt_g", "pred_count", "pred_n_a", "n_a_mape",
                  "pred_g", "g_mape", "failures"});
  bool empty_cell = false;
  for (size_t i = 0; i < gs_robustness_table_row_count(raw); ++i) {
    gs_robustness_row r{};
    check(gs_robustness_table_row(raw, i, &r));
    if (r.images == 0) empty_cell = true;
    json failures = json::array();
    for (size_t k = 0; k < r.failures; ++k) {
      const char* name = nullptr;
      const char* reason = nullptr;
      check(gs_robustness_table_failure(raw, i, k, &name, &reason));
      failures.push_back({{"file", name}, {"reason", reason}});
    }
    rows.push_back({{"target", r.target},
                    {"mode", mode_name(r.mode)},
                    {"images", r.images},
                    {"gt_count", json_number(r.gt_count)},
                    {"gt_n_a", json_number(r.gt_n_a)},
                    {"gt_g", json_number(r.gt_g)},
                    {"pred_count", json_number(r.pred_count)},
                    {"pred_n_a", json_number(r.pred_n_a)},
                    {"n_a_mape", json_number(r.n_a_mape)},
                    {"pred_g", json_number(r.pred_g)},
                    {"g_mape", json_number(r.g_mape)},
                    {"failures", failures}});
    table.add({std::to_string(r.target), mode_name(r.mode), std::to_string(r.images), csv_number(r.gt_count),
               csv_number(r.gt_n_a), csv_number(r.gt_g), csv_number(r.pred_count), csv_number(r.pred_n_a),
               csv_number(r.n_a_mape), csv_number(r.pred_g), csv_number(r.g_mape), std::to_string(r.failures)});
  }
  json doc{{"calibration", config.calibration},
           {"targets", config.robustness.targets},
           {"modes", config.robustness.modes},
           {"rows", rows},
           {"unmatched", pairing.unmatched},
           {"errors", errors_json(pairing.errors)}};
  publish(config, "robustness", doc, table);
  return pairing.errors.empty() && !empty_cell ? kExitOk : kExitPartial;
}

// ---- synth ----

int cmd_synth(const RunConfig& config) {
  const fs::path out(require_path(config.io.output, "--output"));
  const SynthSection& s = config.synth;
  const bool degraded = s.merge_fraction > 0.0 || s.split_fraction > 0.0;
  for (const char* sub : {"gt", "pred", "edges"}) fs::create_directories(out / sub);

  gs_synth_spec base{s.width, s.height, s.n_seeds, s.rng_seed, s.boundary_thickness};
  double density = 0.0;
  check(gs_synth_true_density(&base, config.calibration, &density));

  const int digits = std::max<int>(3, static_cast<int>(std::to_string(s.count - 1).size()));
  struct Outcome {
    std::string name;
    size_t gt_instances = 0;
    size_t pred_instances = 0;
    std::optional<Failure> failure;
  };
  std::vector<Outcome> outcomes(static_cast<size_t>(s.count));
  for_each_index(outcomes.size(), config.jobs, [&](size_t i) {
    Outcome& o = outcomes[i];
    char name[32];
    std::snprintf(name, sizeof name, "field_%0*zu", digits, i);
    o.name = name;
    try {
      gs_synth_spec spec = base;
      spec.rng_seed = s.rng_seed + i;
      gs_mask* labels = nullptr;
      gs_image* edges = nullptr;
      check(gs_synth_generate(&spec, &labels, &edges));
      const MaskPtr gt(labels);
      const ImagePtr edge_image(edges);
      MaskPtr pred;
      if (degraded) {
        const gs_degradation d{s.merge_fraction, s.split_fraction, s.degrade_seed + i};
        gs_mask* m = nullptr;
        check(gs_degrade(gt.get(), &d, &m));
        pred.reset(m);
      }
      const gs_mask* pred_mask = pred ? pred.get() : gt.get();
      const std::string file = o.name + ".tif";
      check(gs_mask_write(gt.get(), (out / "gt" / file).string().c_str()));
      check(gs_mask_write(pred_mask, (out / "pred" / file).string().c_str()));
      check(gs_image_write_png(edge_image.get(), (out / "edges" / (o.name + ".png")).string().c_str()));
      o.gt_instances = gs_mask_instance_count(gt.get());
      o.pred_instances = gs_mask_instance_count(pred_mask);
    } catch (const std::exception& e) {
      o.failure = capture(e);
    }
  });

  json fields = json::array();
  bool any_failed = false;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    json f{{"name", o.name}, {"rng_seed", s.rng_seed + i}};
    if (o.failure) {
      any_failed = true;
      warn(o.name + ": " + o.failure->message);
      f["error"] = o.failure->message;
    } else {
      f["gt"] = "gt/" + o.name + ".tif";
      f["pred"] = "pred/" + o.name + ".tif";
      f["edges"] = "edges/" + o.name + ".png";
      f["gt_instances"] = o.gt_instances;
      f["pred_instances"] = o.pred_instances;
      if (degraded) f["degrade_seed"] = s.degrade_seed + i;
    }
    fields.push_back(f);
  }
  json manifest{{"calibration", config.calibration},
                {"spec",
                 {{"width", s.width},
                  {"height", s.height},
                  {"n_seeds", s.n_seeds},
                  {"rng_seed", s.rng_seed},
                  {"boundary_thickness", s.boundary_thickness},
                  {"count", s.count}}},
                {"degradation", degraded ? json{{"merge_fraction", s.merge_fraction},
                                                {"split_fraction", s.split_fraction},
                                                {"rng_seed", s.degrade_seed}}
                                         : json(nullptr)},
                {"true_density", density},
                {"fields", fields}};
  const std::string text = manifest.dump(2) + "\n";
  write_file_atomic(out / "manifest.json", text);
  std::cout << text;
  return any_failed ? kExitPartial : kExitOk;
}

}  // namespace cli
