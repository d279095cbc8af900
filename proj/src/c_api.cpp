#include "grainsize/grainsize.h"

#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "grainsize/error.hpp"
#include "grainsize/jeffries.hpp"
#include "grainsize/mask_io.hpp"
#include "grainsize/mask_prep.hpp"
#include "grainsize/overlay.hpp"
#include "grainsize/seg_eval.hpp"
#include "grainsize/stitcher.hpp"
#include "grainsize/synth.hpp"

struct gs_mask {
  grainsize::LabelMask mask;
};

struct gs_image {
  grainsize::GrayImage image;
};

struct gs_stitch_summary {
  grainsize::StitchSummary summary;
};

struct gs_robustness_table {
  std::vector<grainsize::RobustnessRow> rows;
};

namespace {

using namespace grainsize;

thread_local std::string g_last_error;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Fn>
gs_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return GS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<gs_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GS_ERR_INTERNAL;
  }
}

void require(bool condition, const char* what) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, what);
}

CircleMode from_c(gs_circle_mode mode) {
  switch (mode) {
    case GS_MODE_GT_DERIVED: return CircleMode::GtDerived;
    case GS_MODE_GT_FREE: return CircleMode::GtFree;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown circle mode");
}

gs_circle_mode to_c(CircleMode mode) {
  return mode == CircleMode::GtFree ? GS_MODE_GT_FREE : GS_MODE_GT_DERIVED;
}

gs_circle to_c(const TestCircle& c) { return {c.center.x, c.center.y, c.radius, c.physical_area_mm2}; }

TestCircle from_c(const gs_circle& c) {
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
    throw Error(ErrorCode::InvalidArgument, "circle radius must be positive and finite");
  }
  if (!(c.physical_area_mm2 > 0.0) || !std::isfinite(c.physical_area_mm2)) {
    throw Error(ErrorCode::InvalidArgument, "circle area must be positive and finite");
  }
  return {{c.cx, c.cy}, c.radius, c.physical_area_mm2};
}

gs_jeffries_result to_c(const JeffriesResult& r) {
  return {r.n_inside, r.n_intercepted, r.f, r.n_a, r.g, to_c(r.circle)};
}

JeffriesResult from_c(const gs_jeffries_result& r) {
  JeffriesResult out;
  out.n_inside = r.n_inside;
  out.n_intercepted = r.n_intercepted;
  out.f = r.f;
  out.n_a = r.n_a;
  out.g = r.g;
  out.circle = {{r.circle.cx, r.circle.cy}, r.circle.radius, r.circle.physical_area_mm2};
  return out;
}

double or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

std::optional<double> from_nan(double v) {
  if (std::isnan(v)) return std::nullopt;
  return v;
}

Rgb rgb(const std::uint8_t (&c)[3]) { return {c[0], c[1], c[2]}; }

void put_rgb(std::uint8_t (&dst)[3], const Rgb& c) {
  dst[0] = c.r;
  dst[1] = c.g;
  dst[2] = c.b;
}

}  // namespace

extern "C" {

const char* gs_version(void) { return GRAINSIZE_VERSION; }

const char* gs_last_error(void) { return g_last_error.c_str(); }

const char* gs_status_string(gs_status status) {
  if (status == GS_OK) return "ok";
  if (status == GS_ERR_INTERNAL) return "internal error";
  if (status >= GS_ERR_INVALID_ARGUMENT && status <= GS_ERR_ZERO_GROUND_TRUTH) {
    return to_string(static_cast<ErrorCode>(status));
  }
  return "unknown status";
}

/* ---- masks ---- */

gs_status gs_mask_create(int width, int height, const uint16_t* labels, gs_mask** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(labels != nullptr || static_cast<long long>(width) * height == 0, "labels must not be NULL");
    require(width >= 0 && height >= 0, "dimensions must be non-negative");
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<LabelId> data(labels, labels + n);
    *out = new gs_mask{LabelMask(width, height, std::move(data))};
  });
}

gs_status gs_mask_read(const char* path, gs_mask** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = new gs_mask{read_label_mask(path)};
  });
}

gs_status gs_mask_write(const gs_mask* mask, const char* path) {
  return guarded([&] {
    require(mask != nullptr && path != nullptr, "mask and path must not be NULL");
    write_label_mask(mask->mask, path);
  });
}

void gs_mask_free(gs_mask* mask) { delete mask; }
int gs_mask_width(const gs_mask* mask) { return mask ? mask->mask.width() : 0; }
int gs_mask_height(const gs_mask* mask) { return mask ? mask->mask.height() : 0; }
const uint16_t* gs_mask_data(const gs_mask* mask) { return mask ? mask->mask.pixels().data() : nullptr; }
size_t gs_mask_instance_count(const gs_mask* mask) { return mask ? instance_count(mask->mask) : 0; }

/* ---- images ---- */

gs_status gs_image_read(const char* path, gs_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = new gs_image{read_gray_image(path)};
  });
}

gs_status gs_image_write_png(const gs_image* image, const char* path) {
  return guarded([&] {
    require(image != nullptr && path != nullptr, "image and path must not be NULL");
    write_gray_png(image->image, path);
  });
}

void gs_image_free(gs_image* image) { delete image; }
int gs_image_width(const gs_image* image) { return image ? image->image.width() : 0; }
int gs_image_height(const gs_image* image) { return image ? image->image.height() : 0; }
const uint8_t* gs_image_data(const gs_image* image) { return image ? image->image.pixels().data() : nullptr; }

/* ---- prep ---- */

void gs_prep_config_default(gs_prep_config* config) {
  if (!config) return;
  const PrepConfig d;
  *config = {d.threshold, d.erosion_radius, d.min_area, static_cast<int>(d.connectivity)};
}

gs_status gs_prepare_mask(const gs_image* raw, const gs_prep_config* config, gs_mask** out) {
  return guarded([&] {
    require(raw != nullptr && out != nullptr, "raw and out must not be NULL");
    PrepConfig cfg;
    if (config) {
      cfg.threshold = config->threshold;
      cfg.erosion_radius = config->erosion_radius;
      cfg.min_area = config->min_area;
      require(config->connectivity == 4 || config->connectivity == 8, "connectivity must be 4 or 8");
      cfg.connectivity = config->connectivity == 8 ? Connectivity::Eight : Connectivity::Four;
    }
    *out = new gs_mask{prepare_mask(raw->image, cfg)};
  });
}

/* ---- stitching ---- */

void gs_stitch_plan_default(gs_stitch_plan* plan) {
  if (!plan) return;
  const StitchPlan d;
  *plan = {d.rows, d.cols, d.patch_width, d.patch_height, kDefaultPatchPattern, nullptr, d.relabel_masks ? 1 : 0};
}

gs_status gs_stitch_dataset(const char* input_dir, const gs_stitch_plan* plan, const char* output_dir, int jobs,
                            gs_stitch_summary** out) {
  return guarded([&] {
    require(input_dir != nullptr && output_dir != nullptr && out != nullptr,
            "input_dir, output_dir and out must not be NULL");
    StitchPlan p;
    if (plan) {
      p.rows = plan->rows;
      p.cols = plan->cols;
      p.patch_width = plan->patch_width;
      p.patch_height = plan->patch_height;
      if (plan->filename_pattern) p.filename_pattern = plan->filename_pattern;
      if (plan->mask_pattern) p.mask_pattern = plan->mask_pattern;
      p.relabel_masks = plan->relabel_masks != 0;
    }
    *out = new gs_stitch_summary{stitch_dataset(input_dir, p, output_dir, jobs)};
  });
}

size_t gs_stitch_summary_group_count(const gs_stitch_summary* s) { return s ? s->summary.groups.size() : 0; }

const char* gs_stitch_summary_group(const gs_stitch_summary* s, size_t index) {
  if (!s || index >= s->summary.groups.size()) return nullptr;
  return s->summary.groups[index].c_str();
}

size_t gs_stitch_summary_skipped_count(const gs_stitch_summary* s) { return s ? s->summary.skipped.size() : 0; }

const char* gs_stitch_summary_skipped_group(const gs_stitch_summary* s, size_t index) {
  if (!s || index >= s->summary.skipped.size()) return nullptr;
  return s->summary.skipped[index].group_id.c_str();
}

const char* gs_stitch_summary_skipped_reason(const gs_stitch_summary* s, size_t index) {
  if (!s || index >= s->summary.skipped.size()) return nullptr;
  return s->summary.skipped[index].reason.c_str();
}

size_t gs_stitch_summary_error_count(const gs_stitch_summary* s) { return s ? s->summary.errors.size() : 0; }

const char* gs_stitch_summary_error(const gs_stitch_summary* s, size_t index) {
  if (!s || index >= s->summary.errors.size()) return nullptr;
  return s->summary.errors[index].c_str();
}

void gs_stitch_summary_free(gs_stitch_summary* summary) { delete summary; }

/* ---- Jeffries ---- */

gs_status gs_physical_area(double radius_px, double pixels_per_micron, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = physical_area(radius_px, Calibration(pixels_per_micron));
  });
}

gs_status gs_multiplier_dynamic(double area_mm2, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = jeffries_multiplier(DynamicArea{area_mm2});
  });
}

gs_status gs_multiplier_magnification(double magnification, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = jeffries_multiplier(Magnification{magnification});
  });
}

gs_status gs_grain_density(int n_inside, int n_intercepted, double f, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = grain_density(n_inside, n_intercepted, f);
  });
}

gs_status gs_astm_g(double n_a, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = astm_g(n_a);
  });
}

gs_status gs_inscribe_circle(const gs_mask* mask, double pixels_per_micron, int target, const double* center_xy,
                             gs_circle* out) {
  return guarded([&] {
    require(mask != nullptr && out != nullptr, "mask and out must not be NULL");
    std::optional<Point> center;
    if (center_xy) center = Point{center_xy[0], center_xy[1]};
    *out = to_c(inscribe_circle(mask->mask, target, Calibration(pixels_per_micron), center));
  });
}

gs_status gs_analyze(const gs_mask* mask, double pixels_per_micron, int target, const gs_circle* circle,
                     gs_jeffries_result* out) {
  return guarded([&] {
    require(mask != nullptr && out != nullptr, "mask and out must not be NULL");
    std::optional<TestCircle> used;
    if (circle) used = from_c(*circle);
    *out = to_c(analyze(mask->mask, Calibration(pixels_per_micron), target, used));
  });
}

void gs_overlay_style_default(gs_overlay_style* style) {
  if (!style) return;
  const OverlayStyle d;
  put_rgb(style->inside_rgb, d.inside_color);
  put_rgb(style->intercepted_rgb, d.intercepted_color);
  put_rgb(style->circle_rgb, d.circle_color);
  style->circle_thickness = d.circle_thickness;
}

gs_status gs_render_overlay(const gs_image* micrograph, const gs_mask* mask, const gs_circle* circle,
                            const gs_overlay_style* style, const char* path) {
  return guarded([&] {
    require(mask != nullptr && circle != nullptr && path != nullptr, "mask, circle and path must not be NULL");
    const TestCircle c = from_c(*circle);
    std::map<LabelId, GrainClass> classes;
    for (const auto& e : radial_extents(mask->mask, c.center)) classes[e.grain_id] = classify_one(e, c.radius);
    OverlayStyle s;
    if (style) {
      s.inside_color = rgb(style->inside_rgb);
      s.intercepted_color = rgb(style->intercepted_rgb);
      s.circle_color = rgb(style->circle_rgb);
      s.circle_thickness = style->circle_thickness;
    }
    std::optional<GrayImage> base;
    if (micrograph) base = micrograph->image;
    render_overlay(base, mask->mask, c, classes, s, path);
  });
}

/* ---- evaluation ---- */

void gs_eval_config_default(gs_eval_config* config) {
  if (!config) return;
  *config = {kDefaultPixelsPerMicron, kDefaultTargetGrains, GS_MODE_GT_DERIVED, 2.0, nullptr, 0};
}

gs_status gs_evaluate_pair(const gs_mask* gt, const gs_mask* pred, const gs_eval_config* config,
                           gs_pair_record* out) {
  return guarded([&] {
    require(gt != nullptr && pred != nullptr && out != nullptr, "gt, pred and out must not be NULL");
    EvalConfig cfg;
    if (config) {
      cfg.calibration = Calibration(config->pixels_per_micron);
      cfg.target = config->target;
      cfg.mode = from_c(config->mode);
      cfg.boundary_tolerance = config->boundary_tolerance;
      if (config->iou_thresholds) {
        require(config->iou_threshold_count > 0, "iou_threshold_count must be positive");
        cfg.iou_thresholds.assign(config->iou_thresholds, config->iou_thresholds + config->iou_threshold_count);
      }
    }
    const PairRecord r = evaluate_pair(gt->mask, pred->mask, cfg);
    *out = {r.ap50,
            r.map_50_95,
            r.boundary_f1,
            r.count_error,
            r.gt_instances,
            r.pred_instances,
            to_c(r.gt),
            to_c(r.pred),
            or_nan(r.ape.n_inside),
            or_nan(r.ape.n_intercepted),
            or_nan(r.ape.n_a),
            or_nan(r.ape.g)};
  });
}

gs_status gs_aggregate(const gs_pair_record* records, size_t count, gs_eval_aggregate* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(records != nullptr || count == 0, "records must not be NULL");
    std::vector<PairRecord> in(count);
    for (size_t i = 0; i < count; ++i) {
      const gs_pair_record& c = records[i];
      PairRecord& r = in[i];
      r.ap50 = c.ap50;
      r.map_50_95 = c.map_50_95;
      r.boundary_f1 = c.boundary_f1;
      r.count_error = c.count_error;
      r.gt_instances = c.gt_instances;
      r.pred_instances = c.pred_instances;
      r.gt = from_c(c.gt);
      r.pred = from_c(c.pred);
      r.ape = {from_nan(c.ape_n_inside), from_nan(c.ape_n_intercepted), from_nan(c.ape_n_a), from_nan(c.ape_g)};
    }
    const EvalAggregate a = aggregate(in);
    *out = {a.images,
            a.ap50,
            a.map_50_95,
            a.boundary_f1,
            a.count_error,
            a.gt_n_inside,
            a.gt_n_intercepted,
            a.gt_n_a,
            a.gt_g,
            a.pred_n_inside,
            a.pred_n_intercepted,
            a.pred_n_a,
            a.pred_g,
            or_nan(a.n_inside_mape),
            or_nan(a.n_intercepted_mape),
            or_nan(a.n_a_mape),
            or_nan(a.g_mape)};
  });
}

gs_status gs_mape(const double* pred, const double* gt, size_t count, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require((pred != nullptr && gt != nullptr) || count == 0, "inputs must not be NULL");
    *out = mape(std::vector<double>(pred, pred + count), std::vector<double>(gt, gt + count));
  });
}

gs_status gs_robustness_sweep(const gs_mask* const* gt, const gs_mask* const* pred, const char* const* names,
                              size_t pair_count, double pixels_per_micron, const int* targets, size_t target_count,
                              const gs_circle_mode* modes, size_t mode_count, int jobs,
                              gs_robustness_table** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require((gt != nullptr && pred != nullptr) || pair_count == 0, "mask arrays must not be NULL");
    require(targets != nullptr || target_count == 0, "targets must not be NULL");
    require(modes != nullptr || mode_count == 0, "modes must not be NULL");
    std::vector<MaskPair> pairs;
    pairs.reserve(pair_count);
    for (size_t i = 0; i < pair_count; ++i) {
      require(gt[i] != nullptr && pred[i] != nullptr, "mask entries must not be NULL");
      std::string name = names && names[i] ? names[i] : std::to_string(i);
      pairs.push_back({std::move(name), gt[i]->mask, pred[i]->mask});
    }
    std::vector<CircleMode> m;
    for (size_t i = 0; i < mode_count; ++i) m.push_back(from_c(modes[i]));
    auto rows = robustness_sweep(pairs, Calibration(pixels_per_micron),
                                 std::vector<int>(targets, targets + target_count), m, jobs);
    *out = new gs_robustness_table{std::move(rows)};
  });
}

size_t gs_robustness_table_row_count(const gs_robustness_table* table) { return table ? table->rows.size() : 0; }

gs_status gs_robustness_table_row(const gs_robustness_table* table, size_t index, gs_robustness_row* out) {
  return guarded([&] {
    require(table != nullptr && out != nullptr, "table and out must not be NULL");
    require(index < table->rows.size(), "row index out of range");
    const RobustnessRow& r = table->rows[index];
    *out = {r.target,   to_c(r.mode),   r.images,          r.gt_count, r.gt_n_a,
            r.gt_g,     r.pred_count,   r.pred_n_a,        or_nan(r.n_a_mape),
            r.pred_g,   or_nan(r.g_mape), r.failures.size()};
  });
}

gs_status gs_robustness_table_failure(const gs_robustness_table* table, size_t row, size_t index,
                                      const char** name, const char** reason) {
  return guarded([&] {
    require(table != nullptr && name != nullptr && reason != nullptr, "arguments must not be NULL");
    require(row < table->rows.size(), "row index out of range");
    const auto& failures = table->rows[row].failures;
    require(index < failures.size(), "failure index out of range");
    *name = failures[index].name.c_str();
    *reason = failures[index].reason.c_str();
  });
}

void gs_robustness_table_free(gs_robustness_table* table) { delete table; }

/* ---- synth ---- */

void gs_synth_spec_default(gs_synth_spec* spec) {
  if (!spec) return;
  const SynthSpec d;
  *spec = {d.width, d.height, d.n_seeds, d.rng_seed, d.boundary_thickness};
}

namespace {
SynthSpec from_c(const gs_synth_spec& s) {
  SynthSpec out;
  out.width = s.width;
  out.height = s.height;
  out.n_seeds = s.n_seeds;
  out.rng_seed = s.rng_seed;
  out.boundary_thickness = s.boundary_thickness;
  return out;
}
}  // namespace

gs_status gs_synth_generate(const gs_synth_spec* spec, gs_mask** labels, gs_image** edges) {
  return guarded([&] {
    require(spec != nullptr && labels != nullptr, "spec and labels must not be NULL");
    SynthField field = generate_voronoi(from_c(*spec));
    auto* l = new gs_mask{std::move(field.labels)};
    if (edges) {
      try {
        *edges = new gs_image{std::move(field.edges)};
      } catch (...) {
        delete l;
        throw;
      }
    }
    *labels = l;
  });
}

gs_status gs_synth_true_density(const gs_synth_spec* spec, double pixels_per_micron, double* out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "spec and out must not be NULL");
    *out = true_density(from_c(*spec), Calibration(pixels_per_micron));
  });
}

gs_status gs_degrade(const gs_mask* mask, const gs_degradation* degradation, gs_mask** out) {
  return guarded([&] {
    require(mask != nullptr && degradation != nullptr && out != nullptr, "arguments must not be NULL");
    *out = new gs_mask{degrade(mask->mask,
                               {degradation->merge_fraction, degradation->split_fraction, degradation->rng_seed})};
  });
}

}  // extern "C"
