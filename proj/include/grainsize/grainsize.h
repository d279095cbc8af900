/*
 * grainsize C API.
 *
 * Every fallible call returns a gs_status. On failure a thread-local message is
 * available from gs_last_error() until the next failing call on the same thread.
 * Objects handed out through an out-pointer are owned by the caller and released
 * with the matching *_free function. Passing NULL to a *_free function is allowed.
 */
#ifndef GRAINSIZE_H
#define GRAINSIZE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GRAINSIZE_BUILDING_LIBRARY)
#    define GS_API __declspec(dllexport)
#  else
#    define GS_API __declspec(dllimport)
#  endif
#else
#  define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_INVALID_ARGUMENT = 1,
  GS_ERR_IO = 2,
  GS_ERR_UNSUPPORTED_FORMAT = 3,
  GS_ERR_DIMENSION_MISMATCH = 4,
  GS_ERR_LABEL_OVERFLOW = 5,
  GS_ERR_TARGET_UNREACHABLE = 6,
  GS_ERR_EMPTY_MASK = 7,
  GS_ERR_NON_POSITIVE_DENSITY = 8,
  GS_ERR_NO_MATCH = 9,
  GS_ERR_MISSING_PATCH = 10,
  GS_ERR_DUPLICATE_COORDINATE = 11,
  GS_ERR_MISSING_CLASSIFICATION = 12,
  GS_ERR_CIRCLE_OUT_OF_CANVAS = 13,
  GS_ERR_ZERO_GROUND_TRUTH = 14,
  GS_ERR_INTERNAL = 99
} gs_status;

typedef enum gs_circle_mode { GS_MODE_GT_DERIVED = 0, GS_MODE_GT_FREE = 1 } gs_circle_mode;

typedef struct gs_mask gs_mask;
typedef struct gs_image gs_image;
typedef struct gs_stitch_summary gs_stitch_summary;
typedef struct gs_robustness_table gs_robustness_table;

GS_API const char* gs_version(void);
GS_API const char* gs_last_error(void);
GS_API const char* gs_status_string(gs_status status);

/* ---- label masks ------------------------------------------------------ */

/* Copies width * height labels. */
GS_API gs_status gs_mask_create(int width, int height, const uint16_t* labels, gs_mask** out);
GS_API gs_status gs_mask_read(const char* path, gs_mask** out);
/* Writes a 16-bit single-channel TIFF. */
GS_API gs_status gs_mask_write(const gs_mask* mask, const char* path);
GS_API void gs_mask_free(gs_mask* mask);
GS_API int gs_mask_width(const gs_mask* mask);
GS_API int gs_mask_height(const gs_mask* mask);
/* Row-major, width * height entries, valid for the lifetime of the mask. */
GS_API const uint16_t* gs_mask_data(const gs_mask* mask);
GS_API size_t gs_mask_instance_count(const gs_mask* mask);

/* ---- 8-bit grayscale images ------------------------------------------- */

GS_API gs_status gs_image_read(const char* path, gs_image** out);
GS_API gs_status gs_image_write_png(const gs_image* image, const char* path);
GS_API void gs_image_free(gs_image* image);
GS_API int gs_image_width(const gs_image* image);
GS_API int gs_image_height(const gs_image* image);
GS_API const uint8_t* gs_image_data(const gs_image* image);

/* ---- mask preparation ------------------------------------------------- */

typedef struct gs_prep_config {
  int threshold;      /* interiors are intensity < threshold; default 128 */
  int erosion_radius; /* default 1 */
  int min_area;       /* components below this many pixels are dropped; default 200 */
  int connectivity;   /* 4 or 8; default 4 */
} gs_prep_config;

GS_API void gs_prep_config_default(gs_prep_config* config);
GS_API gs_status gs_prepare_mask(const gs_image* raw, const gs_prep_config* config, gs_mask** out);

/* ---- stitching -------------------------------------------------------- */

typedef struct gs_stitch_plan {
  int rows;
  int cols;
  int patch_width;  /* 0 = infer */
  int patch_height; /* 0 = infer */
  const char* filename_pattern; /* NULL = default; gs_stitch_plan_default fills in the default */
  const char* mask_pattern;     /* NULL = no masks */
  int relabel_masks;
} gs_stitch_plan;

GS_API void gs_stitch_plan_default(gs_stitch_plan* plan);
GS_API gs_status gs_stitch_dataset(const char* input_dir, const gs_stitch_plan* plan,
                                   const char* output_dir, int jobs, gs_stitch_summary** out);
GS_API size_t gs_stitch_summary_group_count(const gs_stitch_summary* summary);
GS_API const char* gs_stitch_summary_group(const gs_stitch_summary* summary, size_t index);
GS_API size_t gs_stitch_summary_skipped_count(const gs_stitch_summary* summary);
GS_API const char* gs_stitch_summary_skipped_group(const gs_stitch_summary* summary, size_t index);
GS_API const char* gs_stitch_summary_skipped_reason(const gs_stitch_summary* summary, size_t index);
GS_API size_t gs_stitch_summary_error_count(const gs_stitch_summary* summary);
GS_API const char* gs_stitch_summary_error(const gs_stitch_summary* summary, size_t index);
GS_API void gs_stitch_summary_free(gs_stitch_summary* summary);

/* ---- Jeffries planimetry ---------------------------------------------- */

typedef struct gs_circle {
  double cx;
  double cy;
  double radius;
  double physical_area_mm2;
} gs_circle;

typedef struct gs_jeffries_result {
  int n_inside;
  int n_intercepted;
  double f;
  double n_a;
  double g;
  gs_circle circle;
} gs_jeffries_result;

GS_API gs_status gs_physical_area(double radius_px, double pixels_per_micron, double* out);
GS_API gs_status gs_multiplier_dynamic(double area_mm2, double* out);
GS_API gs_status gs_multiplier_magnification(double magnification, double* out);
GS_API gs_status gs_grain_density(int n_inside, int n_intercepted, double f, double* out);
GS_API gs_status gs_astm_g(double n_a, double* out);

/* center may be NULL for the image center. */
GS_API gs_status gs_inscribe_circle(const gs_mask* mask, double pixels_per_micron, int target,
                                    const double* center_xy, gs_circle* out);
/* circle may be NULL to inscribe one on this mask. */
GS_API gs_status gs_analyze(const gs_mask* mask, double pixels_per_micron, int target,
                            const gs_circle* circle, gs_jeffries_result* out);

typedef struct gs_overlay_style {
  uint8_t inside_rgb[3];
  uint8_t intercepted_rgb[3];
  uint8_t circle_rgb[3];
  int circle_thickness;
} gs_overlay_style;

GS_API void gs_overlay_style_default(gs_overlay_style* style);
/* Classifies the grains of `mask` against `circle` and writes an RGB PNG.
 * micrograph and style may be NULL. */
GS_API gs_status gs_render_overlay(const gs_image* micrograph, const gs_mask* mask,
                                   const gs_circle* circle, const gs_overlay_style* style,
                                   const char* path);

/* ---- evaluation ------------------------------------------------------- */

typedef struct gs_eval_config {
  double pixels_per_micron;
  int target;
  gs_circle_mode mode;
  double boundary_tolerance;
  const double* iou_thresholds; /* NULL = 0.50:0.05:0.95 */
  size_t iou_threshold_count;
} gs_eval_config;

/* Percentage errors are NaN where the ground-truth value is zero. */
typedef struct gs_pair_record {
  double ap50;
  double map_50_95;
  double boundary_f1;
  long count_error;
  size_t gt_instances;
  size_t pred_instances;
  gs_jeffries_result gt;
  gs_jeffries_result pred;
  double ape_n_inside;
  double ape_n_intercepted;
  double ape_n_a;
  double ape_g;
} gs_pair_record;

/* MAPE fields are NaN when undefined. */
typedef struct gs_eval_aggregate {
  size_t images;
  double ap50;
  double map_50_95;
  double boundary_f1;
  double count_error;
  double gt_n_inside;
  double gt_n_intercepted;
  double gt_n_a;
  double gt_g;
  double pred_n_inside;
  double pred_n_intercepted;
  double pred_n_a;
  double pred_g;
  double n_inside_mape;
  double n_intercepted_mape;
  double n_a_mape;
  double g_mape;
} gs_eval_aggregate;

GS_API void gs_eval_config_default(gs_eval_config* config);
GS_API gs_status gs_evaluate_pair(const gs_mask* gt, const gs_mask* pred, const gs_eval_config* config,
                                  gs_pair_record* out);
GS_API gs_status gs_aggregate(const gs_pair_record* records, size_t count, gs_eval_aggregate* out);
GS_API gs_status gs_mape(const double* pred, const double* gt, size_t count, double* out);

typedef struct gs_robustness_row {
  int target;
  gs_circle_mode mode;
  size_t images;
  double gt_count;
  double gt_n_a;
  double gt_g;
  double pred_count;
  double pred_n_a;
  double n_a_mape; /* NaN when undefined */
  double pred_g;
  double g_mape; /* NaN when undefined */
  size_t failures;
} gs_robustness_row;

/* names may be NULL; failures are then reported by pair index. */
GS_API gs_status gs_robustness_sweep(const gs_mask* const* gt, const gs_mask* const* pred,
                                     const char* const* names, size_t pair_count,
                                     double pixels_per_micron, const int* targets, size_t target_count,
                                     const gs_circle_mode* modes, size_t mode_count, int jobs,
                                     gs_robustness_table** out);
GS_API size_t gs_robustness_table_row_count(const gs_robustness_table* table);
GS_API gs_status gs_robustness_table_row(const gs_robustness_table* table, size_t index,
                                         gs_robustness_row* out);
GS_API gs_status gs_robustness_table_failure(const gs_robustness_table* table, size_t row,
                                             size_t index, const char** name, const char** reason);
GS_API void gs_robustness_table_free(gs_robustness_table* table);

/* ---- synthetic microstructures ---------------------------------------- */

typedef struct gs_synth_spec {
  int width;
  int height;
  int n_seeds;
  uint64_t rng_seed;
  int boundary_thickness;
} gs_synth_spec;

typedef struct gs_degradation {
  double merge_fraction;
  double split_fraction;
  uint64_t rng_seed;
} gs_degradation;

GS_API void gs_synth_spec_default(gs_synth_spec* spec);
/* edges may be NULL. */
GS_API gs_status gs_synth_generate(const gs_synth_spec* spec, gs_mask** labels, gs_image** edges);
GS_API gs_status gs_synth_true_density(const gs_synth_spec* spec, double pixels_per_micron, double* out);
GS_API gs_status gs_degrade(const gs_mask* mask, const gs_degradation* degradation, gs_mask** out);

#ifdef __cplusplus
}
#endif

#endif /* GRAINSIZE_H */
