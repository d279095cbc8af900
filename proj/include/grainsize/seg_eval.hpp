#ifndef GRAINSIZE_SEG_EVAL_HPP
#define GRAINSIZE_SEG_EVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "grainsize/jeffries.hpp"
#include "grainsize/raster.hpp"

namespace grainsize {

struct IouEntry {
  LabelId gt_id = 0;
  LabelId pred_id = 0;
  std::size_t intersection = 0;
  double iou = 0.0;
};

/// Sparse pairwise IoU. Only overlapping (gt, pred) pairs are stored, sorted by
/// (gt_id, pred_id). Counts of distinct instances on each side ride along so matching
/// can derive fp and fn.
struct IouMatrix {
  std::vector<IouEntry> entries;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;
};

struct Match {
  LabelId gt_id = 0;
  LabelId pred_id = 0;
  double iou = 0.0;
};

struct MatchResult {
  double threshold = 0.5;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<Match> matches;
};

// IoU values are compared as iou >= threshold - kIouSlack so that thresholds built as
// 0.5 + 0.05 k agree with exact ratios such as 6/10.
inline constexpr double kIouSlack = 1e-9;

/// 0.50, 0.55, ..., 0.95
std::vector<double> default_iou_thresholds();

IouMatrix instance_iou_matrix(const LabelMask& gt, const LabelMask& pred);

/// Greedy one-to-one matching by descending IoU over pairs with IoU >= threshold.
/// Exact for thresholds >= 0.5, where each instance has at most one candidate.
MatchResult match_instances(const IouMatrix& iou, double threshold);

/// tp / (tp + fp + fn); 1.0 when both sides are empty.
double average_precision(const MatchResult& match);

double mean_average_precision(const IouMatrix& iou, const std::vector<double>& thresholds);

/// Nonzero pixels with a 4-neighbour carrying a different label (background included).
BinaryMask boundary_pixels(const LabelMask& mask);

/// F1 of boundary pixels matched within `tolerance` pixels (Euclidean).
double boundary_f1(const LabelMask& gt, const LabelMask& pred, double tolerance = 2.0);

/// pred instances minus gt instances over the whole field.
long count_error(const LabelMask& gt, const LabelMask& pred);

/// 100 * mean |p - g| / |g|. Throws ZeroGroundTruth if any g == 0.
double mape(const std::vector<double>& pred, const std::vector<double>& gt);

enum class CircleMode { GtDerived, GtFree };

const char* to_string(CircleMode mode) noexcept;
CircleMode parse_circle_mode(const std::string& text);

struct EvalConfig {
  Calibration calibration;
  int target = kDefaultTargetGrains;
  CircleMode mode = CircleMode::GtDerived;
  double boundary_tolerance = 2.0;
  std::vector<double> iou_thresholds = default_iou_thresholds();
};

/// Absolute percentage errors of the prediction's Jeffries fields. A field whose ground
/// truth is zero has no defined error.
struct JeffriesErrors {
  std::optional<double> n_inside;
  std::optional<double> n_intercepted;
  std::optional<double> n_a;
  std::optional<double> g;
};

struct PairRecord {
  std::string name;
  double ap50 = 0.0;
  double map_50_95 = 0.0;
  double boundary_f1 = 0.0;
  long count_error = 0;
  std::size_t gt_instances = 0;
  std::size_t pred_instances = 0;
  JeffriesResult gt;
  JeffriesResult pred;
  JeffriesErrors ape;
};

PairRecord evaluate_pair(const LabelMask& gt, const LabelMask& pred, const EvalConfig& config);

/// Arithmetic means of per-image values; MAPE over the images where it is defined.
struct EvalAggregate {
  std::size_t images = 0;
  double ap50 = 0.0;
  double map_50_95 = 0.0;
  double boundary_f1 = 0.0;
  double count_error = 0.0;
  double gt_n_inside = 0.0;
  double gt_n_intercepted = 0.0;
  double gt_n_a = 0.0;
  double gt_g = 0.0;
  double pred_n_inside = 0.0;
  double pred_n_intercepted = 0.0;
  double pred_n_a = 0.0;
  double pred_g = 0.0;
  std::optional<double> n_inside_mape;
  std::optional<double> n_intercepted_mape;
  std::optional<double> n_a_mape;
  std::optional<double> g_mape;
};

EvalAggregate aggregate(const std::vector<PairRecord>& records);

struct MaskPair {
  std::string name;
  LabelMask gt;
  LabelMask pred;
};

struct CellFailure {
  std::string name;
  std::string reason;
};

/// One (target, mode) cell of the robustness table. "count" is N_inside.
struct RobustnessRow {
  int target = 0;
  CircleMode mode = CircleMode::GtDerived;
  std::size_t images = 0;
  double gt_count = 0.0;
  double gt_n_a = 0.0;
  double gt_g = 0.0;
  double pred_count = 0.0;
  double pred_n_a = 0.0;
  std::optional<double> n_a_mape;
  double pred_g = 0.0;
  std::optional<double> g_mape;
  std::vector<CellFailure> failures;
};

/// Jeffries-only sweep over targets and circle modes. Unreachable targets are recorded
/// per image and the image is left out of that cell.
std::vector<RobustnessRow> robustness_sweep(const std::vector<MaskPair>& pairs,
                                            const Calibration& calibration,
                                            const std::vector<int>& targets,
                                            const std::vector<CircleMode>& modes, int jobs = 1);

}  // namespace grainsize

#endif  // GRAINSIZE_SEG_EVAL_HPP
