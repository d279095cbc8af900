#include "grainsize/seg_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <variant>

#include "grainsize/error.hpp"
#include "parallel.hpp"

namespace grainsize {
namespace {

void require_same_shape(const LabelMask& a, const LabelMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, "masks differ in size: " + std::to_string(a.width()) + "x" +
                                                  std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                                  "x" + std::to_string(b.height()));
  }
}

// 1-D squared Euclidean distance transform of a sampled function (lower envelope of
// parabolas). f holds 0 at sites and +inf elsewhere.
void distance_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    auto intersect = [&](int p) {
      return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    // z[0] is -inf, so this stops at k == 0.
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

// Squared distance from every pixel to the nearest set pixel of `sites`.
Grid<double> squared_distance_transform(const BinaryMask& sites) {
  const int w = sites.width();
  const int h = sites.height();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Grid<double> out(w, h, kInf);
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  f.resize(h);
  d.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = sites.at(x, y) ? 0.0 : kInf;
    distance_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) out.at(x, y) = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = out.at(x, y);
    distance_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) out.at(x, y) = d[x];
  }
  return out;
}

// Fraction of `from` boundary pixels lying within tolerance of a `to` boundary pixel.
double matched_fraction(const BinaryMask& from, const Grid<double>& to_distance, double tolerance) {
  const double limit = tolerance * tolerance + 1e-9;
  std::size_t total = 0;
  std::size_t hit = 0;
  const auto bits = from.pixels();
  const auto dist = to_distance.pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    ++total;
    if (dist[i] <= limit) ++hit;
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

std::optional<double> percentage_error(double pred, double gt) {
  if (gt == 0.0 || !std::isfinite(gt) || !std::isfinite(pred)) return std::nullopt;
  return 100.0 * std::abs(pred - gt) / std::abs(gt);
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> mean_defined(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back(0.5 + 0.05 * k);
  return t;
}

IouMatrix instance_iou_matrix(const LabelMask& gt, const LabelMask& pred) {
  require_same_shape(gt, pred);
  std::vector<std::size_t> gt_area(static_cast<std::size_t>(kMaxLabel) + 1, 0);
  std::vector<std::size_t> pred_area(gt_area.size(), 0);
  std::unordered_map<std::uint32_t, std::size_t> overlap;
  const auto g = gt.pixels();
  const auto p = pred.pixels();
  for (std::size_t i = 0; i < g.size(); ++i) {
    ++gt_area[g[i]];
    ++pred_area[p[i]];
    if (g[i] != 0 && p[i] != 0) ++overlap[(static_cast<std::uint32_t>(g[i]) << 16) | p[i]];
  }
  IouMatrix out;
  for (std::size_t id = 1; id < gt_area.size(); ++id) {
    if (gt_area[id]) ++out.gt_count;
    if (pred_area[id]) ++out.pred_count;
  }
  out.entries.reserve(overlap.size());
  for (const auto& [key, inter] : overlap) {
    const auto gid = static_cast<LabelId>(key >> 16);
    const auto pid = static_cast<LabelId>(key & 0xffffu);
    const std::size_t uni = gt_area[gid] + pred_area[pid] - inter;
    out.entries.push_back({gid, pid, inter, static_cast<double>(inter) / static_cast<double>(uni)});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const IouEntry& a, const IouEntry& b) {
    return a.gt_id != b.gt_id ? a.gt_id < b.gt_id : a.pred_id < b.pred_id;
  });
  return out;
}

MatchResult match_instances(const IouMatrix& iou, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "IoU threshold must lie in [0, 1]");
  }
  std::vector<const IouEntry*> candidates;
  for (const auto& e : iou.entries) {
    if (e.iou >= threshold - kIouSlack) candidates.push_back(&e);
  }
  std::sort(candidates.begin(), candidates.end(), [](const IouEntry* a, const IouEntry* b) {
    if (a->iou != b->iou) return a->iou > b->iou;
    if (a->gt_id != b->gt_id) return a->gt_id < b->gt_id;
    return a->pred_id < b->pred_id;
  });
  std::vector<bool> gt_used(static_cast<std::size_t>(kMaxLabel) + 1, false);
  std::vector<bool> pred_used(gt_used.size(), false);
  MatchResult out;
  out.threshold = threshold;
  for (const IouEntry* e : candidates) {
    if (gt_used[e->gt_id] || pred_used[e->pred_id]) continue;
    gt_used[e->gt_id] = true;
    pred_used[e->pred_id] = true;
    out.matches.push_back({e->gt_id, e->pred_id, e->iou});
  }
  out.tp = out.matches.size();
  out.fp = iou.pred_count - out.tp;
  out.fn = iou.gt_count - out.tp;
  return out;
}

double average_precision(const MatchResult& match) {
  const std::size_t denom = match.tp + match.fp + match.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(match.tp) / static_cast<double>(denom);
}

double mean_average_precision(const IouMatrix& iou, const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "no IoU thresholds given");
  double sum = 0.0;
  for (const double t : thresholds) sum += average_precision(match_instances(iou, t));
  return sum / static_cast<double>(thresholds.size());
}

BinaryMask boundary_pixels(const LabelMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const LabelId id = mask.at(x, y);
      if (id == 0) continue;
      const bool edge = (x > 0 && mask.at(x - 1, y) != id) || (x + 1 < w && mask.at(x + 1, y) != id) ||
                        (y > 0 && mask.at(x, y - 1) != id) || (y + 1 < h && mask.at(x, y + 1) != id);
      out.at(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

double boundary_f1(const LabelMask& gt, const LabelMask& pred, double tolerance) {
  require_same_shape(gt, pred);
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "boundary tolerance must be >= 0");
  const BinaryMask gb = boundary_pixels(gt);
  const BinaryMask pb = boundary_pixels(pred);
  const bool g_empty = std::none_of(gb.pixels().begin(), gb.pixels().end(), [](auto b) { return b != 0; });
  const bool p_empty = std::none_of(pb.pixels().begin(), pb.pixels().end(), [](auto b) { return b != 0; });
  if (g_empty && p_empty) return 1.0;
  if (g_empty || p_empty) return 0.0;
  const double precision = matched_fraction(pb, squared_distance_transform(gb), tolerance);
  const double recall = matched_fraction(gb, squared_distance_transform(pb), tolerance);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

long count_error(const LabelMask& gt, const LabelMask& pred) {
  return static_cast<long>(instance_count(pred)) - static_cast<long>(instance_count(gt));
}

double mape(const std::vector<double>& pred, const std::vector<double>& gt) {
  if (pred.size() != gt.size()) throw Error(ErrorCode::DimensionMismatch, "MAPE inputs differ in length");
  if (gt.empty()) throw Error(ErrorCode::InvalidArgument, "MAPE of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] == 0.0) throw Error(ErrorCode::ZeroGroundTruth, "ground truth element " + std::to_string(i) + " is zero");
    sum += std::abs(pred[i] - gt[i]) / std::abs(gt[i]);
  }
  return 100.0 * sum / static_cast<double>(gt.size());
}

const char* to_string(CircleMode mode) noexcept {
  return mode == CircleMode::GtDerived ? "gt-derived" : "gt-free";
}

CircleMode parse_circle_mode(const std::string& text) {
  if (text == "gt-derived" || text == "gt_derived") return CircleMode::GtDerived;
  if (text == "gt-free" || text == "gt_free") return CircleMode::GtFree;
  throw Error(ErrorCode::InvalidArgument, "circle mode must be gt-derived or gt-free, got '" + text + "'");
}

PairRecord evaluate_pair(const LabelMask& gt, const LabelMask& pred, const EvalConfig& config) {
  require_same_shape(gt, pred);
  PairRecord r;
  const IouMatrix iou = instance_iou_matrix(gt, pred);
  r.ap50 = average_precision(match_instances(iou, 0.5));
  r.map_50_95 = mean_average_precision(iou, config.iou_thresholds);
  r.boundary_f1 = boundary_f1(gt, pred, config.boundary_tolerance);
  r.gt_instances = iou.gt_count;
  r.pred_instances = iou.pred_count;
  r.count_error = static_cast<long>(iou.pred_count) - static_cast<long>(iou.gt_count);

  r.gt = analyze(gt, config.calibration, config.target);
  r.pred = config.mode == CircleMode::GtDerived ? analyze(pred, config.calibration, config.target, r.gt.circle)
                                                : analyze(pred, config.calibration, config.target);
  r.ape.n_inside = percentage_error(r.pred.n_inside, r.gt.n_inside);
  r.ape.n_intercepted = percentage_error(r.pred.n_intercepted, r.gt.n_intercepted);
  r.ape.n_a = percentage_error(r.pred.n_a, r.gt.n_a);
  r.ape.g = percentage_error(r.pred.g, r.gt.g);
  return r;
}

EvalAggregate aggregate(const std::vector<PairRecord>& records) {
  EvalAggregate a;
  a.images = records.size();
  if (records.empty()) return a;
  auto mean = [&](auto field) {
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(static_cast<double>(field(r)));
    return mean_of(v);
  };
  a.ap50 = mean([](const PairRecord& r) { return r.ap50; });
  a.map_50_95 = mean([](const PairRecord& r) { return r.map_50_95; });
  a.boundary_f1 = mean([](const PairRecord& r) { return r.boundary_f1; });
  a.count_error = mean([](const PairRecord& r) { return r.count_error; });
  a.gt_n_inside = mean([](const PairRecord& r) { return r.gt.n_inside; });
  a.gt_n_intercepted = mean([](const PairRecord& r) { return r.gt.n_intercepted; });
  a.gt_n_a = mean([](const PairRecord& r) { return r.gt.n_a; });
  a.gt_g = mean([](const PairRecord& r) { return r.gt.g; });
  a.pred_n_inside = mean([](const PairRecord& r) { return r.pred.n_inside; });
  a.pred_n_intercepted = mean([](const PairRecord& r) { return r.pred.n_intercepted; });
  a.pred_n_a = mean([](const PairRecord& r) { return r.pred.n_a; });
  a.pred_g = mean([](const PairRecord& r) { return r.pred.g; });
  auto collect = [&](auto field) {
    std::vector<std::optional<double>> v;
    for (const auto& r : records) v.push_back(field(r));
    return mean_defined(v);
  };
  a.n_inside_mape = collect([](const PairRecord& r) { return r.ape.n_inside; });
  a.n_intercepted_mape = collect([](const PairRecord& r) { return r.ape.n_intercepted; });
  a.n_a_mape = collect([](const PairRecord& r) { return r.ape.n_a; });
  a.g_mape = collect([](const PairRecord& r) { return r.ape.g; });
  return a;
}

std::vector<RobustnessRow> robustness_sweep(const std::vector<MaskPair>& pairs, const Calibration& calibration,
                                            const std::vector<int>& targets, const std::vector<CircleMode>& modes,
                                            int jobs) {
  for (const int t : targets) {
    if (t < 1) throw Error(ErrorCode::InvalidArgument, "robustness targets must be >= 1");
  }
  const std::size_t cells = targets.size() * modes.size();
  struct CellResult {
    JeffriesResult gt;
    JeffriesResult pred;
  };
  using Outcome = std::variant<CellResult, std::string>;
  std::vector<std::vector<Outcome>> per_pair(pairs.size());

  detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const MaskPair& pair = pairs[i];
    auto& out = per_pair[i];
    out.assign(cells, std::string{});
    try {
      require_same_shape(pair.gt, pair.pred);
    } catch (const Error& e) {
      for (auto& o : out) o = std::string(e.what());
      return;
    }
    // Every circle in the sweep shares the image center, so extents are computed once.
    const Point center = image_center(pair.gt);
    const double fit = max_fitting_radius(pair.gt, center);
    const auto gt_extents = radial_extents(pair.gt, center);
    const auto pred_extents = radial_extents(pair.pred, center);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      for (std::size_t m = 0; m < modes.size(); ++m) {
        Outcome& cell = out[t * modes.size() + m];
        try {
          const TestCircle gt_circle = inscribe_from_extents(gt_extents, center, fit, targets[t], calibration);
          const TestCircle pred_circle =
              modes[m] == CircleMode::GtDerived
                  ? gt_circle
                  : inscribe_from_extents(pred_extents, center, fit, targets[t], calibration);
          cell = CellResult{count_grains(gt_extents, gt_circle), count_grains(pred_extents, pred_circle)};
        } catch (const Error& e) {
          cell = std::string(e.what());
        }
      }
    }
  });

  std::vector<RobustnessRow> rows;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      RobustnessRow row;
      row.target = targets[t];
      row.mode = modes[m];
      std::vector<double> gt_count, gt_na, gt_g, pred_count, pred_na, pred_g;
      std::vector<std::optional<double>> na_err, g_err;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Outcome& o = per_pair[i][t * modes.size() + m];
        if (const auto* reason = std::get_if<std::string>(&o)) {
          row.failures.push_back({pairs[i].name, *reason});
          continue;
        }
        const auto& c = std::get<CellResult>(o);
        gt_count.push_back(c.gt.n_inside);
        gt_na.push_back(c.gt.n_a);
        gt_g.push_back(c.gt.g);
        pred_count.push_back(c.pred.n_inside);
        pred_na.push_back(c.pred.n_a);
        pred_g.push_back(c.pred.g);
        na_err.push_back(percentage_error(c.pred.n_a, c.gt.n_a));
        g_err.push_back(percentage_error(c.pred.g, c.gt.g));
      }
      row.images = gt_count.size();
      row.gt_count = mean_of(gt_count);
      row.gt_n_a = mean_of(gt_na);
      row.gt_g = mean_of(gt_g);
      row.pred_count = mean_of(pred_count);
      row.pred_n_a = mean_of(pred_na);
      row.pred_g = mean_of(pred_g);
      row.n_a_mape = mean_defined(na_err);
      row.g_mape = mean_defined(g_err);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace grainsize
