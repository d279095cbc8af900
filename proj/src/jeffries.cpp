#include "grainsize/jeffries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grainsize/error.hpp"

namespace grainsize {
namespace {

constexpr double kSquareMicronsPerSquareMm = 1e6;
constexpr double kAstmSlope = 3.321928;
constexpr double kAstmOffset = 2.954;
// f = 0.0002 M^2 corresponds to the 5000 mm^2 standard test figure.
constexpr double kStandardFigureMultiplier = 0.0002;

void require_positive_finite(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

}  // namespace

Calibration::Calibration(double pixels_per_micron) : pixels_per_micron_(pixels_per_micron) {
  require_positive_finite(pixels_per_micron, "calibration (px/um)");
}

Point image_center(const LabelMask& mask) {
  return {(mask.width() - 1) / 2.0, (mask.height() - 1) / 2.0};
}

double max_fitting_radius(const LabelMask& mask, Point center) {
  return std::min({center.x, center.y, mask.width() - 1 - center.x, mask.height() - 1 - center.y});
}

std::vector<RadialExtent> radial_extents(const LabelMask& mask, Point center) {
  // Squared distances are tracked per id and rooted once at the end.
  constexpr double kUnset = std::numeric_limits<double>::infinity();
  std::vector<double> min_sq(static_cast<std::size_t>(kMaxLabel) + 1, kUnset);
  std::vector<double> max_sq(min_sq.size(), -1.0);
  for (int y = 0; y < mask.height(); ++y) {
    const double dy = y - center.y;
    const double dy2 = dy * dy;
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      const LabelId id = row[x];
      if (id == 0) continue;
      const double dx = x - center.x;
      const double d2 = dx * dx + dy2;
      if (d2 < min_sq[id]) min_sq[id] = d2;
      if (d2 > max_sq[id]) max_sq[id] = d2;
    }
  }
  std::vector<RadialExtent> out;
  for (std::size_t id = 1; id < min_sq.size(); ++id) {
    if (max_sq[id] < 0.0) continue;
    out.push_back({static_cast<LabelId>(id), std::sqrt(min_sq[id]), std::sqrt(max_sq[id])});
  }
  return out;
}

GrainClass classify_one(const RadialExtent& extent, double radius) {
  if (extent.d_max <= radius) return GrainClass::Inside;
  if (extent.d_min <= radius) return GrainClass::Intercepted;
  return GrainClass::Outside;
}

Classification classify(const std::vector<RadialExtent>& extents, double radius) {
  require_positive_finite(radius, "circle radius");
  Classification out;
  for (const auto& e : extents) {
    switch (classify_one(e, radius)) {
      case GrainClass::Inside: out.inside.push_back(e.grain_id); break;
      case GrainClass::Intercepted: out.intercepted.push_back(e.grain_id); break;
      case GrainClass::Outside: out.outside.push_back(e.grain_id); break;
    }
  }
  return out;
}

TestCircle inscribe_from_extents(const std::vector<RadialExtent>& extents, Point center, double fit_radius,
                                 int target, const Calibration& calibration) {
  if (target < 1) throw Error(ErrorCode::InvalidArgument, "target grain count must be at least 1");
  if (extents.empty()) throw Error(ErrorCode::EmptyMask, "mask has no grains");
  std::vector<double> candidates;
  candidates.reserve(extents.size());
  for (const auto& e : extents) {
    if (e.d_max <= fit_radius) candidates.push_back(e.d_max);
  }
  if (candidates.size() < static_cast<std::size_t>(target)) {
    throw Error(ErrorCode::TargetUnreachable,
                "only " + std::to_string(candidates.size()) + " of " + std::to_string(extents.size()) +
                    " grains fit inside a circle of radius " + std::to_string(fit_radius) + " px; target is " +
                    std::to_string(target));
  }
  std::nth_element(candidates.begin(), candidates.begin() + (target - 1), candidates.end());
  const double radius = candidates[target - 1];
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::TargetUnreachable, "target is met by a zero-radius circle");
  }
  return make_circle(center, radius, calibration);
}

TestCircle inscribe_circle(const LabelMask& mask, int target, const Calibration& calibration,
                           std::optional<Point> center) {
  if (target < 1) throw Error(ErrorCode::InvalidArgument, "target grain count must be at least 1");
  const Point c = center.value_or(image_center(mask));
  if (!(c.x >= 0.0 && c.y >= 0.0 && c.x <= mask.width() - 1 && c.y <= mask.height() - 1)) {
    throw Error(ErrorCode::InvalidArgument, "circle center lies outside the image");
  }
  return inscribe_from_extents(radial_extents(mask, c), c, max_fitting_radius(mask, c), target, calibration);
}

double physical_area(double radius_px, const Calibration& calibration) {
  require_positive_finite(radius_px, "circle radius");
  const double c = calibration.pixels_per_micron();
  return std::numbers::pi * radius_px * radius_px / (c * c * kSquareMicronsPerSquareMm);
}

double radius_for_area(double area_mm2, const Calibration& calibration) {
  require_positive_finite(area_mm2, "circle area");
  const double c = calibration.pixels_per_micron();
  return std::sqrt(area_mm2 * c * c * kSquareMicronsPerSquareMm / std::numbers::pi);
}

TestCircle make_circle(Point center, double radius_px, const Calibration& calibration) {
  return {center, radius_px, physical_area(radius_px, calibration)};
}

double jeffries_multiplier(const MultiplierMode& mode) {
  if (const auto* dynamic = std::get_if<DynamicArea>(&mode)) {
    require_positive_finite(dynamic->area_mm2, "test area");
    return 1.0 / dynamic->area_mm2;
  }
  const double m = std::get<Magnification>(mode).m;
  require_positive_finite(m, "magnification");
  return kStandardFigureMultiplier * m * m;
}

double grain_density(int n_inside, int n_intercepted, double f) {
  if (n_inside < 0 || n_intercepted < 0) {
    throw Error(ErrorCode::InvalidArgument, "grain counts must be non-negative");
  }
  require_positive_finite(f, "Jeffries multiplier");
  return f * (n_inside + n_intercepted / 2.0);
}

double astm_g(double n_a) {
  if (!(n_a > 0.0)) {
    throw Error(ErrorCode::NonPositiveDensity, "grain density must be positive to define G");
  }
  return kAstmSlope * std::log10(n_a) - kAstmOffset;
}

JeffriesResult count_grains(const std::vector<RadialExtent>& extents, const TestCircle& circle) {
  require_positive_finite(circle.radius, "circle radius");
  require_positive_finite(circle.physical_area_mm2, "circle area");
  JeffriesResult result;
  result.circle = circle;
  for (const auto& e : extents) {
    switch (classify_one(e, circle.radius)) {
      case GrainClass::Inside: ++result.n_inside; break;
      case GrainClass::Intercepted: ++result.n_intercepted; break;
      case GrainClass::Outside: break;
    }
  }
  result.f = jeffries_multiplier(DynamicArea{circle.physical_area_mm2});
  result.n_a = grain_density(result.n_inside, result.n_intercepted, result.f);
  // An empty circle has no defined G.
  result.g = result.n_a > 0.0 ? astm_g(result.n_a) : std::numeric_limits<double>::quiet_NaN();
  return result;
}

JeffriesResult analyze(const LabelMask& mask, const Calibration& calibration, int target,
                       const std::optional<TestCircle>& circle) {
  const TestCircle used = circle ? *circle : inscribe_circle(mask, target, calibration);
  return count_grains(radial_extents(mask, used.center), used);
}

}  // namespace grainsize
