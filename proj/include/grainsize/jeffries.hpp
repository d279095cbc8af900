#ifndef GRAINSIZE_JEFFRIES_HPP
#define GRAINSIZE_JEFFRIES_HPP

// Jeffries planimetric grain counting (ASTM E112) on instance label masks.
//
// A test circle is inscribed around a center so that a target number of grains lie
// wholly inside it. Grains are classified by the Euclidean distance from the circle
// center to their pixel centers:
//   inside       d_max <= r
//   intercepted  d_min <= r < d_max
//   outside      d_min >  r
// The grain density is N_A = f * (N_inside + N_intercepted / 2), where f is the inverse
// of the circle's physical area in mm^2, and G = 3.321928 * log10(N_A) - 2.954.

#include <optional>
#include <variant>
#include <vector>

#include "grainsize/raster.hpp"

namespace grainsize {

inline constexpr double kDefaultPixelsPerMicron = 2.26;
inline constexpr int kDefaultTargetGrains = 60;
inline constexpr int kAstmMinimumGrains = 50;

/// Spatial scale of a micrograph in pixels per micrometre.
class Calibration {
 public:
  Calibration() = default;
  explicit Calibration(double pixels_per_micron);

  double pixels_per_micron() const noexcept { return pixels_per_micron_; }

 private:
  double pixels_per_micron_ = kDefaultPixelsPerMicron;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct RadialExtent {
  LabelId grain_id = 0;
  double d_min = 0.0;
  double d_max = 0.0;
};

enum class GrainClass { Inside, Intercepted, Outside };

struct Classification {
  std::vector<LabelId> inside;
  std::vector<LabelId> intercepted;
  std::vector<LabelId> outside;
};

struct TestCircle {
  Point center;
  double radius = 0.0;
  double physical_area_mm2 = 0.0;
};

struct JeffriesResult {
  int n_inside = 0;
  int n_intercepted = 0;
  double f = 0.0;
  double n_a = 0.0;
  double g = 0.0;
  TestCircle circle;
};

struct DynamicArea {
  double area_mm2;
};
struct Magnification {
  double m;
};
using MultiplierMode = std::variant<DynamicArea, Magnification>;

/// Default circle center: the geometric center of the pixel grid.
Point image_center(const LabelMask& mask);

/// Largest radius a circle around `center` can have while staying on the canvas.
double max_fitting_radius(const LabelMask& mask, Point center);

/// One extent per nonzero id, sorted by id. Distances run from `center` to integer
/// pixel coordinates. The pass over pixels is single-threaded and deterministic.
std::vector<RadialExtent> radial_extents(const LabelMask& mask, Point center);

GrainClass classify_one(const RadialExtent& extent, double radius);
Classification classify(const std::vector<RadialExtent>& extents, double radius);

/// Smallest radius that puts at least `target` grains wholly inside, i.e. the target-th
/// smallest d_max. Ties at that radius all count as inside.
TestCircle inscribe_circle(const LabelMask& mask, int target, const Calibration& calibration,
                           std::optional<Point> center = std::nullopt);

/// inscribe_circle on precomputed extents around `center`; `fit_radius` bounds the circle.
TestCircle inscribe_from_extents(const std::vector<RadialExtent>& extents, Point center, double fit_radius,
                                 int target, const Calibration& calibration);

/// Classifies precomputed extents (taken around circle.center) and evaluates N_A and G.
JeffriesResult count_grains(const std::vector<RadialExtent>& extents, const TestCircle& circle);

/// pi r^2 / (c^2 * 1e6): pixel radius to circle area in mm^2.
double physical_area(double radius_px, const Calibration& calibration);

/// Returns the radius whose circle has the given physical area.
double radius_for_area(double area_mm2, const Calibration& calibration);

TestCircle make_circle(Point center, double radius_px, const Calibration& calibration);

/// dynamic: 1 / area; magnification: 0.0002 M^2 (5000 mm^2 standard figure).
double jeffries_multiplier(const MultiplierMode& mode);

double grain_density(int n_inside, int n_intercepted, double f);

/// ASTM grain size number. Throws NonPositiveDensity for n_a <= 0.
double astm_g(double n_a);

/// Counts grains against `circle` if given (used verbatim), otherwise against a circle
/// inscribed on this mask around its center.
JeffriesResult analyze(const LabelMask& mask, const Calibration& calibration, int target,
                       const std::optional<TestCircle>& circle = std::nullopt);

}  // namespace grainsize

#endif  // GRAINSIZE_JEFFRIES_HPP
