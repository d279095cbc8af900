#include "grainsize/overlay.hpp"

#include <cmath>

#include "codec.hpp"
#include "fs_util.hpp"
#include "grainsize/error.hpp"

namespace grainsize {
namespace {

constexpr std::uint8_t kNeutralGrey = 128;
// Keeps the fit test tolerant to radii computed in floating point.
constexpr double kFitSlack = 1e-9;

std::uint8_t blend(std::uint8_t base, std::uint8_t tint) {
  return static_cast<std::uint8_t>((static_cast<int>(base) + static_cast<int>(tint) + 1) / 2);
}

}  // namespace

RgbImage compose_overlay(const std::optional<GrayImage>& micrograph, const LabelMask& mask, const TestCircle& circle,
                         const std::map<LabelId, GrainClass>& classification, const OverlayStyle& style) {
  if (style.circle_thickness < 1) throw Error(ErrorCode::InvalidArgument, "circle thickness must be >= 1");
  if (micrograph && (micrograph->width() != mask.width() || micrograph->height() != mask.height())) {
    throw Error(ErrorCode::DimensionMismatch, "micrograph and mask differ in size");
  }
  const double r = circle.radius;
  if (!(r > 0.0) || circle.center.x - r < -kFitSlack || circle.center.y - r < -kFitSlack ||
      circle.center.x + r > mask.width() - 1 + kFitSlack || circle.center.y + r > mask.height() - 1 + kFitSlack) {
    throw Error(ErrorCode::CircleOutOfCanvas, "test circle does not fit on the canvas");
  }

  // Classification lookup table; every grain present must be classified.
  std::vector<int> cls(static_cast<std::size_t>(kMaxLabel) + 1, -1);
  for (const auto& [id, c] : classification) cls[id] = static_cast<int>(c);
  for (const auto id : mask.pixels()) {
    if (id != 0 && cls[id] < 0) {
      throw Error(ErrorCode::MissingClassification, "grain " + std::to_string(id) + " has no classification");
    }
  }

  RgbImage out{mask.width(), mask.height(),
               std::vector<std::uint8_t>(static_cast<std::size_t>(mask.width()) * mask.height() * 3, 0)};
  const double half = style.circle_thickness / 2.0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * mask.width() + x) * 3;
      const LabelId id = mask.at(x, y);
      const std::uint8_t base = micrograph ? micrograph->at(x, y) : (id != 0 ? kNeutralGrey : 0);
      Rgb px{base, base, base};
      if (id != 0) {
        const auto c = static_cast<GrainClass>(cls[id]);
        if (c != GrainClass::Outside) {
          const Rgb tint = c == GrainClass::Inside ? style.inside_color : style.intercepted_color;
          px = micrograph ? Rgb{blend(base, tint.r), blend(base, tint.g), blend(base, tint.b)} : tint;
        }
      }
      const double d = std::hypot(x - circle.center.x, y - circle.center.y);
      if (std::abs(d - r) <= half) px = style.circle_color;
      out.pixels[i] = px.r;
      out.pixels[i + 1] = px.g;
      out.pixels[i + 2] = px.b;
    }
  }
  return out;
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
  Raster raster;
  raster.width = image.width;
  raster.height = image.height;
  raster.channels = 3;
  raster.bit_depth = 8;
  raster.samples.assign(image.pixels.begin(), image.pixels.end());
  detail::atomic_write(path, [&](const std::filesystem::path& tmp) { detail::encode_png(raster, tmp); });
}

void render_overlay(const std::optional<GrayImage>& micrograph, const LabelMask& mask, const TestCircle& circle,
                    const std::map<LabelId, GrainClass>& classification, const OverlayStyle& style,
                    const std::filesystem::path& path) {
  write_rgb_png(compose_overlay(micrograph, mask, circle, classification, style), path);
}

}  // namespace grainsize
