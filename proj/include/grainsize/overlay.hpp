#ifndef GRAINSIZE_OVERLAY_HPP
#define GRAINSIZE_OVERLAY_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>

#include "grainsize/jeffries.hpp"
#include "grainsize/raster.hpp"

namespace grainsize {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

struct OverlayStyle {
  Rgb inside_color{0, 200, 0};
  Rgb intercepted_color{255, 215, 0};
  Rgb circle_color{255, 0, 0};
  int circle_thickness = 2;
};

/// RGB canvas, interleaved, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Rgb at(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
};

/// Paints the classification and the test circle. With a micrograph the tints are blended
/// at 50% over it; without one, tinted grains are filled solid over a black canvas and
/// outside grains are drawn in neutral grey.
RgbImage compose_overlay(const std::optional<GrayImage>& micrograph, const LabelMask& mask,
                         const TestCircle& circle, const std::map<LabelId, GrainClass>& classification,
                         const OverlayStyle& style);

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);

void render_overlay(const std::optional<GrayImage>& micrograph, const LabelMask& mask,
                    const TestCircle& circle, const std::map<LabelId, GrainClass>& classification,
                    const OverlayStyle& style, const std::filesystem::path& path);

}  // namespace grainsize

#endif  // GRAINSIZE_OVERLAY_HPP
