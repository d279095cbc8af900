#include "grainsize/mask_io.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "codec.hpp"
#include "fs_util.hpp"
#include "grainsize/error.hpp"

namespace grainsize {
namespace {

Raster decode_any(const std::filesystem::path& path, const ReadOptions& options, bool* from_palette) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, path.string() + ": no such file");
  switch (detail::sniff_format(path)) {
    case detail::ImageFormat::Png: return detail::decode_png(path, options, from_palette);
    case detail::ImageFormat::Tiff: return detail::decode_tiff(path, options);
  }
  throw Error(ErrorCode::UnsupportedFormat, path.string());
}

std::string lower_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

LabelMask read_label_mask(const std::filesystem::path& path, const ReadOptions& options) {
  bool palette = false;
  Raster raster = decode_any(path, options, &palette);
  if (palette || raster.channels != 1) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": label masks must have a single channel, found " +
                                                  std::to_string(raster.channels));
  }
  std::vector<LabelId> labels(raster.samples.begin(), raster.samples.end());
  return LabelMask(raster.width, raster.height, std::move(labels));
}

void write_label_mask(const LabelMask& mask, const std::filesystem::path& path) {
  const Raster raster = to_raster(mask);
  detail::atomic_write(path, [&](const std::filesystem::path& tmp) { detail::encode_tiff(raster, tmp, false); });
}

Raster read_raster(const std::filesystem::path& path, const ReadOptions& options) {
  return decode_any(path, options, nullptr);
}

void write_raster(const Raster& raster, const std::filesystem::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".png") {
    detail::atomic_write(path, [&](const std::filesystem::path& tmp) { detail::encode_png(raster, tmp); });
  } else if (ext == ".tif" || ext == ".tiff") {
    detail::atomic_write(path, [&](const std::filesystem::path& tmp) { detail::encode_tiff(raster, tmp, true); });
  } else {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": output must end in .png, .tif or .tiff");
  }
}

GrayImage read_gray_image(const std::filesystem::path& path, const ReadOptions& options) {
  const Raster raster = read_raster(path, options);
  if (raster.bit_depth != 8) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": expected 8-bit samples");
  }
  GrayImage out(raster.width, raster.height);
  auto dst = out.pixels();
  const std::size_t n = dst.size();
  const int c = raster.channels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* px = &raster.samples[i * c];
    if (c <= 2) {
      dst[i] = static_cast<std::uint8_t>(px[0]);
    } else {
      const double luma = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
      dst[i] = static_cast<std::uint8_t>(std::clamp(luma + 0.5, 0.0, 255.0));
    }
  }
  return out;
}

void write_gray_png(const GrayImage& image, const std::filesystem::path& path) {
  const Raster raster = to_raster(image);
  detail::atomic_write(path, [&](const std::filesystem::path& tmp) { detail::encode_png(raster, tmp); });
}

Raster to_raster(const GrayImage& image) {
  Raster r;
  r.width = image.width();
  r.height = image.height();
  r.channels = 1;
  r.bit_depth = 8;
  r.samples.assign(image.pixels().begin(), image.pixels().end());
  return r;
}

Raster to_raster(const LabelMask& mask) {
  Raster r;
  r.width = mask.width();
  r.height = mask.height();
  r.channels = 1;
  r.bit_depth = 16;
  r.samples.assign(mask.pixels().begin(), mask.pixels().end());
  return r;
}

}  // namespace grainsize
