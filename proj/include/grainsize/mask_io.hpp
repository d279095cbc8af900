#ifndef GRAINSIZE_MASK_IO_HPP
#define GRAINSIZE_MASK_IO_HPP

#include <filesystem>

#include "grainsize/raster.hpp"

namespace grainsize {

struct ReadOptions {
  // Inputs with either side above this are rejected before any pixel buffer is allocated.
  int max_side = 1 << 14;
};

/// Reads a single-channel 8- or 16-bit unsigned TIFF or PNG as instance labels.
/// 8-bit samples are widened; 16-bit samples are preserved bit-exactly.
LabelMask read_label_mask(const std::filesystem::path& path, const ReadOptions& options = {});

/// Writes a 16-bit single-channel, single-strip uncompressed TIFF.
void write_label_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Reads any 8/16-bit TIFF or PNG with 1, 2, 3 or 4 channels.
Raster read_raster(const std::filesystem::path& path, const ReadOptions& options = {});

/// Writes PNG for .png paths and TIFF (deflate) for .tif/.tiff paths.
void write_raster(const Raster& raster, const std::filesystem::path& path);

/// 8-bit grayscale view of an image file. Colour inputs are reduced with Rec.601 luma,
/// alpha is dropped, 16-bit inputs are rejected.
GrayImage read_gray_image(const std::filesystem::path& path, const ReadOptions& options = {});

void write_gray_png(const GrayImage& image, const std::filesystem::path& path);

Raster to_raster(const GrayImage& image);
Raster to_raster(const LabelMask& mask);

}  // namespace grainsize

#endif  // GRAINSIZE_MASK_IO_HPP
