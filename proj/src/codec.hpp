#ifndef GRAINSIZE_SRC_CODEC_HPP
#define GRAINSIZE_SRC_CODEC_HPP

#include <filesystem>

#include "grainsize/mask_io.hpp"

namespace grainsize::detail {

enum class ImageFormat { Png, Tiff };

/// Identifies the container by its magic bytes.
ImageFormat sniff_format(const std::filesystem::path& path);

Raster decode_tiff(const std::filesystem::path& path, const ReadOptions& options);
void encode_tiff(const Raster& raster, const std::filesystem::path& path, bool deflate);

/// Palette images are expanded to RGB; `from_palette` reports whether that happened.
Raster decode_png(const std::filesystem::path& path, const ReadOptions& options, bool* from_palette = nullptr);
void encode_png(const Raster& raster, const std::filesystem::path& path);

}  // namespace grainsize::detail

#endif  // GRAINSIZE_SRC_CODEC_HPP
