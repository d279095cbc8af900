#include "codec.hpp"

#include <array>
#include <bit>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>

#include <png.h>
#include <tiffio.h>

#include "grainsize/error.hpp"

namespace grainsize::detail {
namespace {

constexpr bool kLittleEndian = std::endian::native == std::endian::little;

void check_dimensions(long width, long height, const ReadOptions& options, const std::filesystem::path& path) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": image has no pixels");
  }
  if (width > options.max_side || height > options.max_side) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + std::to_string(width) + "x" +
                                                  std::to_string(height) + " exceeds the " +
                                                  std::to_string(options.max_side) + " px side limit");
  }
}

// ---- TIFF -----------------------------------------------------------------

void silence_libtiff() {
  static std::once_flag once;
  std::call_once(once, [] {
    TIFFSetErrorHandler(nullptr);
    TIFFSetWarningHandler(nullptr);
  });
}

struct TiffCloser {
  void operator()(TIFF* tif) const { TIFFClose(tif); }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

template <typename T>
T tiff_field(TIFF* tif, ttag_t tag, T fallback) {
  T value = fallback;
  if (TIFFGetFieldDefaulted(tif, tag, &value) != 1) return fallback;
  return value;
}

// Copies one decoded block (strip row or tile) of a single plane into the raster.
void store_samples(Raster& out, const unsigned char* src, int x0, int y0, int block_w, int block_h,
                   int samples_in_block, int channel_offset) {
  const int bytes = out.bit_depth / 8;
  for (int by = 0; by < block_h; ++by) {
    const int y = y0 + by;
    if (y >= out.height) break;
    for (int bx = 0; bx < block_w; ++bx) {
      const int x = x0 + bx;
      if (x >= out.width) break;
      for (int s = 0; s < samples_in_block; ++s) {
        const std::size_t src_index = (static_cast<std::size_t>(by) * block_w + bx) * samples_in_block + s;
        std::uint16_t v;
        if (bytes == 1) {
          v = src[src_index];
        } else {
          std::memcpy(&v, src + src_index * 2, 2);
        }
        out.samples[static_cast<std::size_t>(y) * out.row_stride() + static_cast<std::size_t>(x) * out.channels +
                    channel_offset + s] = v;
      }
    }
  }
}

}  // namespace

Raster decode_tiff(const std::filesystem::path& path, const ReadOptions& options) {
  silence_libtiff();
  TiffPtr tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) throw Error(ErrorCode::Io, "cannot open TIFF " + path.string());
  TIFF* t = tif.get();

  std::uint32_t width = 0;
  std::uint32_t height = 0;
  TIFFGetField(t, TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(t, TIFFTAG_IMAGELENGTH, &height);
  const auto spp = tiff_field<std::uint16_t>(t, TIFFTAG_SAMPLESPERPIXEL, 1);
  const auto bps = tiff_field<std::uint16_t>(t, TIFFTAG_BITSPERSAMPLE, 1);
  const auto format = tiff_field<std::uint16_t>(t, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
  const auto planar = tiff_field<std::uint16_t>(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  const auto photometric = tiff_field<std::uint16_t>(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);

  if (format != SAMPLEFORMAT_UINT) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": only unsigned integer samples are supported");
  }
  if (bps != 8 && bps != 16) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + std::to_string(bps) + "-bit samples unsupported");
  }
  if (spp < 1 || spp > 4) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + std::to_string(spp) + " samples per pixel");
  }
  if (photometric == PHOTOMETRIC_PALETTE) {
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": palette TIFFs are unsupported");
  }
  check_dimensions(width, height, options, path);

  Raster out;
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.channels = spp;
  out.bit_depth = bps;
  out.samples.assign(out.row_stride() * out.height, 0);

  const int planes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
  const int samples_per_block = planar == PLANARCONFIG_SEPARATE ? 1 : spp;

  if (TIFFIsTiled(t)) {
    std::uint32_t tw = 0;
    std::uint32_t th = 0;
    TIFFGetField(t, TIFFTAG_TILEWIDTH, &tw);
    TIFFGetField(t, TIFFTAG_TILELENGTH, &th);
    std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFTileSize(t)));
    for (int plane = 0; plane < planes; ++plane) {
      for (std::uint32_t y = 0; y < height; y += th) {
        for (std::uint32_t x = 0; x < width; x += tw) {
          if (TIFFReadTile(t, buf.data(), x, y, 0, static_cast<std::uint16_t>(plane)) < 0) {
            throw Error(ErrorCode::Io, path.string() + ": failed to decode tile");
          }
          store_samples(out, buf.data(), static_cast<int>(x), static_cast<int>(y), static_cast<int>(tw),
                        static_cast<int>(th), samples_per_block, plane);
        }
      }
    }
  } else {
    std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFScanlineSize(t)));
    for (int plane = 0; plane < planes; ++plane) {
      for (std::uint32_t y = 0; y < height; ++y) {
        if (TIFFReadScanline(t, buf.data(), y, static_cast<std::uint16_t>(plane)) < 0) {
          throw Error(ErrorCode::Io, path.string() + ": failed to decode row " + std::to_string(y));
        }
        store_samples(out, buf.data(), 0, static_cast<int>(y), out.width, 1, samples_per_block, plane);
      }
    }
  }
  return out;
}

void encode_tiff(const Raster& raster, const std::filesystem::path& path, bool deflate) {
  silence_libtiff();
  if (raster.width <= 0 || raster.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot write an image without pixels");
  }
  TiffPtr tif(TIFFOpen(path.c_str(), "w"));
  if (!tif) throw Error(ErrorCode::Io, "cannot create TIFF " + path.string());
  TIFF* t = tif.get();
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(raster.width));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(raster.height));
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(raster.channels));
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(raster.bit_depth));
  TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, raster.channels >= 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
  if (raster.channels == 2 || raster.channels == 4) {
    const std::uint16_t extra = EXTRASAMPLE_UNASSALPHA;
    TIFFSetField(t, TIFFTAG_EXTRASAMPLES, 1, &extra);
  }
  TIFFSetField(t, TIFFTAG_COMPRESSION, deflate ? COMPRESSION_ADOBE_DEFLATE : COMPRESSION_NONE);
  TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(raster.height));

  const int bytes = raster.bit_depth / 8;
  std::vector<unsigned char> buf(raster.samples.size() * bytes);
  for (std::size_t i = 0; i < raster.samples.size(); ++i) {
    if (bytes == 1) {
      buf[i] = static_cast<unsigned char>(raster.samples[i]);
    } else {
      std::memcpy(buf.data() + 2 * i, &raster.samples[i], 2);
    }
  }
  if (TIFFWriteEncodedStrip(t, 0, buf.data(), static_cast<tmsize_t>(buf.size())) < 0) {
    throw Error(ErrorCode::Io, "failed to write TIFF " + path.string());
  }
  if (!TIFFWriteDirectory(t)) throw Error(ErrorCode::Io, "failed to finish TIFF " + path.string());
}

// ---- PNG ------------------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngError {
  std::array<char, 256> message{};
};

[[noreturn]] void png_error_cb(png_structp png, png_const_charp msg) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message.data(), err->message.size(), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

// State shared across setjmp; lives outside the function frame that calls setjmp.
struct PngReadJob {
  std::FILE* file = nullptr;
  const ReadOptions* options = nullptr;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;
  bool too_large = false;
  bool palette = false;
  std::vector<unsigned char> bytes;
  std::vector<png_bytep> rows;
  PngError error;
};

bool run_png_read(PngReadJob& job) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &job.error, png_error_cb, png_warning_cb);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, job.file);
  png_read_info(png, info);
  job.width = png_get_image_width(png, info);
  job.height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  if (job.width > static_cast<png_uint_32>(job.options->max_side) ||
      job.height > static_cast<png_uint_32>(job.options->max_side)) {
    job.too_large = true;
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    job.palette = true;
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_bit_depth(png, info) == 16 && kLittleEndian) png_set_swap(png);
  png_read_update_info(png, info);
  job.bit_depth = png_get_bit_depth(png, info);
  job.channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  job.bytes.resize(rowbytes * job.height);
  job.rows.resize(job.height);
  for (png_uint_32 y = 0; y < job.height; ++y) job.rows[y] = job.bytes.data() + y * rowbytes;
  png_read_image(png, job.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct PngWriteJob {
  std::FILE* file = nullptr;
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int color_type = PNG_COLOR_TYPE_GRAY;
  std::vector<png_bytep> rows;
  PngError error;
};

bool run_png_write(PngWriteJob& job) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &job.error, png_error_cb, png_warning_cb);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, job.file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(job.width), static_cast<png_uint_32>(job.height), job.bit_depth,
               job.color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (job.bit_depth == 16 && kLittleEndian) png_set_swap(png);
  png_write_image(png, job.rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

Raster decode_png(const std::filesystem::path& path, const ReadOptions& options, bool* from_palette) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::Io, "cannot open PNG " + path.string());
  PngReadJob job;
  job.file = file.get();
  job.options = &options;
  if (!run_png_read(job)) {
    throw Error(ErrorCode::Io, path.string() + ": " + std::string(job.error.message.data()));
  }
  check_dimensions(job.width, job.height, options, path);

  Raster out;
  out.width = static_cast<int>(job.width);
  out.height = static_cast<int>(job.height);
  out.channels = job.channels;
  out.bit_depth = job.bit_depth;
  out.samples.resize(out.row_stride() * out.height);
  if (job.bit_depth == 16) {
    for (std::size_t i = 0; i < out.samples.size(); ++i) std::memcpy(&out.samples[i], job.bytes.data() + 2 * i, 2);
  } else {
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = job.bytes[i];
  }
  if (from_palette != nullptr) *from_palette = job.palette;
  return out;
}

void encode_png(const Raster& raster, const std::filesystem::path& path) {
  if (raster.width <= 0 || raster.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot write an image without pixels");
  }
  int color_type = PNG_COLOR_TYPE_GRAY;
  switch (raster.channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default: throw Error(ErrorCode::InvalidArgument, "PNG supports 1 to 4 channels");
  }
  if (raster.bit_depth != 8 && raster.bit_depth != 16) {
    throw Error(ErrorCode::InvalidArgument, "PNG output supports 8 or 16 bits per sample");
  }
  const int bytes = raster.bit_depth / 8;
  const std::size_t rowbytes = raster.row_stride() * bytes;
  std::vector<unsigned char> buf(rowbytes * raster.height);
  for (std::size_t i = 0; i < raster.samples.size(); ++i) {
    if (bytes == 1) {
      buf[i] = static_cast<unsigned char>(raster.samples[i]);
    } else {
      std::memcpy(buf.data() + 2 * i, &raster.samples[i], 2);
    }
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::Io, "cannot create PNG " + path.string());
  PngWriteJob job;
  job.file = file.get();
  job.width = raster.width;
  job.height = raster.height;
  job.bit_depth = raster.bit_depth;
  job.color_type = color_type;
  job.rows.resize(raster.height);
  for (int y = 0; y < raster.height; ++y) job.rows[y] = buf.data() + y * rowbytes;
  if (!run_png_write(job)) {
    throw Error(ErrorCode::Io, path.string() + ": " + std::string(job.error.message.data()));
  }
  if (std::fflush(file.get()) != 0) throw Error(ErrorCode::Io, "failed to flush " + path.string());
}

ImageFormat sniff_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::array<unsigned char, 8> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const auto got = in.gcount();
  static constexpr std::array<unsigned char, 8> kPng{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got == 8 && magic == kPng) return ImageFormat::Png;
  if (got >= 4 && ((magic[0] == 'I' && magic[1] == 'I' && magic[2] == 42 && magic[3] == 0) ||
                   (magic[0] == 'M' && magic[1] == 'M' && magic[2] == 0 && magic[3] == 42))) {
    return ImageFormat::Tiff;
  }
  throw Error(ErrorCode::UnsupportedFormat, path.string() + ": neither PNG nor TIFF");
}

}  // namespace grainsize::detail
