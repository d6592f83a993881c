#pragma once

// 8-bit PNG previews, lossless 32-bit PFM, and the kernel text format.
// Concurrent writes to one path are undefined; distinct paths are safe.

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "gsr/grid.hpp"

namespace gsr {

enum class ImageFormat { Png8, Pfm };

/// From the extension (.png / .pfm, case-insensitive); UnsupportedFormat otherwise.
ImageFormat format_from_path(const std::filesystem::path& path);

struct RasterImage {
  Channels planes;
  /// 255 for PNG, |scale| from the PFM header.
  double value_scale = 1.0;
  ImageFormat format = ImageFormat::Pfm;
};

RasterImage read_image(const std::filesystem::path& path);
void write_image(const Channels& planes, const std::filesystem::path& path, ImageFormat format,
                 double peak = 255.0);

RasterImage read_pfm(const std::filesystem::path& path);
/// Values are stored as 32-bit floats, scale -1.0, rows bottom to top.
void write_pfm(const Channels& planes, const std::filesystem::path& path);

RasterImage read_png(const std::filesystem::path& path);
void write_png(const Channels& planes, const std::filesystem::path& path, double peak = 255.0);

/// clamp(v, 0, peak) * 255 / peak rounded half away from zero.
std::uint8_t quantize(double v, double peak);

struct KernelTaps {
  PlanarImage taps;  ///< K rows (height) by L columns (width)
  int center_row = 0;
  int center_col = 0;
};

/// Line 1 "K L cy cx", then K lines of L floats.
KernelTaps parse_kernel(std::string_view text);
KernelTaps read_kernel(const std::filesystem::path& path);

/// log(1 + |s|) with the zero frequency moved to the centre, scaled to [0, 255].
PlanarImage spectrum_visual(const Spectrum& s);
void write_spectrum_png(const Spectrum& s, const std::filesystem::path& path);

}  // namespace gsr
