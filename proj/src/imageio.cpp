#include "gsr/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void require_planes(const Channels& planes, const char* context) {
  if (planes.size() != 1 && planes.size() != 3) {
    fail(ErrorCode::InvalidArgument, std::string(context) + ": expected 1 or 3 planes, got " +
                                         std::to_string(planes.size()));
  }
  for (const auto& p : planes) require_same_shape(planes[0], p, context);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "read failed for " + path.string());
  return buf.str();
}

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

// Next whitespace-delimited header token; skips leading whitespace.
std::string_view next_token(std::string_view data, std::size_t& pos) {
  while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  if (token.empty()) return false;
  const char* first = token.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

ImageFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".png") return ImageFormat::Png8;
  if (ext == ".pfm") return ImageFormat::Pfm;
  fail(ErrorCode::UnsupportedFormat, "unknown image extension '" + ext + "' for " + path.string());
}

RasterImage read_image(const std::filesystem::path& path) {
  return format_from_path(path) == ImageFormat::Png8 ? read_png(path) : read_pfm(path);
}

void write_image(const Channels& planes, const std::filesystem::path& path, ImageFormat format,
                 double peak) {
  if (format == ImageFormat::Png8) {
    write_png(planes, path, peak);
  } else {
    write_pfm(planes, path);
  }
}

RasterImage read_pfm(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  const std::string_view view(data);
  std::size_t pos = 0;
  const std::string_view magic = next_token(view, pos);
  std::size_t channels = 0;
  if (magic == "Pf") {
    channels = 1;
  } else if (magic == "PF") {
    channels = 3;
  } else {
    fail(ErrorCode::CorruptHeader, path.string() + ": not a PFM file");
  }
  int width = 0;
  int height = 0;
  double scale = 0.0;
  if (!parse_number(next_token(view, pos), width) || !parse_number(next_token(view, pos), height) ||
      !parse_number(next_token(view, pos), scale)) {
    fail(ErrorCode::CorruptHeader, path.string() + ": malformed PFM header");
  }
  if (width < 1 || height < 1 || scale == 0.0 || !std::isfinite(scale)) {
    fail(ErrorCode::CorruptHeader, path.string() + ": invalid PFM dimensions or scale");
  }
  // exactly one whitespace byte separates the header from the raster
  if (pos >= view.size() || !std::isspace(static_cast<unsigned char>(view[pos]))) {
    fail(ErrorCode::CorruptHeader, path.string() + ": truncated PFM header");
  }
  ++pos;
  const std::size_t count =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels;
  if (view.size() - pos < count * 4) {
    fail(ErrorCode::CorruptHeader, path.string() + ": PFM raster is truncated");
  }
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);

  std::vector<std::vector<double>> planes(channels, std::vector<double>(count / channels));
  const char* raster = view.data() + pos;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t src =
            (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                channels + c;
        std::uint32_t bits = 0;
        std::memcpy(&bits, raster + src * 4, 4);
        if (swap) bits = byteswap32(bits);
        const float f = std::bit_cast<float>(bits);
        if (!std::isfinite(f)) fail(ErrorCode::CorruptHeader, path.string() + ": non-finite PFM value");
        planes[c][static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)] = f;
      }
    }
  }
  RasterImage out;
  out.format = ImageFormat::Pfm;
  out.value_scale = std::abs(scale);
  for (auto& p : planes) out.planes.emplace_back(width, height, std::move(p));
  return out;
}

void write_pfm(const Channels& planes, const std::filesystem::path& path) {
  require_planes(planes, "write_pfm");
  const int width = planes[0].width();
  const int height = planes[0].height();
  std::string header = (planes.size() == 1 ? "Pf\n" : "PF\n") + std::to_string(width) + " " +
                       std::to_string(height) + "\n-1.0\n";
  std::vector<char> raster(planes[0].size() * planes.size() * 4);
  std::size_t k = 0;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      for (const auto& p : planes) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(p(x, y)));
        if constexpr (std::endian::native != std::endian::little) bits = byteswap32(bits);
        std::memcpy(raster.data() + k, &bits, 4);
        k += 4;
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot create " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::uint8_t quantize(double v, double peak) {
  const double clamped = std::clamp(v, 0.0, peak);
  return static_cast<std::uint8_t>(std::round(clamped * 255.0 / peak));
}

RasterImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!std::filesystem::exists(path)) fail(ErrorCode::IoError, "cannot open " + path.string());
  if (png_image_begin_read_from_file(&image, path.string().c_str()) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::CorruptHeader, path.string() + ": " + msg);
  }
  if ((image.format & PNG_FORMAT_FLAG_ALPHA) != 0) {
    png_image_free(&image);
    fail(ErrorCode::UnsupportedFormat, path.string() + ": PNG with alpha is not supported");
  }
  if ((image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    png_image_free(&image);
    fail(ErrorCode::UnsupportedFormat, path.string() + ": only 8-bit PNG is supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::CorruptHeader, path.string() + ": " + msg);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::vector<double>> planes(channels, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) planes[c][i] = buffer[i * channels + c];
  }
  RasterImage out;
  out.format = ImageFormat::Png8;
  out.value_scale = 255.0;
  for (auto& p : planes) out.planes.emplace_back(width, height, std::move(p));
  return out;
}

void write_png(const Channels& planes, const std::filesystem::path& path, double peak) {
  require_planes(planes, "write_png");
  if (!(peak > 0.0) || !std::isfinite(peak)) fail(ErrorCode::InvalidArgument, "peak must be > 0");
  const std::size_t channels = planes.size();
  const std::size_t n = planes[0].size();
  std::vector<png_byte> buffer(n * channels);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) buffer[i * channels + c] = quantize(planes[c].data()[i], peak);
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(planes[0].width());
  image.height = static_cast<png_uint_32>(planes[0].height());
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::IoError, path.string() + ": " + msg);
  }
}

KernelTaps parse_kernel(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() &&
         std::all_of(lines.back().begin(), lines.back().end(),
                     [](unsigned char c) { return std::isspace(c); })) {
    lines.pop_back();
  }
  auto tokens = [](std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (std::string_view t = next_token(line, pos); !t.empty(); t = next_token(line, pos)) out.push_back(t);
    return out;
  };
  if (lines.empty()) fail(ErrorCode::CorruptHeader, "kernel file is empty");
  const auto header = tokens(lines[0]);
  int rows = 0;
  int cols = 0;
  KernelTaps out{PlanarImage(1, 1), 0, 0};
  if (header.size() != 4 || !parse_number(header[0], rows) || !parse_number(header[1], cols) ||
      !parse_number(header[2], out.center_row) || !parse_number(header[3], out.center_col)) {
    fail(ErrorCode::CorruptHeader, "kernel header must be 'K L cy cx'");
  }
  if (rows < 1 || cols < 1) fail(ErrorCode::CorruptHeader, "kernel dimensions must be positive");
  if (out.center_row < 0 || out.center_row >= rows || out.center_col < 0 || out.center_col >= cols) {
    fail(ErrorCode::CorruptHeader, "kernel centre lies outside the taps");
  }
  if (lines.size() != static_cast<std::size_t>(rows) + 1) {
    fail(ErrorCode::CorruptHeader, "kernel has " + std::to_string(lines.size() - 1) +
                                       " rows, header says " + std::to_string(rows));
  }
  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    const auto row = tokens(lines[static_cast<std::size_t>(i) + 1]);
    if (row.size() != static_cast<std::size_t>(cols)) {
      fail(ErrorCode::CorruptHeader, "kernel row " + std::to_string(i) + " has " +
                                         std::to_string(row.size()) + " values, expected " +
                                         std::to_string(cols));
    }
    for (const auto t : row) {
      double v = 0.0;
      if (!parse_number(t, v) || !std::isfinite(v)) {
        fail(ErrorCode::CorruptHeader, "bad kernel value '" + std::string(t) + "'");
      }
      taps.push_back(v);
    }
  }
  out.taps = PlanarImage(cols, rows, std::move(taps));
  return out;
}

KernelTaps read_kernel(const std::filesystem::path& path) { return parse_kernel(read_file(path)); }

PlanarImage spectrum_visual(const Spectrum& s) {
  const int w = s.width();
  const int h = s.height();
  PlanarImage out(w, h);
  double hi = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = std::log1p(std::abs(s(x, y)));
      out((x + w / 2) % w, (y + h / 2) % h) = v;
      hi = std::max(hi, v);
    }
  }
  if (hi > 0.0) out *= 255.0 / hi;
  return out;
}

void write_spectrum_png(const Spectrum& s, const std::filesystem::path& path) {
  write_png({spectrum_visual(s)}, path, 255.0);
}

}  // namespace gsr
