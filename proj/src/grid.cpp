#include "gsr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "gsr/error.hpp"

namespace gsr {
namespace {

void require_positive_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::InvalidArgument, "image dimensions must be positive, got " +
                                         std::to_string(width) + "x" + std::to_string(height));
  }
}

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

PlanarImage::PlanarImage(int width, int height, double fill) : width_(width), height_(height) {
  require_positive_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

PlanarImage::PlanarImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  require_positive_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorCode::DimensionMismatch, "data length " + std::to_string(data_.size()) +
                                           " does not match " + dims(width, height));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    fail(ErrorCode::InvalidArgument, "image data must be finite");
  }
}

PlanarImage PlanarImage::delta(int width, int height, long x, long y) {
  PlanarImage img(width, height);
  img(static_cast<int>(detail::wrap(x, width)), static_cast<int>(detail::wrap(y, height))) = 1.0;
  return img;
}

PlanarImage& PlanarImage::operator+=(const PlanarImage& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

PlanarImage& PlanarImage::operator-=(const PlanarImage& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

PlanarImage& PlanarImage::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

PlanarImage& PlanarImage::operator+=(double s) {
  for (double& v : data_) v += s;
  return *this;
}

PlanarImage operator+(PlanarImage a, const PlanarImage& b) { return a += b; }
PlanarImage operator-(PlanarImage a, const PlanarImage& b) { return a -= b; }
PlanarImage operator*(PlanarImage a, double s) { return a *= s; }
PlanarImage operator*(double s, PlanarImage a) { return a *= s; }
PlanarImage operator+(PlanarImage a, double s) { return a += s; }
PlanarImage operator-(PlanarImage a, double s) { return a -= s; }

double sum(const PlanarImage& u) {
  double s = 0.0;
  for (double v : u.data()) s += v;
  return s;
}

double mean(const PlanarImage& u) { return sum(u) / static_cast<double>(u.size()); }

double dot(const PlanarImage& u, const PlanarImage& v) {
  require_same_shape(u, v, "dot");
  double s = 0.0;
  auto a = u.data();
  auto b = v.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const PlanarImage& u) { return std::sqrt(dot(u, u)); }

double norm1(const PlanarImage& u) {
  double s = 0.0;
  for (double v : u.data()) s += std::abs(v);
  return s;
}

double max_abs(const PlanarImage& u) {
  double m = 0.0;
  for (double v : u.data()) m = std::max(m, std::abs(v));
  return m;
}

Spectrum::Spectrum(int width, int height, Complex fill) : width_(width), height_(height) {
  require_positive_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Spectrum& Spectrum::operator*=(const Spectrum& other) {
  if (!same_shape(other)) {
    fail(ErrorCode::DimensionMismatch, "spectrum product " + dims(width_, height_) + " vs " +
                                           dims(other.width_, other.height_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= other.data_[i];
  return *this;
}

Spectrum operator*(Spectrum a, const Spectrum& b) { return a *= b; }

Spectrum conj(Spectrum s) {
  for (Complex& c : s.data()) c = std::conj(c);
  return s;
}

double max_modulus(const Spectrum& s) {
  double m = 0.0;
  for (Complex c : s.data()) m = std::max(m, std::abs(c));
  return m;
}

double dot(const Channels& u, const Channels& v) {
  require_same_shape(u, v, "dot");
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) s += dot(u[c], v[c]);
  return s;
}

double norm2(const Channels& u) { return std::sqrt(dot(u, u)); }

Channels operator-(const Channels& a, const Channels& b) {
  require_same_shape(a, b, "operator-");
  Channels out = a;
  for (std::size_t c = 0; c < a.size(); ++c) out[c] -= b[c];
  return out;
}

Channels operator+(const Channels& a, const Channels& b) {
  require_same_shape(a, b, "operator+");
  Channels out = a;
  for (std::size_t c = 0; c < a.size(); ++c) out[c] += b[c];
  return out;
}

void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* context) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::DimensionMismatch, std::string(context) + ": " + dims(a.width(), a.height()) +
                                           " vs " + dims(b.width(), b.height()));
  }
}

void require_same_shape(const Channels& a, const Channels& b, const char* context) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch, std::string(context) + ": " + std::to_string(a.size()) +
                                           " vs " + std::to_string(b.size()) + " channels");
  }
  for (std::size_t c = 0; c < a.size(); ++c) require_same_shape(a[c], b[c], context);
}

Spectrum dft2(const PlanarImage& u) {
  std::vector<Complex> in(u.data().begin(), u.data().end());
  Spectrum out(u.width(), u.height());
  detail::fft2_forward(u.width(), u.height(), in.data(), out.data().data());
  return out;
}

RealInverse idft2_checked(const Spectrum& s) {
  std::vector<Complex> out(s.size());
  detail::fft2_backward(s.width(), s.height(), s.data().data(), out.data());
  const double scale = 1.0 / static_cast<double>(s.size());
  std::vector<double> re(s.size());
  double real_sq = 0.0;
  double imag_sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    re[i] = out[i].real() * scale;
    const double im = out[i].imag() * scale;
    real_sq += re[i] * re[i];
    imag_sq += im * im;
  }
  RealInverse result;
  result.image = PlanarImage(s.width(), s.height(), std::move(re));
  if (imag_sq > 0.0) {
    result.residue_discarded = true;
    result.imaginary_residue =
        real_sq > 0.0 ? std::sqrt(imag_sq / real_sq) : std::numeric_limits<double>::infinity();
  }
  return result;
}

PlanarImage idft2(const Spectrum& s) {
  RealInverse r = idft2_checked(s);
  if (r.imaginary_residue > kHermitianTolerance) {
    fail(ErrorCode::NonHermitianSpectrum,
         "imaginary residue " + std::to_string(r.imaginary_residue) + " exceeds tolerance");
  }
  return std::move(r.image);
}

PlanarImage circular_convolve(const PlanarImage& u, const PlanarImage& v) {
  require_same_shape(u, v, "circular_convolve");
  return idft2(dft2(u) * dft2(v));
}

PlanarImage convolve_with_spectrum(const PlanarImage& u, const Spectrum& v_hat) {
  if (u.width() != v_hat.width() || u.height() != v_hat.height()) {
    fail(ErrorCode::DimensionMismatch, "convolve_with_spectrum: " + dims(u.width(), u.height()) +
                                           " vs " + dims(v_hat.width(), v_hat.height()));
  }
  return idft2(dft2(u) * v_hat);
}

PlanarImage flip(const PlanarImage& u) {
  PlanarImage out(u.width(), u.height());
  for (int y = 0; y < u.height(); ++y) {
    for (int x = 0; x < u.width(); ++x) out(x, y) = u.at(-static_cast<long>(x), -static_cast<long>(y));
  }
  return out;
}

void require_stride_divides(int width, int height, int r) {
  if (r < 1 || width % r != 0 || height % r != 0) {
    fail(ErrorCode::StrideDoesNotDivide,
         "stride " + std::to_string(r) + " does not divide " + dims(width, height));
  }
}

PlanarImage subsample(const PlanarImage& u, int r) {
  require_stride_divides(u.width(), u.height(), r);
  PlanarImage out(u.width() / r, u.height() / r);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = u(r * x, r * y);
  }
  return out;
}

PlanarImage upsample_adjoint(const PlanarImage& v, int r, int width, int height) {
  require_stride_divides(width, height, r);
  if (v.width() * r != width || v.height() * r != height) {
    fail(ErrorCode::DimensionMismatch, "upsample_adjoint: LR " + dims(v.width(), v.height()) +
                                           " with stride " + std::to_string(r) + " vs HR " +
                                           dims(width, height));
  }
  PlanarImage out(width, height);
  for (int y = 0; y < v.height(); ++y) {
    for (int x = 0; x < v.width(); ++x) out(r * x, r * y) = v(x, y);
  }
  return out;
}

Spectrum fold_spectrum(const Spectrum& hr, int r) {
  require_stride_divides(hr.width(), hr.height(), r);
  const int lw = hr.width() / r;
  const int lh = hr.height() / r;
  Spectrum out(lw, lh);
  const double w = 1.0 / (static_cast<double>(r) * r);
  for (int b = 0; b < r; ++b) {
    for (int y = 0; y < lh; ++y) {
      for (int a = 0; a < r; ++a) {
        for (int x = 0; x < lw; ++x) out(x, y) += hr(x + a * lw, y + b * lh);
      }
    }
  }
  for (Complex& c : out.data()) c *= w;
  return out;
}

Spectrum periodize_spectrum(const Spectrum& lr, int r) {
  if (r < 1) fail(ErrorCode::StrideDoesNotDivide, "stride must be positive");
  Spectrum out(lr.width() * r, lr.height() * r);
  for (int y = 0; y < out.height(); ++y) {
    const int ly = y % lr.height();
    for (int x = 0; x < out.width(); ++x) out(x, y) = lr(x % lr.width(), ly);
  }
  return out;
}

}  // namespace gsr
