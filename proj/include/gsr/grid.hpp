#pragma once

// Periodic raster algebra on Omega_{M,N} = [M] x [N].
//
// Images are stored row-major: pixel (x, y) with x in [width) and y in
// [height) lives at data[y * width + x]. Every index is reduced modulo the
// grid size, so images behave as periodic signals on Z^2.
//
// DFT convention: the forward transform is unnormalised,
//   U^(w) = sum_y U(y) exp(-2i pi w1 y1 / M) exp(-2i pi w2 y2 / N),
// and the inverse carries the 1/(MN) factor.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gsr {

using Complex = std::complex<double>;

namespace detail {

inline long wrap(long i, long n) {
  long m = i % n;
  return m < 0 ? m + n : m;
}

}  // namespace detail

/// Real-valued M x N periodic raster.
class PlanarImage {
 public:
  PlanarImage() = default;
  PlanarImage(int width, int height, double fill = 0.0);
  PlanarImage(int width, int height, std::vector<double> data);

  static PlanarImage delta(int width, int height, long x = 0, long y = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int x, int y) { return data_[index(x, y)]; }
  double operator()(int x, int y) const { return data_[index(x, y)]; }

  /// Periodic access: any integer coordinates.
  double at(long x, long y) const {
    return data_[index(static_cast<int>(detail::wrap(x, width_)),
                       static_cast<int>(detail::wrap(y, height_)))];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const PlanarImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  PlanarImage& operator+=(const PlanarImage& other);
  PlanarImage& operator-=(const PlanarImage& other);
  PlanarImage& operator*=(double s);
  PlanarImage& operator+=(double s);
  PlanarImage& operator-=(double s) { return *this += -s; }

  friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

PlanarImage operator+(PlanarImage a, const PlanarImage& b);
PlanarImage operator-(PlanarImage a, const PlanarImage& b);
PlanarImage operator*(PlanarImage a, double s);
PlanarImage operator*(double s, PlanarImage a);
PlanarImage operator+(PlanarImage a, double s);
PlanarImage operator-(PlanarImage a, double s);

double sum(const PlanarImage& u);
double mean(const PlanarImage& u);
double dot(const PlanarImage& u, const PlanarImage& v);
double norm2(const PlanarImage& u);
double norm1(const PlanarImage& u);
double max_abs(const PlanarImage& u);

/// DFT coefficients of an M x N raster, same layout as PlanarImage.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int width, int height, Complex fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex& operator()(int x, int y) { return data_[index(x, y)]; }
  Complex operator()(int x, int y) const { return data_[index(x, y)]; }
  Complex at(long x, long y) const {
    return data_[index(static_cast<int>(detail::wrap(x, width_)),
                       static_cast<int>(detail::wrap(y, height_)))];
  }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  bool same_shape(const Spectrum& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  Spectrum& operator*=(const Spectrum& other);

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Complex> data_;
};

Spectrum operator*(Spectrum a, const Spectrum& b);
Spectrum conj(Spectrum s);
double max_modulus(const Spectrum& s);

/// One plane per colour channel (1 for grayscale, 3 for RGB).
using Channels = std::vector<PlanarImage>;

double dot(const Channels& u, const Channels& v);
double norm2(const Channels& u);
Channels operator-(const Channels& a, const Channels& b);
Channels operator+(const Channels& a, const Channels& b);

void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* context);
void require_same_shape(const Channels& a, const Channels& b, const char* context);

Spectrum dft2(const PlanarImage& u);

/// Inverse DFT of a (nominally Hermitian) spectrum. The discarded imaginary
/// part is reported relative to the L2 norm of the real output.
struct RealInverse {
  PlanarImage image;
  double imaginary_residue = 0.0;
  bool residue_discarded = false;
};

inline constexpr double kHermitianTolerance = 1e-9;

RealInverse idft2_checked(const Spectrum& s);

/// Throws NonHermitianSpectrum when the imaginary residue exceeds
/// kHermitianTolerance.
PlanarImage idft2(const Spectrum& s);

PlanarImage circular_convolve(const PlanarImage& u, const PlanarImage& v);

/// u * v where v is given by its spectrum; bit-identical to
/// circular_convolve(u, v) when v_hat == dft2(v).
PlanarImage convolve_with_spectrum(const PlanarImage& u, const Spectrum& v_hat);

/// u(-x) with periodic index reduction.
PlanarImage flip(const PlanarImage& u);

/// (S u)(x) = u(r x).
PlanarImage subsample(const PlanarImage& u, int r);

/// (S^T v)(r x) = v(x), zero elsewhere, on a width x height grid.
PlanarImage upsample_adjoint(const PlanarImage& v, int r, int width, int height);

/// DFT of subsample(u, r) from the DFT of u: the r^2 aliases of each LR
/// frequency averaged with weight 1/r^2.
Spectrum fold_spectrum(const Spectrum& hr, int r);

/// DFT of upsample_adjoint(v, r, ...) from the DFT of v: the LR spectrum
/// tiled r x r times over the HR grid.
Spectrum periodize_spectrum(const Spectrum& lr, int r);

void require_stride_divides(int width, int height, int r);

}  // namespace gsr
