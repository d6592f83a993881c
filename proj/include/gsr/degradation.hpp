#pragma once

#include "gsr/grid.hpp"

namespace gsr {

/// A = S C_c: periodic convolution by a unit-sum kernel c, then stride-r
/// subsampling.
class DegradationOperator {
 public:
  const PlanarImage& kernel() const noexcept { return kernel_; }
  const Spectrum& kernel_spectrum() const noexcept { return kernel_spectrum_; }
  int stride() const noexcept { return stride_; }
  int hr_width() const noexcept { return kernel_.width(); }
  int hr_height() const noexcept { return kernel_.height(); }
  int lr_width() const noexcept { return kernel_.width() / stride_; }
  int lr_height() const noexcept { return kernel_.height() / stride_; }

  /// Set when a custom kernel had to be rescaled to sum to 1.
  bool renormalized() const noexcept { return renormalized_; }

  /// Kernel must be HR sized and sum to 1, stride must divide both sides.
  static DegradationOperator from_kernel(PlanarImage kernel, int stride, bool renormalized = false);

 private:
  DegradationOperator(PlanarImage kernel, int stride, bool renormalized);

  PlanarImage kernel_;
  Spectrum kernel_spectrum_;
  int stride_ = 1;
  bool renormalized_ = false;
};

/// Keys cubic convolution kernel; a = -1/2 gives the bicubic interpolant.
double keys_cubic(double s, double a = -0.5);

/// Antialiased separable bicubic zoom-out kernel:
/// c1(j) proportional to k((j - delta) / r) for |j - delta| < 2r,
/// delta = (r - 1) / 2, normalised to sum 1 and wrapped onto the grid.
DegradationOperator bicubic_operator(int width, int height, int r);

/// Taps (rows = height) embedded periodically with (center_row, center_col)
/// at the origin.
DegradationOperator custom_operator(const PlanarImage& taps, int width, int height, int r,
                                    int center_row, int center_col);

PlanarImage degrade(const DegradationOperator& A, const PlanarImage& u);
Channels degrade(const DegradationOperator& A, const Channels& u);

/// A^T v = flip(c) * S^T v.
PlanarImage degrade_adjoint(const DegradationOperator& A, const PlanarImage& v);
Channels degrade_adjoint(const DegradationOperator& A, const Channels& v);

}  // namespace gsr
