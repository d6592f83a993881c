#include "gsr/degradation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {
namespace {

constexpr double kRenormalizeThreshold = 1e-6;
constexpr double kUnitSumTolerance = 1e-9;

void require_operator_grid(int width, int height, int r) {
  if (width < 2 || height < 2) {
    fail(ErrorCode::InvalidArgument, "operator grid must be at least 2x2");
  }
  require_stride_divides(width, height, r);
}

std::vector<double> bicubic_taps_1d(int n, int r) {
  std::vector<double> taps(static_cast<std::size_t>(n), 0.0);
  const double delta = (r - 1) / 2.0;
  const int lo = static_cast<int>(std::floor(delta - 2.0 * r));
  const int hi = static_cast<int>(std::ceil(delta + 2.0 * r));
  double total = 0.0;
  for (int j = lo; j <= hi; ++j) {
    const double offset = j - delta;
    if (std::abs(offset) >= 2.0 * r) continue;
    total += keys_cubic(offset / r);
  }
  for (int j = lo; j <= hi; ++j) {
    const double offset = j - delta;
    if (std::abs(offset) >= 2.0 * r) continue;
    taps[static_cast<std::size_t>(detail::wrap(j, n))] += keys_cubic(offset / r) / total;
  }
  return taps;
}

}  // namespace

DegradationOperator::DegradationOperator(PlanarImage kernel, int stride, bool renormalized)
    : kernel_(std::move(kernel)), stride_(stride), renormalized_(renormalized) {
  kernel_spectrum_ = dft2(kernel_);
}

DegradationOperator DegradationOperator::from_kernel(PlanarImage kernel, int stride,
                                                     bool renormalized) {
  require_operator_grid(kernel.width(), kernel.height(), stride);
  if (std::abs(sum(kernel) - 1.0) > kUnitSumTolerance) {
    fail(ErrorCode::InvalidArgument, "degradation kernel must sum to 1");
  }
  return DegradationOperator(std::move(kernel), stride, renormalized);
}

double keys_cubic(double s, double a) {
  const double x = std::abs(s);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

DegradationOperator bicubic_operator(int width, int height, int r) {
  require_operator_grid(width, height, r);
  const std::vector<double> cx = bicubic_taps_1d(width, r);
  const std::vector<double> cy = bicubic_taps_1d(height, r);
  PlanarImage kernel(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) kernel(x, y) = cx[x] * cy[y];
  }
  return DegradationOperator::from_kernel(std::move(kernel), r);
}

DegradationOperator custom_operator(const PlanarImage& taps, int width, int height, int r,
                                    int center_row, int center_col) {
  require_operator_grid(width, height, r);
  if (taps.width() > width || taps.height() > height) {
    fail(ErrorCode::KernelTooLarge, "kernel " + std::to_string(taps.height()) + "x" +
                                        std::to_string(taps.width()) + " (rows x cols) exceeds grid");
  }
  const double total = sum(taps);
  if (total == 0.0) fail(ErrorCode::InvalidArgument, "kernel taps sum to zero");
  PlanarImage kernel(width, height);
  for (int i = 0; i < taps.height(); ++i) {
    for (int j = 0; j < taps.width(); ++j) {
      const auto x = static_cast<int>(detail::wrap(j - center_col, width));
      const auto y = static_cast<int>(detail::wrap(i - center_row, height));
      kernel(x, y) += taps(j, i);
    }
  }
  const bool renormalized = std::abs(total - 1.0) > kRenormalizeThreshold;
  if (total != 1.0) kernel *= 1.0 / total;
  return DegradationOperator::from_kernel(std::move(kernel), r, renormalized);
}

PlanarImage degrade(const DegradationOperator& A, const PlanarImage& u) {
  if (u.width() != A.hr_width() || u.height() != A.hr_height()) {
    fail(ErrorCode::DimensionMismatch, "degrade: image does not match the operator grid");
  }
  return subsample(convolve_with_spectrum(u, A.kernel_spectrum()), A.stride());
}

Channels degrade(const DegradationOperator& A, const Channels& u) {
  Channels out;
  out.reserve(u.size());
  for (const auto& plane : u) out.push_back(degrade(A, plane));
  return out;
}

PlanarImage degrade_adjoint(const DegradationOperator& A, const PlanarImage& v) {
  if (v.width() != A.lr_width() || v.height() != A.lr_height()) {
    fail(ErrorCode::DimensionMismatch, "degrade_adjoint: image does not match the LR grid");
  }
  PlanarImage up = upsample_adjoint(v, A.stride(), A.hr_width(), A.hr_height());
  // F(flip(c)) = conj(F(c)) for a real kernel.
  return convolve_with_spectrum(up, conj(A.kernel_spectrum()));
}

Channels degrade_adjoint(const DegradationOperator& A, const Channels& v) {
  Channels out;
  out.reserve(v.size());
  for (const auto& plane : v) out.push_back(degrade_adjoint(A, plane));
  return out;
}

}  // namespace gsr
