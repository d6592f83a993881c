#pragma once

// Image quality metrics and second-order analysis of the sampler: the
// closed-form MSE decomposition and the r x r cyclostationary variance map.

#include <optional>
#include <string>
#include <vector>

#include "gsr/adsn.hpp"
#include "gsr/degradation.hpp"
#include "gsr/grid.hpp"
#include "gsr/kriging.hpp"

namespace gsr {

inline constexpr double kDefaultPeak = 255.0;

/// Mean over pixels (and channels) of the squared difference.
double mse(const PlanarImage& u, const PlanarImage& v);
double mse(const Channels& u, const Channels& v);

/// 10 log10(peak^2 / mse), +inf when mse == 0.
double psnr(const PlanarImage& u, const PlanarImage& v, double peak = kDefaultPeak);
double psnr(const Channels& u, const Channels& v, double peak = kDefaultPeak);

/// psnr(A u_sr, u_lr).
double lr_psnr(const Channels& u_sr, const Channels& u_lr, const DegradationOperator& A,
               double peak = kDefaultPeak);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double peak = kDefaultPeak;

  void validate() const;
};

/// Gaussian-windowed SSIM averaged over the periodic domain. Windows wider
/// than the image wrap around and accumulate onto the same pixels.
double ssim(const PlanarImage& u, const PlanarImage& v, const SsimParams& params = {});
/// Channel average.
double ssim(const Channels& u, const Channels& v, const SsimParams& params = {});

struct ChannelMetrics {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct MetricsReport {
  double peak = kDefaultPeak;
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lr_psnr;
  std::vector<ChannelMetrics> per_channel;

  /// key=value lines; infinities print as "inf".
  std::string to_text() const;
  /// Flat JSON object; infinities become null.
  std::string to_json() const;
};

/// Metrics of `image` against `reference`; lr_psnr is filled when an LR
/// observation and its operator are given.
MetricsReport compute_metrics(const Channels& image, const Channels& reference, double peak,
                              const Channels* u_lr = nullptr, const DegradationOperator* A = nullptr);

enum class VarianceMode { Theoretical, Empirical };

struct VarianceMap {
  PlanarImage total;      ///< summed over channels
  Channels per_channel;
  VarianceMode mode = VarianceMode::Theoretical;
  int sample_count = 0;   ///< empirical only
};

/// Exact per-pixel variance of sr_sample with shared noise: for each of the
/// r^2 phases p, ||C_t^T (I - A^T Lambda) delta_{x_p}||^2 with x_p the phase
/// representative in [0, r)^2. Exactly r-periodic.
VarianceMap theoretical_variance_map(const AdsnModel& model, const DegradationOperator& A,
                                     const KrigingKernel& k);

/// Unbiased per-pixel variance (n - 1 denominator). Throws
/// InsufficientSamples below two samples.
VarianceMap empirical_variance_map(const std::vector<Channels>& samples);

struct MseDecomposition {
  double kriging_mse = 0.0;  ///< ||u_hr - kriging component||^2
  double trace_term = 0.0;   ///< Tr[(I - Lambda^T A) Gamma (I - Lambda^T A)^T]
  double expected_mse = 0.0;
  /// False when u_lr differs from A u_hr by more than 1e-9 relative.
  bool lr_consistent = true;
};

/// E||U_HR - X_SR||^2 = ||U_HR - kriging||^2 + trace term, summed over pixels
/// and channels (not averaged).
MseDecomposition mse_decomposition(const AdsnModel& model, const DegradationOperator& A,
                                   const KrigingKernel& k, const Channels& u_hr,
                                   const Channels& u_lr);

}  // namespace gsr
