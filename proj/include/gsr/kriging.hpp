#pragma once

// Closed-form kriging for A = S C_c and Gamma = C_t C_t^T.
//
// A Gamma A^T is the LR convolution by kappa = S(t * t~ * c * c~), so its
// pseudo-inverse is the convolution by kappa^+ (frequency-wise inverse).
// Lambda^T = Gamma A^T (A Gamma A^T)^+ then reduces to
//   Lambda^T v = lambda * (S^T v),   lambda = t * t~ * c~ * S^T kappa^+.
// For RGB models each channel gets its own lambda_i (block-diagonal
// approximation); the innovation noise stays shared across channels.

#include <vector>

#include "gsr/adsn.hpp"
#include "gsr/degradation.hpp"
#include "gsr/grid.hpp"

namespace gsr {

inline constexpr double kDefaultPseudoInverseTolerance = 1e-12;

/// LR spectrum of kappa, computed by folding |t^|^2 |c^|^2 onto the LR grid.
Spectrum kappa_spectrum(const PlanarImage& t, const DegradationOperator& A);

/// kappa = S(t * t~ * c * c~) on the LR grid.
PlanarImage kappa(const PlanarImage& t, const DegradationOperator& A);

struct PseudoInverseKernel {
  PlanarImage kernel;
  Spectrum spectrum;
  int zeroed_frequencies = 0;
};

/// Frequency-wise pseudo-inverse of a spectrum: entries with
/// |s(w)| <= epsilon * max|s| map to 0, the rest to 1 / s(w).
/// Throws AllFrequenciesZeroed when max|s| == 0.
PseudoInverseKernel invert_spectrum(const Spectrum& s, double epsilon);

/// kappa^+ for a spatial LR kernel.
PseudoInverseKernel pseudo_inverse_kernel(const PlanarImage& kappa, double epsilon);
/// Per-channel kriging kernels, immutable once built. Build it once per
/// model; every further sample reuses it.
class KrigingKernel {
 public:
  std::size_t channels() const noexcept { return channels_.size(); }
  int stride() const noexcept { return stride_; }
  int hr_width() const noexcept { return hr_width_; }
  int hr_height() const noexcept { return hr_height_; }
  int lr_width() const noexcept { return hr_width_ / stride_; }
  int lr_height() const noexcept { return hr_height_ / stride_; }
  double tolerance() const noexcept { return tolerance_; }

  const Spectrum& lambda_spectrum(std::size_t c) const { return channels_.at(c).lambda_hat; }
  const Spectrum& kappa_spectrum(std::size_t c) const { return channels_.at(c).kappa_hat; }
  const Spectrum& kappa_pinv_spectrum(std::size_t c) const { return channels_.at(c).kappa_pinv_hat; }
  PlanarImage lambda(std::size_t c) const { return idft2(lambda_spectrum(c)); }

  /// LR frequencies where kappa^ was treated as zero.
  int zeroed_frequencies(std::size_t c) const { return channels_.at(c).zeroed; }
  int zeroed_frequencies() const;

  /// kappa identically zero (for instance t = 0): lambda is 0.
  bool degenerate(std::size_t c) const { return channels_.at(c).degenerate; }
  bool degenerate() const;

  /// max |lambda^|: a large value flags amplified frequencies.
  double max_lambda_modulus(std::size_t c) const { return max_modulus(lambda_spectrum(c)); }

 private:
  struct ChannelKernel {
    Spectrum lambda_hat;
    Spectrum kappa_hat;
    Spectrum kappa_pinv_hat;
    int zeroed = 0;
    bool degenerate = false;
  };

  KrigingKernel() = default;

  std::vector<ChannelKernel> channels_;
  int stride_ = 1;
  int hr_width_ = 0;
  int hr_height_ = 0;
  double tolerance_ = kDefaultPseudoInverseTolerance;

  friend KrigingKernel kriging_kernel(const AdsnModel&, const DegradationOperator&, double);
};

/// epsilon must lie in (0, 1).
KrigingKernel kriging_kernel(const AdsnModel& model, const DegradationOperator& A,
                             double epsilon = kDefaultPseudoInverseTolerance);

/// Lambda_c^T v = lambda_c * S^T v.
PlanarImage apply_kriging(const KrigingKernel& k, std::size_t channel, const PlanarImage& v);
Channels apply_kriging(const KrigingKernel& k, const Channels& v);

/// Lambda_c p = S(lambda~_c * p), the transpose of apply_kriging.
PlanarImage apply_kriging_transpose(const KrigingKernel& k, std::size_t channel,
                                    const PlanarImage& p);

/// kappa_c^+ * phi on the LR grid, i.e. (A Gamma_c A^T)^+ phi.
PlanarImage apply_kappa_pinv(const KrigingKernel& k, std::size_t channel, const PlanarImage& phi);
Channels apply_kappa_pinv(const KrigingKernel& k, const Channels& phi);

struct SrSample {
  Channels sample;
  /// m + Lambda^T (U_LR - m): deterministic given U_LR.
  Channels kriging_component;
  /// U~ - Lambda^T A U~ with U~_c = t_c * w: zero mean.
  Channels innovation_component;
  std::vector<double> mean;
  NoiseSeed seed;
  bool degenerate = false;
};

/// Conditional sample given U_LR (exact for grayscale, block-diagonal
/// approximation with shared noise for RGB). The per-channel mean is taken
/// from U_LR.
SrSample sr_sample(const AdsnModel& model, const KrigingKernel& k, const Channels& u_lr,
                   const DegradationOperator& A, NoiseSeed seed);
SrSample sr_sample(const AdsnModel& model, const Channels& u_lr, const DegradationOperator& A,
                   NoiseSeed seed, double epsilon = kDefaultPseudoInverseTolerance);

struct StabilityReport {
  double lhs = 0.0;             ///< ||Lambda^T A (t * w)||
  double bound_operator = 0.0;  ///< max|t^| ||w||
  double bound_l1 = 0.0;        ///< ||t||_1 ||w||

  bool holds(double relative_slack = 1e-9) const;
};

/// Grayscale only.
StabilityReport stability_check(const AdsnModel& model, const KrigingKernel& k,
                                const DegradationOperator& A, NoiseSeed seed);
StabilityReport stability_check(const AdsnModel& model, const DegradationOperator& A,
                                NoiseSeed seed, double epsilon = kDefaultPseudoInverseTolerance);

}  // namespace gsr
