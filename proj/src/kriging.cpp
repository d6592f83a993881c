#include "gsr/kriging.hpp"

#include <cmath>
#include <string>

#include "gsr/error.hpp"

namespace gsr {
namespace {

void require_model_matches(const AdsnModel& model, const DegradationOperator& A) {
  if (model.width() != A.hr_width() || model.height() != A.hr_height()) {
    fail(ErrorCode::DimensionMismatch, "model grid does not match the degradation operator");
  }
}

void require_lr(const KrigingKernel& k, const PlanarImage& v, const char* context) {
  if (v.width() != k.lr_width() || v.height() != k.lr_height()) {
    fail(ErrorCode::DimensionMismatch, std::string(context) + ": image is not on the LR grid");
  }
}

void require_channels(std::size_t got, std::size_t want, const char* context) {
  if (got != want) {
    fail(ErrorCode::DimensionMismatch, std::string(context) + ": " + std::to_string(got) +
                                           " channels, expected " + std::to_string(want));
  }
}

}  // namespace

Spectrum kappa_spectrum(const PlanarImage& t, const DegradationOperator& A) {
  if (t.width() != A.hr_width() || t.height() != A.hr_height()) {
    fail(ErrorCode::DimensionMismatch, "kappa: texton does not match the operator grid");
  }
  Spectrum power = dft2(t);
  const auto c_hat = A.kernel_spectrum().data();
  auto p = power.data();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(p[i]) * std::norm(c_hat[i]);
  return fold_spectrum(power, A.stride());
}

PlanarImage kappa(const PlanarImage& t, const DegradationOperator& A) {
  return idft2(kappa_spectrum(t, A));
}

PseudoInverseKernel invert_spectrum(const Spectrum& s, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorCode::InvalidArgument, "pseudo-inverse tolerance must lie in (0, 1)");
  }
  const double peak = max_modulus(s);
  if (peak == 0.0) fail(ErrorCode::AllFrequenciesZeroed, "kernel spectrum is identically zero");
  const double cutoff = epsilon * peak;
  PseudoInverseKernel out;
  out.spectrum = Spectrum(s.width(), s.height());
  auto src = s.data();
  auto dst = out.spectrum.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (std::abs(src[i]) <= cutoff) {
      ++out.zeroed_frequencies;
    } else {
      dst[i] = 1.0 / src[i];
    }
  }
  out.kernel = idft2(out.spectrum);
  return out;
}

PseudoInverseKernel pseudo_inverse_kernel(const PlanarImage& kappa, double epsilon) {
  return invert_spectrum(dft2(kappa), epsilon);
}

int KrigingKernel::zeroed_frequencies() const {
  int total = 0;
  for (const auto& ch : channels_) total += ch.zeroed;
  return total;
}

bool KrigingKernel::degenerate() const {
  for (const auto& ch : channels_) {
    if (ch.degenerate) return true;
  }
  return false;
}

KrigingKernel kriging_kernel(const AdsnModel& model, const DegradationOperator& A,
                             double epsilon) {
  require_model_matches(model, A);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorCode::InvalidArgument, "pseudo-inverse tolerance must lie in (0, 1)");
  }
  KrigingKernel k;
  k.stride_ = A.stride();
  k.hr_width_ = A.hr_width();
  k.hr_height_ = A.hr_height();
  k.tolerance_ = epsilon;
  const int r = A.stride();
  const auto c_hat = A.kernel_spectrum().data();

  for (const auto& t : model.textons()) {
    KrigingKernel::ChannelKernel ch;
    Spectrum t_hat = dft2(t);
    Spectrum power(t.width(), t.height());
    {
      auto th = t_hat.data();
      auto p = power.data();
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(th[i]) * std::norm(c_hat[i]);
    }
    ch.kappa_hat = fold_spectrum(power, r);
    ch.lambda_hat = Spectrum(t.width(), t.height());
    try {
      PseudoInverseKernel pinv = invert_spectrum(ch.kappa_hat, epsilon);
      ch.zeroed = pinv.zeroed_frequencies;
      ch.kappa_pinv_hat = std::move(pinv.spectrum);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllFrequenciesZeroed) throw;
      ch.degenerate = true;
      ch.zeroed = static_cast<int>(ch.kappa_hat.size());
      ch.kappa_pinv_hat = Spectrum(ch.kappa_hat.width(), ch.kappa_hat.height());
    }
    if (!ch.degenerate) {
      // lambda^ = |t^|^2 conj(c^) periodized(kappa^+)
      const Spectrum pinv_hr = periodize_spectrum(ch.kappa_pinv_hat, r);
      auto th = t_hat.data();
      auto pi = pinv_hr.data();
      auto lh = ch.lambda_hat.data();
      for (std::size_t i = 0; i < lh.size(); ++i) lh[i] = std::norm(th[i]) * std::conj(c_hat[i]) * pi[i];
    }
    k.channels_.push_back(std::move(ch));
  }
  return k;
}

PlanarImage apply_kriging(const KrigingKernel& k, std::size_t channel, const PlanarImage& v) {
  require_lr(k, v, "apply_kriging");
  // F(S^T v) is the LR spectrum tiled over the HR grid.
  Spectrum s = periodize_spectrum(dft2(v), k.stride());
  s *= k.lambda_spectrum(channel);
  return idft2(s);
}

Channels apply_kriging(const KrigingKernel& k, const Channels& v) {
  require_channels(v.size(), k.channels(), "apply_kriging");
  Channels out;
  out.reserve(v.size());
  for (std::size_t c = 0; c < v.size(); ++c) out.push_back(apply_kriging(k, c, v[c]));
  return out;
}

PlanarImage apply_kriging_transpose(const KrigingKernel& k, std::size_t channel,
                                    const PlanarImage& p) {
  if (p.width() != k.hr_width() || p.height() != k.hr_height()) {
    fail(ErrorCode::DimensionMismatch, "apply_kriging_transpose: image is not on the HR grid");
  }
  Spectrum s = dft2(p);
  s *= conj(k.lambda_spectrum(channel));
  return idft2(fold_spectrum(s, k.stride()));
}

PlanarImage apply_kappa_pinv(const KrigingKernel& k, std::size_t channel, const PlanarImage& phi) {
  require_lr(k, phi, "apply_kappa_pinv");
  Spectrum s = dft2(phi);
  s *= k.kappa_pinv_spectrum(channel);
  return idft2(s);
}

Channels apply_kappa_pinv(const KrigingKernel& k, const Channels& phi) {
  require_channels(phi.size(), k.channels(), "apply_kappa_pinv");
  Channels out;
  out.reserve(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) out.push_back(apply_kappa_pinv(k, c, phi[c]));
  return out;
}

SrSample sr_sample(const AdsnModel& model, const KrigingKernel& k, const Channels& u_lr,
                   const DegradationOperator& A, NoiseSeed seed) {
  require_model_matches(model, A);
  require_channels(u_lr.size(), model.channels(), "sr_sample");
  require_channels(k.channels(), model.channels(), "sr_sample kernel");
  if (k.hr_width() != A.hr_width() || k.hr_height() != A.hr_height() || k.stride() != A.stride()) {
    fail(ErrorCode::DimensionMismatch, "sr_sample: kernel was built for another operator");
  }
  for (const auto& plane : u_lr) require_lr(k, plane, "sr_sample");

  SrSample out;
  out.seed = seed;
  out.degenerate = k.degenerate();
  const PlanarImage noise = white_noise(model.width(), model.height(), seed);
  const Channels u_tilde = adsn_centred(model, noise);
  for (std::size_t c = 0; c < u_lr.size(); ++c) {
    const double m = mean(u_lr[c]);
    out.mean.push_back(m);
    PlanarImage kriging = apply_kriging(k, c, u_lr[c] - m);
    kriging += m;
    PlanarImage innovation = u_tilde[c] - apply_kriging(k, c, degrade(A, u_tilde[c]));
    out.sample.push_back(kriging + innovation);
    out.kriging_component.push_back(std::move(kriging));
    out.innovation_component.push_back(std::move(innovation));
  }
  return out;
}

SrSample sr_sample(const AdsnModel& model, const Channels& u_lr, const DegradationOperator& A,
                   NoiseSeed seed, double epsilon) {
  return sr_sample(model, kriging_kernel(model, A, epsilon), u_lr, A, seed);
}

bool StabilityReport::holds(double relative_slack) const {
  return lhs <= bound_operator * (1.0 + relative_slack) &&
         bound_operator <= bound_l1 * (1.0 + relative_slack);
}

StabilityReport stability_check(const AdsnModel& model, const KrigingKernel& k,
                                const DegradationOperator& A, NoiseSeed seed) {
  require_model_matches(model, A);
  if (model.channels() != 1) fail(ErrorCode::InvalidArgument, "stability check is grayscale only");
  const PlanarImage& t = model.texton(0);
  const PlanarImage w = white_noise(model.width(), model.height(), seed);
  const double w_norm = norm2(w);
  StabilityReport report;
  report.lhs = norm2(apply_kriging(k, 0, degrade(A, circular_convolve(t, w))));
  report.bound_operator = max_modulus(dft2(t)) * w_norm;
  report.bound_l1 = norm1(t) * w_norm;
  return report;
}

StabilityReport stability_check(const AdsnModel& model, const DegradationOperator& A,
                                NoiseSeed seed, double epsilon) {
  return stability_check(model, kriging_kernel(model, A, epsilon), A, seed);
}

}  // namespace gsr
