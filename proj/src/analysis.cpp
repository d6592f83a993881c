#include "gsr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gsr/error.hpp"

namespace gsr {
namespace {

void require_peak(double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak)) fail(ErrorCode::InvalidArgument, "peak must be > 0");
}

double psnr_from_mse(double m, double peak) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

// Normalised separable Gaussian window laid out periodically on a w x h grid.
Spectrum window_spectrum(int width, int height, const SsimParams& p) {
  const int half = p.window / 2;
  std::vector<double> g(static_cast<std::size_t>(p.window));
  double total = 0.0;
  for (int i = -half; i <= half; ++i) {
    g[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * i * i / (p.sigma * p.sigma));
    total += g[static_cast<std::size_t>(i + half)];
  }
  PlanarImage w(width, height);
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      w(static_cast<int>(detail::wrap(dx, width)), static_cast<int>(detail::wrap(dy, height))) += g[static_cast<std::size_t>(dx + half)] * g[static_cast<std::size_t>(dy + half)] /
                      (total * total);
    }
  }
  return dft2(w);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

double mse(const PlanarImage& u, const PlanarImage& v) {
  require_same_shape(u, v, "mse");
  double s = 0.0;
  auto a = u.data();
  auto b = v.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double mse(const Channels& u, const Channels& v) {
  require_same_shape(u, v, "mse");
  if (u.empty()) fail(ErrorCode::InvalidArgument, "mse of an empty channel list");
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) s += mse(u[c], v[c]);
  return s / static_cast<double>(u.size());
}

double psnr(const PlanarImage& u, const PlanarImage& v, double peak) {
  require_peak(peak);
  return psnr_from_mse(mse(u, v), peak);
}

double psnr(const Channels& u, const Channels& v, double peak) {
  require_peak(peak);
  return psnr_from_mse(mse(u, v), peak);
}

double lr_psnr(const Channels& u_sr, const Channels& u_lr, const DegradationOperator& A,
               double peak) {
  return psnr(degrade(A, u_sr), u_lr, peak);
}

void SsimParams::validate() const {
  if (window < 3 || window % 2 == 0) fail(ErrorCode::InvalidArgument, "SSIM window must be odd and >= 3");
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "SSIM sigma must be > 0");
  if (!(k1 > 0.0) || !(k2 > 0.0)) fail(ErrorCode::InvalidArgument, "SSIM constants must be > 0");
  require_peak(peak);
}

double ssim(const PlanarImage& u, const PlanarImage& v, const SsimParams& params) {
  params.validate();
  require_same_shape(u, v, "ssim");
  const Spectrum w_hat = window_spectrum(u.width(), u.height(), params);
  auto local = [&](const PlanarImage& x) { return convolve_with_spectrum(x, w_hat); };

  PlanarImage uu = u;
  PlanarImage vv = v;
  PlanarImage uv = u;
  {
    auto a = u.data();
    auto b = v.data();
    auto puu = uu.data();
    auto pvv = vv.data();
    auto puv = uv.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
      puu[i] = a[i] * a[i];
      pvv[i] = b[i] * b[i];
      puv[i] = a[i] * b[i];
    }
  }
  const PlanarImage mu_u = local(u);
  const PlanarImage mu_v = local(v);
  const PlanarImage e_uu = local(uu);
  const PlanarImage e_vv = local(vv);
  const PlanarImage e_uv = local(uv);

  const double c1 = (params.k1 * params.peak) * (params.k1 * params.peak);
  const double c2 = (params.k2 * params.peak) * (params.k2 * params.peak);
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mu = mu_u.data()[i];
    const double mv = mu_v.data()[i];
    const double var_u = e_uu.data()[i] - mu * mu;
    const double var_v = e_vv.data()[i] - mv * mv;
    const double cov = e_uv.data()[i] - mu * mv;
    total += ((2.0 * mu * mv + c1) * (2.0 * cov + c2)) /
             ((mu * mu + mv * mv + c1) * (var_u + var_v + c2));
  }
  return total / static_cast<double>(u.size());
}

double ssim(const Channels& u, const Channels& v, const SsimParams& params) {
  require_same_shape(u, v, "ssim");
  if (u.empty()) fail(ErrorCode::InvalidArgument, "ssim of an empty channel list");
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) s += ssim(u[c], v[c], params);
  return s / static_cast<double>(u.size());
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "peak=" << format_number(peak) << '\n'
      << "mse=" << format_number(mse) << '\n'
      << "psnr=" << format_number(psnr) << '\n'
      << "ssim=" << format_number(ssim) << '\n';
  if (lr_psnr) out << "lr_psnr=" << format_number(*lr_psnr) << '\n';
  if (per_channel.size() > 1) {
    for (std::size_t c = 0; c < per_channel.size(); ++c) {
      out << "mse_" << c << '=' << format_number(per_channel[c].mse) << '\n'
          << "psnr_" << c << '=' << format_number(per_channel[c].psnr) << '\n'
          << "ssim_" << c << '=' << format_number(per_channel[c].ssim) << '\n';
    }
  }
  return out.str();
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["peak"] = json_number(peak);
  j["mse"] = json_number(mse);
  j["psnr"] = json_number(psnr);
  j["ssim"] = json_number(ssim);
  if (lr_psnr) j["lr_psnr"] = json_number(*lr_psnr);
  if (per_channel.size() > 1) {
    for (std::size_t c = 0; c < per_channel.size(); ++c) {
      const std::string s = std::to_string(c);
      j["mse_" + s] = json_number(per_channel[c].mse);
      j["psnr_" + s] = json_number(per_channel[c].psnr);
      j["ssim_" + s] = json_number(per_channel[c].ssim);
    }
  }
  return j.dump(2) + "\n";
}

MetricsReport compute_metrics(const Channels& image, const Channels& reference, double peak,
                              const Channels* u_lr, const DegradationOperator* A) {
  require_peak(peak);
  require_same_shape(image, reference, "compute_metrics");
  MetricsReport report;
  report.peak = peak;
  SsimParams sp;
  sp.peak = peak;
  report.mse = mse(image, reference);
  report.psnr = psnr_from_mse(report.mse, peak);
  report.ssim = ssim(image, reference, sp);
  for (std::size_t c = 0; c < image.size(); ++c) {
    ChannelMetrics m;
    m.mse = mse(image[c], reference[c]);
    m.psnr = psnr_from_mse(m.mse, peak);
    m.ssim = ssim(image[c], reference[c], sp);
    report.per_channel.push_back(m);
  }
  if (u_lr != nullptr && A != nullptr) report.lr_psnr = lr_psnr(image, *u_lr, *A, peak);
  return report;
}

VarianceMap theoretical_variance_map(const AdsnModel& model, const DegradationOperator& A,
                                     const KrigingKernel& k) {
  if (model.width() != A.hr_width() || model.height() != A.hr_height() ||
      k.hr_width() != A.hr_width() || k.hr_height() != A.hr_height() || k.stride() != A.stride()) {
    fail(ErrorCode::DimensionMismatch, "variance map: model, operator and kernel disagree");
  }
  if (k.channels() != model.channels()) {
    fail(ErrorCode::DimensionMismatch, "variance map: kernel channel count differs from the model");
  }
  const int r = A.stride();
  const int w = model.width();
  const int h = model.height();
  VarianceMap out{PlanarImage(w, h), {}, VarianceMode::Theoretical, 0};

  for (std::size_t c = 0; c < model.channels(); ++c) {
    const Spectrum t_conj = conj(dft2(model.texton(c)));
    std::vector<double> phase(static_cast<std::size_t>(r) * static_cast<std::size_t>(r));
    for (int py = 0; py < r; ++py) {
      for (int px = 0; px < r; ++px) {
        const PlanarImage delta = PlanarImage::delta(w, h, px, py);
        // (I - A^T Lambda) delta, then C_t^T
        const PlanarImage projected = degrade_adjoint(A, apply_kriging_transpose(k, c, delta));
        const PlanarImage row = convolve_with_spectrum(delta - projected, t_conj);
        const double v = dot(row, row);
        phase[static_cast<std::size_t>(py * r + px)] = v;
      }
    }
    PlanarImage map(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) map(x, y) = phase[static_cast<std::size_t>((y % r) * r + x % r)];
    }
    out.total += map;
    out.per_channel.push_back(std::move(map));
  }
  return out;
}

VarianceMap empirical_variance_map(const std::vector<Channels>& samples) {
  if (samples.size() < 2) fail(ErrorCode::InsufficientSamples, "variance needs at least two samples");
  const Channels& first = samples.front();
  if (first.empty()) fail(ErrorCode::InvalidArgument, "samples have no channels");
  for (const auto& s : samples) require_same_shape(first, s, "empirical_variance_map");

  const double n = static_cast<double>(samples.size());
  VarianceMap out{PlanarImage(first[0].width(), first[0].height()), {}, VarianceMode::Empirical,
                  static_cast<int>(samples.size())};
  for (std::size_t c = 0; c < first.size(); ++c) {
    // Welford accumulation per pixel.
    std::vector<double> mean_acc(first[c].size(), 0.0);
    std::vector<double> m2(first[c].size(), 0.0);
    double count = 0.0;
    for (const auto& s : samples) {
      count += 1.0;
      auto d = s[c].data();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double delta = d[i] - mean_acc[i];
        mean_acc[i] += delta / count;
        m2[i] += delta * (d[i] - mean_acc[i]);
      }
    }
    for (double& v : m2) v /= (n - 1.0);
    PlanarImage map(first[c].width(), first[c].height(), std::move(m2));
    out.total += map;
    out.per_channel.push_back(std::move(map));
  }
  return out;
}

MseDecomposition mse_decomposition(const AdsnModel& model, const DegradationOperator& A,
                                   const KrigingKernel& k, const Channels& u_hr,
                                   const Channels& u_lr) {
  if (u_hr.size() != model.channels() || u_lr.size() != model.channels()) {
    fail(ErrorCode::DimensionMismatch, "mse_decomposition: channel count differs from the model");
  }
  MseDecomposition out;
  const Channels observed = degrade(A, u_hr);
  require_same_shape(observed, u_lr, "mse_decomposition");
  out.lr_consistent = norm2(observed - u_lr) <= 1e-9 * std::max(norm2(u_lr), 1e-300);

  for (std::size_t c = 0; c < u_hr.size(); ++c) {
    const double m = mean(u_lr[c]);
    PlanarImage kriging = apply_kriging(k, c, u_lr[c] - m);
    kriging += m;
    const PlanarImage diff = u_hr[c] - kriging;
    out.kriging_mse += dot(diff, diff);
  }
  out.trace_term = sum(theoretical_variance_map(model, A, k).total);
  out.expected_mse = out.kriging_mse + out.trace_term;
  return out;
}

}  // namespace gsr
