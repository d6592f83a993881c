#include "gsr/cgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gsr/error.hpp"

namespace gsr {
namespace {

double squared_norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// y += a * x
void axpy(double a, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

Vector subtract(const Vector& a, const Vector& b) {
  Vector out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

void require_model_matches(const AdsnModel& model, const DegradationOperator& A) {
  if (model.width() != A.hr_width() || model.height() != A.hr_height()) {
    fail(ErrorCode::DimensionMismatch, "model grid does not match the degradation operator");
  }
}

}  // namespace

void CgdConfig::validate() const {
  if (!(epsilon >= 0.0)) fail(ErrorCode::InvalidArgument, "CGD epsilon must be >= 0");
  if (max_steps < 1) fail(ErrorCode::InvalidArgument, "CGD needs at least one step");
}

CgdResult cgd_solve(const LinearOperator& B, const Vector& phi, const CgdConfig& cfg) {
  cfg.validate();
  if (!B.apply) fail(ErrorCode::InvalidArgument, "CGD operator has no apply callback");
  const auto& adjoint = B.apply_adjoint ? B.apply_adjoint : B.apply;
  constexpr double kTiny = std::numeric_limits<double>::min();

  CgdResult out;
  Vector psi(phi.size(), 0.0);
  Vector ls = phi;  // phi - B psi
  Vector r = adjoint(ls);
  Vector d = r;
  double rr = squared_norm(r);
  out.residual_history.push_back(std::sqrt(rr));
  out.least_squares_history.push_back(std::sqrt(squared_norm(ls)));

  // beyond this the recurrences only amplify rounding noise along
  // near-null directions of B
  const double floor = std::numeric_limits<double>::epsilon() * std::sqrt(rr);
  int k = 0;
  while (std::sqrt(rr) > std::max(cfg.epsilon, floor) && rr >= kTiny && k < cfg.max_steps) {
    const Vector bd = B.apply(d);
    const double denom = squared_norm(bd);  // d^T B^T B d
    if (!(denom >= kTiny) || !std::isfinite(denom)) {
      if (out.restarts > 0) {
        fail(ErrorCode::NumericalBreakdown,
             "d^T B^T B d vanished at step " + std::to_string(k) + " after a restart");
      }
      ++out.restarts;
      ls = subtract(phi, B.apply(psi));
      r = adjoint(ls);
      d = r;
      rr = squared_norm(r);
      continue;
    }
    const Vector btbd = adjoint(bd);
    const double alpha = rr / denom;
    axpy(alpha, d, psi);
    axpy(-alpha, btbd, r);
    axpy(-alpha, bd, ls);
    const double rr_next = squared_norm(r);
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = r[i] + beta * d[i];
    rr = rr_next;
    ++k;
    out.residual_history.push_back(std::sqrt(rr));
    out.least_squares_history.push_back(std::sqrt(squared_norm(ls)));
  }
  out.iterations = k;
  out.solution = std::move(psi);
  return out;
}

Channels covariance_apply(const AdsnModel& model, const Channels& u) {
  if (u.size() != model.channels()) {
    fail(ErrorCode::DimensionMismatch, "covariance_apply: channel count differs from the model");
  }
  std::vector<Spectrum> t_hat;
  for (std::size_t c = 0; c < u.size(); ++c) {
    require_same_shape(u[c], model.texton(c), "covariance_apply");
    t_hat.push_back(dft2(model.texton(c)));
  }
  // Gamma = T T^T with T z = (t_i * z)_i and T^T u = sum_j t~_j * u_j.
  Spectrum z(model.width(), model.height());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const Spectrum u_hat = dft2(u[j]);
    auto zd = z.data();
    auto td = t_hat[j].data();
    auto ud = u_hat.data();
    for (std::size_t i = 0; i < zd.size(); ++i) zd[i] += std::conj(td[i]) * ud[i];
  }
  Channels out;
  for (std::size_t c = 0; c < u.size(); ++c) out.push_back(idft2(t_hat[c] * z));
  return out;
}

NormalOperator::NormalOperator(const AdsnModel& model, const DegradationOperator& A)
    : stride_(A.stride()), lr_width_(A.lr_width()), lr_height_(A.lr_height()) {
  require_model_matches(model, A);
  for (const auto& t : model.textons()) weights_.push_back(conj(dft2(t) * A.kernel_spectrum()));
}

Channels NormalOperator::apply(const Channels& v) const {
  if (v.size() != weights_.size()) {
    fail(ErrorCode::DimensionMismatch, "NormalOperator: channel count differs from the model");
  }
  const Spectrum& w0 = weights_.front();
  Spectrum z(w0.width(), w0.height());
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j].width() != lr_width_ || v[j].height() != lr_height_) {
      fail(ErrorCode::DimensionMismatch, "NormalOperator: input is not on the LR grid");
    }
    const Spectrum tiled = periodize_spectrum(dft2(v[j]), stride_);
    auto zd = z.data();
    auto wd = weights_[j].data();
    auto td = tiled.data();
    for (std::size_t i = 0; i < zd.size(); ++i) zd[i] += wd[i] * td[i];
  }
  Channels out;
  out.reserve(v.size());
  for (const auto& w : weights_) out.push_back(idft2(fold_spectrum(conj(w) * z, stride_)));
  return out;
}

Vector NormalOperator::apply(const Vector& v) const {
  return flatten(apply(unflatten(v, weights_.size(), lr_width_, lr_height_)));
}

LinearOperator NormalOperator::as_linear_operator() const {
  NormalOperator copy = *this;
  return LinearOperator{[copy](const Vector& v) { return copy.apply(v); }, {}};
}

Vector flatten(const Channels& u) {
  Vector out;
  for (const auto& plane : u) out.insert(out.end(), plane.data().begin(), plane.data().end());
  return out;
}

Channels unflatten(const Vector& v, std::size_t channels, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (v.size() != channels * n) fail(ErrorCode::DimensionMismatch, "unflatten: size mismatch");
  Channels out;
  for (std::size_t c = 0; c < channels; ++c) {
    out.emplace_back(width, height,
                     std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(c * n),
                                         v.begin() + static_cast<std::ptrdiff_t>((c + 1) * n)));
  }
  return out;
}

CgdKrigingResult cgd_kriging_apply(const AdsnModel& model, const DegradationOperator& A,
                                   const Channels& v, const CgdConfig& cfg) {
  const NormalOperator B(model, A);
  CgdKrigingResult out;
  out.solve = cgd_solve(B.as_linear_operator(), flatten(v), cfg);
  const Channels psi = unflatten(out.solve.solution, v.size(), A.lr_width(), A.lr_height());
  out.image = covariance_apply(model, degrade_adjoint(A, psi));
  return out;
}

CgdSample cgd_sr_sample(const AdsnModel& model, const Channels& u_lr, const DegradationOperator& A,
                        NoiseSeed seed, const CgdConfig& cfg) {
  require_model_matches(model, A);
  if (u_lr.size() != model.channels()) {
    fail(ErrorCode::DimensionMismatch, "cgd_sr_sample: channel count differs from the model");
  }
  CgdSample out;
  SrSample& s = out.sample;
  s.seed = seed;
  Channels centred;
  for (const auto& plane : u_lr) {
    s.mean.push_back(mean(plane));
    centred.push_back(plane - s.mean.back());
  }
  const Channels u_tilde = adsn_centred(model, white_noise(model.width(), model.height(), seed));
  CgdKrigingResult kriging = cgd_kriging_apply(model, A, centred, cfg);
  CgdKrigingResult projected = cgd_kriging_apply(model, A, degrade(A, u_tilde), cfg);
  for (std::size_t c = 0; c < u_lr.size(); ++c) {
    PlanarImage k = std::move(kriging.image[c]);
    k += s.mean[c];
    PlanarImage innovation = u_tilde[c] - projected.image[c];
    s.sample.push_back(k + innovation);
    s.kriging_component.push_back(std::move(k));
    s.innovation_component.push_back(std::move(innovation));
  }
  out.kriging_solve = std::move(kriging.solve);
  out.innovation_solve = std::move(projected.solve);
  return out;
}

double residual(const AdsnModel& model, const DegradationOperator& A, const Channels& phi,
                const Channels& psi) {
  require_same_shape(phi, psi, "residual");
  const NormalOperator B(model, A);
  return norm2(B.apply(B.apply(psi)) - B.apply(phi));
}

}  // namespace gsr
