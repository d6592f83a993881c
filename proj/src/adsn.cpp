#include "gsr/adsn.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gsr/error.hpp"

namespace gsr {

AdsnModel AdsnModel::from_textons(Channels textons, std::vector<double> means) {
  if (textons.size() != 1 && textons.size() != 3) {
    fail(ErrorCode::InvalidArgument,
         "ADSN model needs 1 or 3 channels, got " + std::to_string(textons.size()));
  }
  if (means.size() != textons.size()) {
    fail(ErrorCode::DimensionMismatch, "one mean per channel required");
  }
  if (textons.front().empty()) fail(ErrorCode::InvalidArgument, "empty texton");
  for (const auto& t : textons) require_same_shape(t, textons.front(), "AdsnModel textons");
  for (double m : means) {
    if (!std::isfinite(m)) fail(ErrorCode::InvalidArgument, "model mean must be finite");
  }
  return AdsnModel(std::move(textons), std::move(means));
}

PlanarImage boundary_jumps(const PlanarImage& u) {
  const int w = u.width();
  const int h = u.height();
  PlanarImage v(w, h);
  for (int y = 0; y < h; ++y) {
    const double jump = u(w - 1, y) - u(0, y);
    v(0, y) += jump;
    v(w - 1, y) -= jump;
  }
  for (int x = 0; x < w; ++x) {
    const double jump = u(x, h - 1) - u(x, 0);
    v(x, 0) += jump;
    v(x, h - 1) -= jump;
  }
  return v;
}

PlanarImage periodic_component(const PlanarImage& u) {
  const int w = u.width();
  const int h = u.height();
  if (w < 2 || h < 2) {
    fail(ErrorCode::InvalidArgument, "periodic component needs at least 2x2 pixels");
  }
  Spectrum s = dft2(boundary_jumps(u));
  const double two_pi = 2.0 * std::numbers::pi;
  for (int y = 0; y < h; ++y) {
    const double cy = 2.0 * std::cos(two_pi * y / h);
    for (int x = 0; x < w; ++x) {
      if (x == 0 && y == 0) {
        s(0, 0) = 0.0;
        continue;
      }
      s(x, y) /= 2.0 * std::cos(two_pi * x / w) + cy - 4.0;
    }
  }
  return u - idft2(s);
}

AdsnModel build_model(const Channels& reference, bool use_periodic) {
  if (reference.empty()) fail(ErrorCode::InvalidArgument, "reference has no channels");
  for (const auto& plane : reference) require_same_shape(plane, reference.front(), "build_model");
  Channels textons;
  std::vector<double> means;
  for (const auto& plane : reference) {
    PlanarImage p = use_periodic ? periodic_component(plane) : plane;
    const double m = mean(p);
    p -= m;
    p *= 1.0 / std::sqrt(static_cast<double>(p.size()));
    textons.push_back(std::move(p));
    means.push_back(m);
  }
  return AdsnModel::from_textons(std::move(textons), std::move(means));
}

PlanarImage white_noise(int width, int height, NoiseSeed seed) {
  PlanarImage out(width, height);
  std::mt19937_64 engine(seed.value);
  // 53-bit uniforms in (0, 1]; the open lower end keeps log() finite.
  auto uniform = [&engine] {
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
  };
  auto data = out.data();
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = two_pi * uniform();
    data[i] = radius * std::cos(angle);
    if (i + 1 < data.size()) data[i + 1] = radius * std::sin(angle);
  }
  return out;
}

Channels adsn_centred(const AdsnModel& model, const PlanarImage& noise) {
  Channels out;
  out.reserve(model.channels());
  for (const auto& t : model.textons()) out.push_back(circular_convolve(t, noise));
  return out;
}

Channels adsn_sample(const AdsnModel& model, NoiseSeed seed) {
  Channels out = adsn_centred(model, white_noise(model.width(), model.height(), seed));
  for (std::size_t c = 0; c < out.size(); ++c) out[c] += model.means()[c];
  return out;
}

}  // namespace gsr
