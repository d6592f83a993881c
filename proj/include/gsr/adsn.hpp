#pragma once

#include <cstdint>
#include <vector>

#include "gsr/grid.hpp"

namespace gsr {

/// Reproducibility carrier for white-noise fields.
struct NoiseSeed {
  std::uint64_t value = 0;

  NoiseSeed next(std::uint64_t k = 1) const { return NoiseSeed{value + k}; }
  friend bool operator==(NoiseSeed, NoiseSeed) = default;
};

/// Stationary Gaussian texture model m + t * w (one texton per channel,
/// one white-noise field shared by all channels).
class AdsnModel {
 public:
  /// Textons are taken as given (no zero-sum requirement); 1 or 3 channels of
  /// identical size, one mean per channel.
  static AdsnModel from_textons(Channels textons, std::vector<double> means);

  std::size_t channels() const noexcept { return textons_.size(); }
  int width() const noexcept { return textons_.front().width(); }
  int height() const noexcept { return textons_.front().height(); }
  const Channels& textons() const noexcept { return textons_; }
  const PlanarImage& texton(std::size_t c) const { return textons_.at(c); }
  const std::vector<double>& means() const noexcept { return means_; }

 private:
  AdsnModel(Channels textons, std::vector<double> means)
      : textons_(std::move(textons)), means_(std::move(means)) {}

  Channels textons_;
  std::vector<double> means_;
};

/// Periodic component of the periodic-plus-smooth decomposition: u - s where
/// the smooth part s solves the periodic discrete Poisson equation driven by
/// the wrap-around jumps of u, with zero mean.
PlanarImage periodic_component(const PlanarImage& u);

/// Wrap-around boundary field: (Laplacian_periodic - Laplacian_interior) u.
PlanarImage boundary_jumps(const PlanarImage& u);

/// t = (u - mean(u)) / sqrt(MN) per channel, optionally from the periodic
/// component of each plane.
AdsnModel build_model(const Channels& reference, bool use_periodic = true);

/// I.i.d. N(0, 1) field from mt19937_64 + Box-Muller; deterministic in seed.
PlanarImage white_noise(int width, int height, NoiseSeed seed);

/// m_i + t_i * w for every channel with one shared w = white_noise(seed).
Channels adsn_sample(const AdsnModel& model, NoiseSeed seed);

/// t_i * w for every channel (the centred field, no mean).
Channels adsn_centred(const AdsnModel& model, const PlanarImage& noise);

}  // namespace gsr
