#pragma once

// Iterative reference route: conjugate gradients on the normal equations
// B^T B psi = B^T phi with B = A Gamma A^T, using the exact multi-channel
// covariance (no block-diagonal approximation).

#include <functional>
#include <vector>

#include "gsr/adsn.hpp"
#include "gsr/degradation.hpp"
#include "gsr/grid.hpp"
#include "gsr/kriging.hpp"

namespace gsr {

using Vector = std::vector<double>;

struct CgdConfig {
  /// stop once ||r_k|| <= max(epsilon, DBL_EPSILON ||r_0||)
  double epsilon = 0.0;
  int max_steps = 1000;

  void validate() const;
};

struct LinearOperator {
  std::function<Vector(const Vector&)> apply;
  /// Leave empty for a self-adjoint B.
  std::function<Vector(const Vector&)> apply_adjoint;
};

struct CgdResult {
  Vector solution;
  int iterations = 0;
  int restarts = 0;
  /// ||r_k|| = ||B^T (phi - B psi_k)|| for k = 0..iterations.
  std::vector<double> residual_history;
  /// ||phi - B psi_k||, the quantity CG on the normal equations minimises.
  std::vector<double> least_squares_history;

  double residual_norm() const { return residual_history.back(); }
};

/// psi ~ B^+ phi, starting from psi_0 = 0. Throws NumericalBreakdown when
/// d^T B^T B d vanishes twice (one restart from the current iterate).
CgdResult cgd_solve(const LinearOperator& B, const Vector& phi, const CgdConfig& cfg);

/// (Gamma u)_i = sum_j t_i * t~_j * u_j, any channel count.
Channels covariance_apply(const AdsnModel& model, const Channels& u);

/// A Gamma A^T on the LR grid, evaluated in the Fourier domain:
/// S^T becomes spectrum tiling and S becomes alias folding.
class NormalOperator {
 public:
  NormalOperator(const AdsnModel& model, const DegradationOperator& A);

  std::size_t channels() const noexcept { return weights_.size(); }
  int lr_width() const noexcept { return lr_width_; }
  int lr_height() const noexcept { return lr_height_; }

  Channels apply(const Channels& v) const;
  Vector apply(const Vector& v) const;

  /// Self-adjoint; the operator is copied into the closure.
  LinearOperator as_linear_operator() const;

 private:
  std::vector<Spectrum> weights_;  ///< conj(t^_j c^) on the HR grid
  int stride_ = 1;
  int lr_width_ = 0;
  int lr_height_ = 0;
};

Vector flatten(const Channels& u);
Channels unflatten(const Vector& v, std::size_t channels, int width, int height);

struct CgdKrigingResult {
  Channels image;
  CgdResult solve;
};

/// Lambda^T v = Gamma A^T psi with psi from cgd_solve on B = A Gamma A^T.
CgdKrigingResult cgd_kriging_apply(const AdsnModel& model, const DegradationOperator& A,
                                   const Channels& v, const CgdConfig& cfg);

struct CgdSample {
  SrSample sample;
  CgdResult kriging_solve;
  CgdResult innovation_solve;
};

/// Same contract and noise as sr_sample, with every Lambda^T application
/// replaced by cgd_kriging_apply.
CgdSample cgd_sr_sample(const AdsnModel& model, const Channels& u_lr, const DegradationOperator& A,
                        NoiseSeed seed, const CgdConfig& cfg);

/// Normal-equation residual ||B^2 psi - B phi|| with B = A Gamma A^T.
double residual(const AdsnModel& model, const DegradationOperator& A, const Channels& phi,
                const Channels& psi);

}  // namespace gsr
