#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "gsr/analysis.hpp"
#include "gsr/cgd.hpp"
#include "gsr/error.hpp"

using namespace gsr;

namespace {

LinearOperator dense_operator(const oracle::MatrixXd& m) {
  return LinearOperator{[m](const Vector& v) {
                          const oracle::VectorXd x = Eigen::Map<const oracle::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
                          const oracle::VectorXd y = m * x;
                          return Vector(y.data(), y.data() + y.size());
                        },
                        [m](const Vector& v) {
                          const oracle::VectorXd x = Eigen::Map<const oracle::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
                          const oracle::VectorXd y = m.transpose() * x;
                          return Vector(y.data(), y.data() + y.size());
                        }};
}

oracle::VectorXd as_eigen(const Vector& v) {
  return Eigen::Map<const oracle::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Channels random_channels(std::size_t n, int w, int h, std::mt19937_64& rng) {
  Channels out;
  for (std::size_t c = 0; c < n; ++c) out.push_back(oracle::random_image(w, h, rng));
  return out;
}

}  // namespace

TEST(CgdSolve, IdentityConvergesInOneStep) {
  const LinearOperator id{[](const Vector& v) { return v; }, {}};
  const Vector phi{1.0, -2.0, 3.5};
  const CgdResult r = cgd_solve(id, phi, CgdConfig{1e-14, 50});
  EXPECT_EQ(r.iterations, 1);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(r.solution[i], phi[i], 1e-14);
}

TEST(CgdSolve, DiagonalTerminatesInTwoSteps) {
  const LinearOperator diag{[](const Vector& v) { return Vector{v[0], 2.0 * v[1]}; }, {}};
  const CgdResult r = cgd_solve(diag, {1.0, 1.0}, CgdConfig{1e-12, 50});
  EXPECT_LE(r.iterations, 2);
  EXPECT_NEAR(r.solution[0], 1.0, 1e-12);
  EXPECT_NEAR(r.solution[1], 0.5, 1e-12);
}

TEST(CgdSolve, NonSymmetricOperatorUsesAdjoint) {
  oracle::MatrixXd m(2, 2);
  m << 2.0, 1.0, 0.0, 3.0;
  const CgdResult r = cgd_solve(dense_operator(m), {1.0, 2.0}, CgdConfig{1e-13, 10});
  const oracle::VectorXd want = m.inverse() * oracle::VectorXd::LinSpaced(2, 1.0, 2.0);
  EXPECT_LT((as_eigen(r.solution) - want).norm(), 1e-12);
}

TEST(CgdSolve, ZeroRightHandSide) {
  const LinearOperator id{[](const Vector& v) { return v; }, {}};
  const CgdResult r = cgd_solve(id, Vector(4, 0.0), CgdConfig{});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.residual_norm(), 0.0);
}

TEST(CgdSolve, ConfigValidation) {
  const LinearOperator id{[](const Vector& v) { return v; }, {}};
  EXPECT_THROW(cgd_solve(id, {1.0}, CgdConfig{-1.0, 10}), Error);
  EXPECT_THROW(cgd_solve(id, {1.0}, CgdConfig{0.0, 0}), Error);
}

TEST(CgdSolve, BreakdownAfterRestart) {
  // a callback that is not linear: B d vanishes whenever d != 0
  const LinearOperator broken{[](const Vector& v) { return Vector(v.size(), 0.0); },
                              [](const Vector& v) { return v; }};
  try {
    cgd_solve(broken, {1.0, 2.0}, CgdConfig{0.0, 10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NumericalBreakdown);
  }
}

TEST(CgdSolve, DenseNormalOperatorMatchesPseudoInverse) {
  std::mt19937_64 rng(51);
  const PlanarImage t = oracle::random_texton(8, 8, rng);
  const DegradationOperator A = bicubic_operator(8, 8, 2);
  const oracle::MatrixXd a = oracle::degradation(A);
  const oracle::MatrixXd b = a * oracle::covariance({t}) * a.transpose();
  const oracle::VectorXd phi = b * oracle::to_vector(oracle::random_image(4, 4, rng));
  const Vector phi_v(phi.data(), phi.data() + phi.size());
  const CgdResult r = cgd_solve(dense_operator(b), phi_v, CgdConfig{0.0, 200});
  EXPECT_LE(r.iterations, 200);
  const oracle::VectorXd want = oracle::pinv(b, 1e-12) * phi;
  EXPECT_LT(oracle::relative_error(as_eigen(r.solution), want), 1e-6);
  // the least-squares residual never increases
  for (std::size_t k = 1; k < r.least_squares_history.size(); ++k) {
    EXPECT_LE(r.least_squares_history[k], r.least_squares_history[k - 1] * (1.0 + 1e-12) + 1e-300);
  }
  EXPECT_EQ(r.residual_history.size(), static_cast<std::size_t>(r.iterations) + 1);
}

TEST(Covariance, DecoupledChannels) {
  std::mt19937_64 rng(52);
  const PlanarImage t1 = oracle::random_texton(6, 6, rng);
  const AdsnModel m = AdsnModel::from_textons({t1, PlanarImage(6, 6), PlanarImage(6, 6)}, {0, 0, 0});
  const PlanarImage u1 = oracle::random_image(6, 6, rng);
  const Channels out = covariance_apply(m, {u1, PlanarImage(6, 6), PlanarImage(6, 6)});
  EXPECT_LT(max_abs(out[0] - circular_convolve(t1, circular_convolve(flip(t1), u1))), 1e-13);
  EXPECT_EQ(max_abs(out[1]), 0.0);
  EXPECT_EQ(max_abs(out[2]), 0.0);
}

TEST(Covariance, SymmetricPsdAndDense) {
  std::mt19937_64 rng(53);
  const Channels textons = random_channels(3, 4, 4, rng);
  const AdsnModel m = AdsnModel::from_textons(textons, {0, 0, 0});
  const Channels u = random_channels(3, 4, 4, rng);
  const Channels v = random_channels(3, 4, 4, rng);
  EXPECT_NEAR(dot(covariance_apply(m, u), v), dot(u, covariance_apply(m, v)), 1e-9);
  EXPECT_GE(dot(covariance_apply(m, u), u), -1e-9 * dot(u, u));
  const oracle::VectorXd want = oracle::covariance(textons) * oracle::to_vector(u);
  EXPECT_LT(oracle::relative_error(oracle::to_vector(covariance_apply(m, u)), want), 1e-9);
}

TEST(NormalOperatorTest, MatchesComposition) {
  std::mt19937_64 rng(54);
  const Channels textons = random_channels(3, 12, 8, rng);
  const AdsnModel m = AdsnModel::from_textons(textons, {0, 0, 0});
  const DegradationOperator A = bicubic_operator(12, 8, 2);
  const Channels v = random_channels(3, 6, 4, rng);
  const Channels want = degrade(A, covariance_apply(m, degrade_adjoint(A, v)));
  EXPECT_LT(norm2(NormalOperator(m, A).apply(v) - want) / norm2(want), 1e-12);
}

TEST(CgdKriging, GrayMatchesClosedForm) {
  std::mt19937_64 rng(55);
  const PlanarImage t = oracle::random_texton(16, 16, rng);
  const AdsnModel m = AdsnModel::from_textons({t}, {0.0});
  const DegradationOperator A = bicubic_operator(16, 16, 2);
  const KrigingKernel k = kriging_kernel(m, A);
  const Channels v = degrade(A, adsn_centred(m, white_noise(16, 16, NoiseSeed{2})));
  const CgdKrigingResult r = cgd_kriging_apply(m, A, v, CgdConfig{0.0, 2000});
  const Channels want = apply_kriging(k, v);
  EXPECT_LT(norm2(r.image - want) / norm2(want), 1e-5);
  const CgdKrigingResult zero = cgd_kriging_apply(m, A, {PlanarImage(8, 8)}, CgdConfig{});
  EXPECT_EQ(max_abs(zero.image[0]), 0.0);
}

TEST(CgdKriging, RgbMatchesDenseFullCovariance) {
  std::mt19937_64 rng(56);
  const Channels textons = {oracle::random_texton(8, 8, rng), oracle::random_texton(8, 8, rng),
                            oracle::random_texton(8, 8, rng)};
  const AdsnModel m = AdsnModel::from_textons(textons, {0, 0, 0});
  const DegradationOperator A = bicubic_operator(8, 8, 2);
  const oracle::MatrixXd a = oracle::block_diagonal(oracle::degradation(A), 3);
  const oracle::MatrixXd g = oracle::covariance(textons);
  const oracle::MatrixXd lt = g * a.transpose() * oracle::pinv(a * g * a.transpose(), 1e-12);
  const Channels v = degrade(A, adsn_centred(m, white_noise(8, 8, NoiseSeed{4})));
  const CgdKrigingResult r = cgd_kriging_apply(m, A, v, CgdConfig{0.0, 3000});
  EXPECT_LT(oracle::relative_error(oracle::to_vector(r.image), lt * oracle::to_vector(v)), 1e-5);
}

TEST(CgdSample, GrayAgreesWithDirect) {
  std::mt19937_64 rng(57);
  const PlanarImage t = oracle::random_texton(32, 32, rng);
  const AdsnModel m = AdsnModel::from_textons({t}, {0.5});
  const DegradationOperator A = bicubic_operator(32, 32, 2);
  const Channels u_lr = degrade(A, adsn_sample(m, NoiseSeed{77}));
  const SrSample direct = sr_sample(m, u_lr, A, NoiseSeed{3});
  const CgdSample cgd = cgd_sr_sample(m, u_lr, A, NoiseSeed{3}, CgdConfig{0.0, 10000});
  EXPECT_GE(psnr(direct.sample, cgd.sample.sample, 1.0), 60.0);
}

TEST(CgdSample, ZeroTextonGivesMean) {
  const AdsnModel m = AdsnModel::from_textons({PlanarImage(8, 8)}, {0.0});
  const DegradationOperator A = bicubic_operator(8, 8, 2);
  const CgdSample s = cgd_sr_sample(m, {PlanarImage(4, 4, 2.0)}, A, NoiseSeed{1}, CgdConfig{});
  EXPECT_LT(max_abs(s.sample.sample[0] - 2.0), 1e-14);
}

TEST(Residual, DefinitionalValues) {
  std::mt19937_64 rng(58);
  const PlanarImage t = oracle::random_texton(16, 12, rng);
  const AdsnModel m = AdsnModel::from_textons({t}, {0.0});
  const DegradationOperator A = bicubic_operator(16, 12, 2);
  const NormalOperator B(m, A);
  const Channels chi = {oracle::random_image(8, 6, rng)};
  const Channels phi = B.apply(chi);
  EXPECT_LE(residual(m, A, phi, chi), 1e-9 * norm2(B.apply(phi)));
  EXPECT_NEAR(residual(m, A, phi, {PlanarImage(8, 6)}), norm2(B.apply(phi)), 1e-12 * norm2(B.apply(phi)));
  const KrigingKernel k = kriging_kernel(m, A);
  const Channels direct = apply_kappa_pinv(k, phi);
  EXPECT_LE(residual(m, A, phi, direct), 1e-10 * norm2(B.apply(phi)));
  EXPECT_GE(residual(m, A, phi, {oracle::random_image(8, 6, rng)}), 0.0);
}
