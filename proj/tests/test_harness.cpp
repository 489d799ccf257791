#include <cstring>
#include <vector>

#include "support.hpp"

using namespace twoslit;

namespace {

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

SyntheticScene scene(std::uint64_t seed, double sigma) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.sigma = sigma;
  return generate_scene(cfg);
}

}  // namespace

TEST(Rng, DeterministicAndPortable) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(bitwise_equal(a.normal(), b.normal()));
  // First word of std::mt19937_64 with the default seed is fixed by the standard.
  std::mt19937_64 ref;
  Rng c(5489u);
  EXPECT_EQ(c.uniform(), static_cast<double>(ref() >> 11) * 0x1.0p-53);
  EXPECT_STREQ(Rng::algorithm, "mt19937_64/box-muller");
}

TEST(Rng, NormalMoments) {
  Rng r(8);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  const Mat3 R = r.rotation();
  EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), 1e-14);
  EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
}

TEST(GenerateScene, Defaults) {
  const SyntheticScene s = generate_scene({});
  EXPECT_EQ(s.points.size(), 70u);
  EXPECT_EQ(s.correspondences.size(), 70u);
  EXPECT_EQ(s.cameras.size(), 2u);
  EXPECT_EQ(s.noise_sigma, 1e-5);
  for (const ProjPoint& x : s.points) EXPECT_EQ(x.coords()[3], 1.0);
  for (const Correspondence& c : s.correspondences) {
    EXPECT_LE(c.u.head<2>().cwiseAbs().maxCoeff(), 50.0 + 1e-3);
    EXPECT_LE(c.v.head<2>().cwiseAbs().maxCoeff(), 50.0 + 1e-3);
  }
}

TEST(GenerateScene, Deterministic) {
  const SyntheticScene a = scene(3, 0.0), b = scene(3, 0.0);
  ASSERT_EQ(a.correspondences.size(), b.correspondences.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].coords(), b.points[i].coords());
    EXPECT_EQ(a.correspondences[i].u, b.correspondences[i].u);
    EXPECT_EQ(a.correspondences[i].v, b.correspondences[i].v);
  }
  const SyntheticScene c = scene(4, 0.0);
  EXPECT_NE(a.points[0].coords(), c.points[0].coords());
}

TEST(GenerateScene, NoiseIsAdditiveOnImageCoordinates) {
  const SyntheticScene clean = scene(5, 0.0), noisy = scene(5, 1e-3);
  double s2 = 0;
  for (std::size_t i = 0; i < clean.points.size(); ++i) {
    EXPECT_EQ(clean.points[i].coords(), noisy.points[i].coords());
    s2 += (noisy.correspondences[i].u - clean.correspondences[i].u).squaredNorm();
    s2 += (noisy.correspondences[i].v - clean.correspondences[i].v).squaredNorm();
    EXPECT_EQ(noisy.correspondences[i].u[2], 1.0);
  }
  EXPECT_NEAR(std::sqrt(s2 / (4.0 * 70)), 1e-3, 2e-4);
}

TEST(GenerateScene, Validation) {
  SceneConfig cfg;
  cfg.sigma = -1;
  try {
    generate_scene(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_config);
    EXPECT_EQ(e.category(), ErrorCategory::validation);
  }
  cfg = {};
  cfg.points = 0;
  EXPECT_THROW(generate_scene(cfg), Error);
}

TEST(RunSfm, NoiselessSceneRecoversTheCameras) {
  const SfmReport r = run_sfm_experiment(scene(1, 0.0));
  ASSERT_TRUE(r.ok()) << r.message;
  EXPECT_EQ(r.rng_algorithm, std::string(Rng::algorithm));
  EXPECT_LT(tensor_distance(*r.tensor, EpipolarTensor(worked::integer_pair_tensor())), 1e-8);
  EXPECT_LT(r.epipolar.max_abs, 1e-9);
  const std::size_t k = static_cast<std::size_t>(r.equivalent_configuration);
  EXPECT_LT(r.equivalence_residual[k], 1e-9);
  EXPECT_GT(r.equivalence_residual[1 - k], 1e-3);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(r.tensor_agreement[i], 1e-9);
    EXPECT_LT(r.reprojection_rms[i], 1e-7);
  }
  // The equivalent configuration is the one with A2 second row (-14.22, 8.33, 9.25, 4.24).
  const CameraPair& eq = k == 0 ? r.configurations->first : r.configurations->second;
  EXPECT_NEAR(eq.a.A2()(1, 2), 9.25, 0.005);
}

TEST(RunSfm, NoisySceneStaysNearTheNoiselessRecovery) {
  const SfmReport clean = run_sfm_experiment(scene(1, 0.0));
  ASSERT_TRUE(clean.ok());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SfmReport r = run_sfm_experiment(scene(seed, 1e-5));
    ASSERT_TRUE(r.ok()) << r.message;
    EXPECT_LT(configuration_deviation(*r.configurations, *clean.configurations), 0.5);
    EXPECT_LT(std::max(r.reprojection_rms[0], r.reprojection_rms[1]), 1e-3);
  }
}

TEST(RunSfm, ResidualsAreRecomputableBitForBit) {
  const SyntheticScene s = scene(9, 1e-5);
  const SfmReport r = run_sfm_experiment(s);
  ASSERT_TRUE(r.ok());
  const std::array<const CameraPair*, 2> pairs{&r.configurations->first, &r.configurations->second};
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_TRUE(bitwise_equal(r.tensor_agreement[k], tensor_distance(tensor_from_cameras(*pairs[k]), *r.tensor)));
    EXPECT_TRUE(bitwise_equal(r.reprojection_rms[k], reprojection_rms(*pairs[k], s.correspondences)));
  }
  const ResidualSummary e = epipolar_summary(*r.tensor, s.correspondences);
  EXPECT_TRUE(bitwise_equal(r.epipolar.max_abs, e.max_abs));
  EXPECT_TRUE(bitwise_equal(r.epipolar.mean_abs, e.mean_abs));
  const SfmReport again = run_sfm_experiment(s);
  EXPECT_EQ(again.tensor->data(), r.tensor->data());
}

TEST(RunSfm, CorrespondencesWithoutCameras) {
  SyntheticScene s = scene(6, 0.0);
  s.cameras.clear();
  const SfmReport r = run_sfm_experiment(s);
  ASSERT_TRUE(r.ok()) << r.message;
  EXPECT_EQ(r.equivalent_configuration, -1);
  EXPECT_LT(std::max(r.reprojection_rms[0], r.reprojection_rms[1]), 1e-7);
}

TEST(RunSfm, CoplanarSceneReportsDegeneracy) {
  SyntheticScene s = scene(2, 0.0);
  const CameraPair pair{s.cameras[0], s.cameras[1]};
  s.correspondences.clear();
  Rng rng(2);
  while (s.correspondences.size() < 40) {
    const ProjPoint x(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.25, 1.0);
    s.correspondences.push_back({project(pair.a, x), project(pair.b, x)});
  }
  const SfmReport r = run_sfm_experiment(s);
  EXPECT_EQ(r.status, "rank_deficient_design");
  ASSERT_TRUE(r.error_category.has_value());
  EXPECT_EQ(*r.error_category, ErrorCategory::degeneracy);
}

TEST(RunSelfcal, NoiselessRun) {
  const SelfcalReport r = run_selfcal_experiment({});
  ASSERT_TRUE(r.ok()) << r.message;
  EXPECT_EQ(r.cameras.size(), 10u);
  EXPECT_LT(r.daq_error, 1e-8);
  EXPECT_LT(r.magnification_error, 1e-6);
  EXPECT_LT(r.similarity->orthogonality_error, 1e-8);
  EXPECT_LT(r.similarity->affine_error, 1e-8);
  EXPECT_EQ(r.true_magnifications[0][0], worked::first_camera_fu);
}

TEST(RunSelfcal, SmallNoise) {
  SelfcalConfig cfg;
  cfg.noise = 1e-4;
  const SelfcalReport r = run_selfcal_experiment(cfg);
  ASSERT_TRUE(r.ok()) << r.message;
  EXPECT_NEAR(r.upgrade->calibrations[0].magnification1, worked::first_camera_fu, 0.05);
  EXPECT_NEAR(r.upgrade->calibrations[0].magnification2, worked::first_camera_fv, 0.05);
  EXPECT_LT(r.daq_error, 0.03);
  EXPECT_LT(r.similarity->orthogonality_error, 1e-2);
  EXPECT_LT(r.similarity->affine_error, 1e-2);
}

TEST(RunSelfcal, TooFewCamerasIsReported) {
  SelfcalConfig cfg;
  cfg.cameras = 3;
  const SelfcalReport r = run_selfcal_experiment(cfg);
  EXPECT_EQ(r.status, "insufficient_constraints");
  EXPECT_EQ(r.error_category, ErrorCategory::validation);
}

TEST(RunSelfcal, Deterministic) {
  SelfcalConfig cfg;
  cfg.noise = 1e-4;
  const SelfcalReport a = run_selfcal_experiment(cfg), b = run_selfcal_experiment(cfg);
  EXPECT_EQ(a.estimate->M(), b.estimate->M());
  EXPECT_TRUE(bitwise_equal(a.magnification_error, b.magnification_error));
}
