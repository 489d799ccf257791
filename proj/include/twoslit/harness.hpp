#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "twoslit/epipolar.hpp"
#include "twoslit/selfcal.hpp"
#include "twoslit/worked_examples.hpp"

namespace twoslit {

/// Seeded generator with a fixed, platform-independent output sequence:
/// std::mt19937_64 words mapped to doubles with 53-bit resolution, normals by
/// Box-Muller.
class Rng {
 public:
  static constexpr const char* algorithm = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Uniformly distributed rotation (unit quaternion from four normals).
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct SceneConfig {
  std::size_t points = 70;
  double sigma = 1e-5;
  std::uint64_t seed = 1;
  /// Points are drawn uniformly from [-box, box]^3.
  double box = 1.0;
  /// Points whose inhomogeneous image coordinates exceed this are redrawn.
  double image_half_extent = 50.0;
  CameraPair cameras = worked::integer_pair();
};

struct SyntheticScene {
  std::vector<ProjPoint> points;
  std::vector<TwoSlitCamera> cameras;
  double noise_sigma = 0;
  std::uint64_t rng_seed = 0;
  /// Noisy images of every point in the first two cameras, u3 = v3 = 1.
  std::vector<Correspondence> correspondences;
};

inline void validate(const SceneConfig& c) {
  if (c.points == 0) throw Error(Errc::invalid_config, "points must be positive");
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma))
    throw Error(Errc::invalid_config, "sigma must be finite and non-negative");
  if (!(c.box > 0.0) || !std::isfinite(c.box)) throw Error(Errc::invalid_config, "box must be positive");
  if (!(c.image_half_extent > 0.0))
    throw Error(Errc::invalid_config, "image extent must be positive");
}

namespace detail {

inline std::optional<Vec3> bounded_image(const TwoSlitCamera& cam, const ProjPoint& x, double extent) {
  Vec3 u;
  try {
    u = project(cam, x);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (std::abs(u[2]) <= tol::incidence * u.norm()) return std::nullopt;
  const Vec2 h = u.head<2>() / u[2];
  if (!(h.cwiseAbs().maxCoeff() <= extent)) return std::nullopt;
  return Vec3(h[0], h[1], 1.0);
}

}  // namespace detail

/// Random points seen by both cameras inside the image window, with
/// Gaussian noise of standard deviation sigma on the inhomogeneous image
/// coordinates.
inline SyntheticScene generate_scene(const SceneConfig& config) {
  validate(config);
  Rng rng(config.seed);
  SyntheticScene scene;
  scene.cameras = {config.cameras.a, config.cameras.b};
  scene.noise_sigma = config.sigma;
  scene.rng_seed = config.seed;
  const std::size_t max_draws = 1000 * config.points;
  for (std::size_t draw = 0; scene.points.size() < config.points; ++draw) {
    if (draw >= max_draws)
      throw Error(Errc::invalid_config, "too few points fall inside the image window");
    const ProjPoint x(rng.uniform(-config.box, config.box), rng.uniform(-config.box, config.box),
                      rng.uniform(-config.box, config.box), 1.0);
    const auto u = detail::bounded_image(config.cameras.a, x, config.image_half_extent);
    const auto v = detail::bounded_image(config.cameras.b, x, config.image_half_extent);
    if (!u || !v) continue;
    scene.points.push_back(x);
    scene.correspondences.push_back({*u, *v});
  }
  for (Correspondence& c : scene.correspondences) {
    c.u[0] += rng.normal(0.0, config.sigma);
    c.u[1] += rng.normal(0.0, config.sigma);
    c.v[0] += rng.normal(0.0, config.sigma);
    c.v[1] += rng.normal(0.0, config.sigma);
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Structure from motion

/// Root mean square image distance after triangulating every correspondence
/// with the pair and reprojecting it.
inline double reprojection_rms(const CameraPair& pair, std::span<const Correspondence> corrs) {
  double sum = 0.0;
  for (const Correspondence& c : corrs) {
    const ProjPoint X = triangulate(pair, c);
    const double du = image_distance(project(pair.a, X), c.u);
    const double dv = image_distance(project(pair.b, X), c.v);
    sum += du * du + dv * dv;
  }
  return std::sqrt(sum / static_cast<double>(2 * corrs.size()));
}

struct ResidualSummary {
  double mean_abs = 0;
  double max_abs = 0;
};

inline ResidualSummary epipolar_summary(const EpipolarTensor& F, std::span<const Correspondence> corrs) {
  ResidualSummary s;
  for (const Correspondence& c : corrs) {
    const double r = std::abs(epipolar_residual(F, c));
    s.mean_abs += r;
    s.max_abs = std::max(s.max_abs, r);
  }
  if (!corrs.empty()) s.mean_abs /= static_cast<double>(corrs.size());
  return s;
}

/// Largest entry difference between two camera pairs.
inline double pair_deviation(const CameraPair& x, const CameraPair& y) {
  return std::max({(x.a.A1() - y.a.A1()).cwiseAbs().maxCoeff(), (x.a.A2() - y.a.A2()).cwiseAbs().maxCoeff(),
                   (x.b.A1() - y.b.A1()).cwiseAbs().maxCoeff(), (x.b.A2() - y.b.A2()).cwiseAbs().maxCoeff()});
}

/// Deviation between two sets of configurations, minimized over matching.
inline double configuration_deviation(const Configurations& x, const Configurations& y) {
  const double same_order = std::max(pair_deviation(x.first, y.first), pair_deviation(x.second, y.second));
  const double swapped = std::max(pair_deviation(x.first, y.second), pair_deviation(x.second, y.first));
  return std::min(same_order, swapped);
}

struct SfmReport {
  std::string rng_algorithm = Rng::algorithm;
  std::uint64_t seed = 0;
  double sigma = 0;
  std::size_t correspondences = 0;
  /// "ok" or the error code that stopped the pipeline.
  std::string status = "ok";
  std::optional<ErrorCategory> error_category;
  std::string message;

  std::optional<EpipolarTensor> tensor;
  ResidualSummary epipolar;
  std::vector<double> candidate_residuals;
  std::optional<MinorMatrix> minor_matrix;
  std::optional<Configurations> configurations;
  /// Distance between each configuration's tensor and the estimate.
  std::array<double, 2> tensor_agreement{};
  std::array<double, 2> reprojection_rms{};
  /// Projective-equivalence residual of each configuration against the true
  /// cameras.
  std::array<double, 2> equivalence_residual{};
  /// Index (0 or 1) of the configuration equivalent to the true cameras, or
  /// -1 when the scene has no cameras.
  int equivalent_configuration = -1;

  bool ok() const { return status == "ok"; }
};

inline SfmReport run_sfm_experiment(const SyntheticScene& scene) {
  SfmReport r;
  r.seed = scene.rng_seed;
  r.sigma = scene.noise_sigma;
  r.correspondences = scene.correspondences.size();
  try {
    const EpipolarTensor F = estimate_tensor_linear(scene.correspondences);
    r.tensor = F;
    r.epipolar = epipolar_summary(F, scene.correspondences);
    const auto candidates = recover_minor_matrices(F);
    for (const auto& c : candidates) r.candidate_residuals.push_back(c.residual);
    r.minor_matrix = candidates.front().C;
    const Configurations conf = two_configurations(candidates.front().C);
    r.configurations = conf;
    const std::array<const CameraPair*, 2> pairs{&conf.first, &conf.second};
    for (std::size_t k = 0; k < 2; ++k) {
      r.tensor_agreement[k] = tensor_distance(tensor_from_cameras(*pairs[k]), F);
      r.reprojection_rms[k] = reprojection_rms(*pairs[k], scene.correspondences);
    }
    // Ground truth is optional: correspondences read from disk have none.
    if (scene.cameras.size() >= 2) {
      const CameraPair truth{scene.cameras[0], scene.cameras[1]};
      for (std::size_t k = 0; k < 2; ++k) r.equivalence_residual[k] = projective_equivalence(truth, *pairs[k]).residual;
      r.equivalent_configuration = r.equivalence_residual[0] <= r.equivalence_residual[1] ? 0 : 1;
    }
  } catch (const Error& e) {
    r.status = std::string(to_string(e.code()));
    r.error_category = e.category();
    r.message = e.what();
  }
  return r;
}

// ---------------------------------------------------------------------------
// Self-calibration

struct SelfcalConfig {
  std::size_t cameras = 10;
  std::uint64_t seed = 1;
  /// Gaussian noise added to the entries of each unit-norm camera matrix.
  double noise = 0.0;
  Mat4 Q = worked::upgrade_Q();
  /// Diagonal magnifications of the first camera; later ones are random.
  double first_fu = worked::first_camera_fu;
  double first_fv = worked::first_camera_fv;
};

struct SelfcalReport {
  std::string rng_algorithm = Rng::algorithm;
  std::uint64_t seed = 0;
  double noise = 0;
  std::string status = "ok";
  std::optional<ErrorCategory> error_category;
  std::string message;

  Mat4 Q;
  std::vector<TwoSlitCamera> cameras;
  /// Ground truth diagonal magnifications per camera.
  std::vector<std::array<double, 2>> true_magnifications;
  std::optional<DualAbsoluteQuadric> estimate;
  /// Largest entry difference of the unit-normalized quadrics.
  double daq_error = 0;
  std::optional<UpgradeResult> upgrade;
  std::optional<SimilarityCheck> similarity;
  /// Largest relative magnification error over all cameras.
  double magnification_error = 0;

  bool ok() const { return status == "ok"; }
};

inline void validate(const SelfcalConfig& c) {
  if (!(c.noise >= 0.0) || !std::isfinite(c.noise))
    throw Error(Errc::invalid_config, "noise must be finite and non-negative");
  if (!(c.first_fu > 0.0) || !(c.first_fv > 0.0))
    throw Error(Errc::invalid_config, "magnifications must be positive");
  if (!(std::abs(c.Q.determinant()) > tol::degenerate * std::pow(c.Q.norm(), 4)))
    throw Error(Errc::invalid_config, "Q must be invertible");
}

/// Random euclidean parallel camera K1 [r1 t1; r3 t3], K2 [r2 t2; r3 t4]
/// with diagonal K.
inline TwoSlitCamera random_parallel_camera(Rng& rng, double fu, double fv) {
  const Mat3 R = rng.rotation();
  const Vec3 r1 = R.row(0).transpose();
  const Vec3 r3 = R.row(2).transpose();
  const double theta = rng.uniform(0.3, std::numbers::pi - 0.3);
  const Vec3 r2 = std::cos(theta) * r1 + std::sin(theta) * Vec3(R.row(1).transpose());
  const double t1 = rng.uniform(-1, 1), t2 = rng.uniform(-1, 1), t3 = rng.uniform(-1, 1);
  const double d = rng.uniform(0.5, 2.0);
  Mat24 B1, B2;
  B1 << r1.transpose(), t1, r3.transpose(), t3;
  B2 << r2.transpose(), t2, r3.transpose(), t3 + d;
  const Mat2 K1 = Vec2(fu, 1.0).asDiagonal();
  const Mat2 K2 = Vec2(fv, 1.0).asDiagonal();
  return {K1 * B1, K2 * B2};
}

inline SelfcalReport run_selfcal_experiment(const SelfcalConfig& config) {
  SelfcalReport r;
  r.seed = config.seed;
  r.noise = config.noise;
  r.Q = config.Q;
  try {
    validate(config);
    Rng rng(config.seed);
    const Mat4 Qinv = config.Q.inverse();
    for (std::size_t i = 0; i < config.cameras; ++i) {
      const double fu = i == 0 ? config.first_fu : rng.uniform(0.5, 5.0);
      const double fv = i == 0 ? config.first_fv : rng.uniform(0.5, 5.0);
      const TwoSlitCamera euclid = random_parallel_camera(rng, fu, fv);
      Mat24 A1 = euclid.A1() * Qinv;
      Mat24 A2 = euclid.A2() * Qinv;
      A1 /= A1.norm();
      A2 /= A2.norm();
      for (Mat24* A : {&A1, &A2})
        for (int k = 0; k < 8; ++k) (*A)(k / 4, k % 4) += rng.normal(0.0, config.noise);
      r.cameras.emplace_back(A1, A2);
      r.true_magnifications.push_back({fu, fv});
    }
    r.estimate = estimate_daq(r.cameras);
    const Mat4 truth = config.Q * Vec4(1, 1, 1, 0).asDiagonal() * config.Q.transpose();
    r.daq_error = (r.estimate->unit() - truth / truth(0, 0)).cwiseAbs().maxCoeff();
    r.upgrade = extract_upgrade(*r.estimate, r.cameras);
    r.similarity = similarity_check(config.Q, r.upgrade->Qprime);
    for (std::size_t i = 0; i < r.cameras.size(); ++i) {
      const auto& c = r.upgrade->calibrations[i];
      const auto& t = r.true_magnifications[i];
      r.magnification_error = std::max({r.magnification_error, std::abs(c.magnification1 / t[0] - 1.0),
                                        std::abs(c.magnification2 / t[1] - 1.0)});
    }
  } catch (const Error& e) {
    r.status = std::string(to_string(e.code()));
    r.error_category = e.category();
    r.message = e.what();
  }
  return r;
}

}  // namespace twoslit
