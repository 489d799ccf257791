#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "twoslit/camera.hpp"

namespace twoslit {

/// Symmetric 4x4 matrix Q diag(1,1,1,0) Q^T, defined up to scale.
class DualAbsoluteQuadric {
 public:
  explicit DualAbsoluteQuadric(const Mat4& M) : M_(0.5 * (M + M.transpose())) {
    if (!M.allFinite() || M.norm() == 0.0)
      throw Error(Errc::zero_vector, "quadric must be finite and nonzero");
    if ((M - M.transpose()).norm() > 1e-9 * M.norm())
      throw Error(Errc::invalid_argument, "quadric must be symmetric");
  }

  const Mat4& M() const noexcept { return M_; }

  /// Scaled so that the top-left entry is 1.
  Mat4 unit() const {
    if (M_(0, 0) == 0.0) throw Error(Errc::normalization_failure, "top-left entry vanishes");
    return M_ / M_(0, 0);
  }

  /// Eigenvalues of M / |M|, sorted descending.
  Vec4 eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Mat4> es(M_ / M_.norm());
    return es.eigenvalues().reverse();
  }

 private:
  Mat4 M_;
};

/// Coefficients of (A M A^T)_12 over the upper triangle of M, in the order
/// m00 m01 m02 m03 m11 m12 m13 m22 m23 m33.
inline Eigen::Matrix<double, 10, 1> daq_constraint(const Mat24& A) {
  Eigen::Matrix<double, 10, 1> row;
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      row[n++] = (i == j) ? A(0, i) * A(1, i) : A(0, i) * A(1, j) + A(0, j) * A(1, i);
  return row;
}

inline Mat4 symmetric_from_upper(const Eigen::Matrix<double, 10, 1>& m) {
  Mat4 M;
  int n = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) M(i, j) = M(j, i) = m[n++];
  return M;
}

inline constexpr std::size_t min_daq_equations = 9;
inline constexpr double daq_nullity_tolerance = 1e-10;

/// Linear estimate from the vanishing off-diagonal entry of every K K^T,
/// assuming principal points at the origin.
inline DualAbsoluteQuadric estimate_daq(std::span<const TwoSlitCamera> cameras,
                                        bool principal_point_at_origin = true) {
  if (!principal_point_at_origin)
    throw Error(Errc::unsupported_prior, "only the zero principal point prior is implemented");
  const std::size_t n = 2 * cameras.size();
  if (n < min_daq_equations)
    throw Error(Errc::insufficient_constraints, "at least 5 cameras are required");
  Eigen::MatrixXd S(static_cast<Eigen::Index>(n), 10);
  Eigen::Index r = 0;
  for (const TwoSlitCamera& cam : cameras) {
    for (const Mat24* A : {&cam.A1(), &cam.A2()}) {
      const Mat24 An = *A / A->norm();
      auto row = daq_constraint(An);
      S.row(r++) = row.transpose();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  if (!(s[8] > daq_nullity_tolerance * s[0]))
    throw Error(Errc::degenerate_motion, "constraints leave more than one solution");
  Mat4 M = symmetric_from_upper(svd.matrixV().col(9));
  if (M(0, 0) < 0) M = -M;
  return DualAbsoluteQuadric(M);
}

struct CameraCalibration {
  Mat2 K1, K2;
  /// Ratio of the norms of the direction parts of the two rows of each
  /// upgraded matrix; equals the diagonal magnification for diagonal K.
  double magnification1 = 0;
  double magnification2 = 0;
  bool parallel = false;
};

struct UpgradeResult {
  Mat4 Qprime;
  Vec4 eigenvalues;
  std::vector<CameraCalibration> calibrations;
  std::vector<TwoSlitCamera> upgraded;
};

struct UpgradeOptions {
  /// Largest admissible |lambda4| / lambda1.
  double rank_tolerance = 1e-3;
  /// Angle below which an upgraded camera counts as parallel.
  double parallel_tolerance = 1e-6;
};

inline double row_norm_ratio(const Mat24& A) {
  return A.block<1, 3>(0, 0).norm() / A.block<1, 3>(1, 0).norm();
}

inline CameraCalibration calibrate_upgraded(const TwoSlitCamera& cam, double parallel_tolerance) {
  CameraCalibration c;
  c.parallel = is_parallel(cam, parallel_tolerance);
  if (c.parallel) {
    const ParallelDecomposition d = decompose_parallel(cam, parallel_tolerance);
    c.K1 = d.K1;
    c.K2 = d.K2;
  } else {
    c.K1 = rq_calibrate(cam.A1()).K;
    c.K2 = rq_calibrate(cam.A2()).K;
  }
  c.magnification1 = row_norm_ratio(cam.A1());
  c.magnification2 = row_norm_ratio(cam.A2());
  return c;
}

/// Q' with Q' diag(1,1,1,0) Q'^T = M: columns 1-3 are eigenvectors scaled by
/// the square roots of the three largest eigenvalues, column 4 the unit
/// eigenvector of the smallest.
inline UpgradeResult extract_upgrade(const DualAbsoluteQuadric& quadric,
                                     std::span<const TwoSlitCamera> cameras,
                                     const UpgradeOptions& options = {}) {
  const Mat4 M = quadric.M() / quadric.M().norm();
  Eigen::SelfAdjointEigenSolver<Mat4> es(M);
  const Vec4 lam = es.eigenvalues().reverse();
  const Mat4 V = es.eigenvectors().rowwise().reverse();
  if (!(lam[0] > 0.0)) throw Error(Errc::indefinite_quadric, "quadric has no positive eigenvalue");
  if (std::abs(lam[3]) > options.rank_tolerance * lam[0])
    throw Error(Errc::rank_test_failure, "quadric is not of rank 3");
  UpgradeResult out;
  out.eigenvalues = lam;
  for (int i = 0; i < 3; ++i) {
    double l = lam[i];
    if (l < 0.0) {
      if (l < -1e-10 * lam[0]) throw Error(Errc::indefinite_quadric, "quadric is not semidefinite");
      l = 0.0;
    }
    if (l == 0.0) throw Error(Errc::rank_test_failure, "quadric has rank below 3");
    out.Qprime.col(i) = V.col(i) * std::sqrt(l);
  }
  out.Qprime.col(3) = V.col(3);
  for (const TwoSlitCamera& cam : cameras) {
    TwoSlitCamera up(Mat24(cam.A1() * out.Qprime), Mat24(cam.A2() * out.Qprime));
    out.calibrations.push_back(calibrate_upgraded(up, options.parallel_tolerance));
    out.upgraded.push_back(std::move(up));
  }
  return out;
}

/// How far T = Q^-1 Q' (scaled to T44 = 1) is from a similarity.
struct SimilarityCheck {
  Mat4 T;
  double scale = 0;              // s with S^T S ~ s^2 I
  double orthogonality_error = 0;  // max |S^T S / s^2 - I|
  double affine_error = 0;         // max |T(3, 0:3)| / s
};

inline SimilarityCheck similarity_check(const Mat4& Q, const Mat4& Qprime) {
  Eigen::FullPivLU<Mat4> lu(Q);
  if (!lu.isInvertible()) throw Error(Errc::singular_transform, "Q must be invertible");
  SimilarityCheck out;
  out.T = lu.solve(Qprime);
  if (out.T(3, 3) == 0.0) throw Error(Errc::normalization_failure, "T44 vanishes");
  out.T /= out.T(3, 3);
  const Mat3 S = out.T.topLeftCorner<3, 3>();
  const Mat3 G = S.transpose() * S;
  const double s2 = G.trace() / 3.0;
  out.scale = std::sqrt(s2);
  out.orthogonality_error = (G / s2 - Mat3::Identity()).cwiseAbs().maxCoeff();
  out.affine_error = out.T.block<1, 3>(3, 0).cwiseAbs().maxCoeff() / out.scale;
  return out;
}

}  // namespace twoslit
