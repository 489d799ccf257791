#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "twoslit/twoslit.hpp"

namespace twoslit::test {

/// Seeded generator for randomized trials.
struct Gen {
  explicit Gen(std::uint64_t seed) : engine(seed) {}

  double uni(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(engine); }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(engine); }

  Vec3 vec3() { return {gauss(), gauss(), gauss()}; }
  Vec4 vec4() { return {gauss(), gauss(), gauss(), gauss()}; }
  Vec4 finite_point(double box = 1.0) { return {uni(-box, box), uni(-box, box), uni(-box, box), 1.0}; }

  ProjPoint point() { return ProjPoint(vec4()); }
  ProjPlane plane() { return ProjPlane(vec4()); }
  PluckerLine line() { return join_points(point(), point()); }

  Mat4 matrix4() {
    Mat4 H;
    for (int i = 0; i < 16; ++i) H(i / 4, i % 4) = gauss();
    return H;
  }

  /// Random 4x4 matrix with condition number below max_condition.
  Mat4 conditioned4(double max_condition = 100.0) {
    for (;;) {
      const Mat4 H = matrix4();
      const auto sv = Eigen::JacobiSVD<Mat4>(H).singularValues();
      if (sv[0] < max_condition * sv[3]) return H;
    }
  }

  Mat24 matrix24() {
    Mat24 A;
    for (int i = 0; i < 8; ++i) A(i / 4, i % 4) = gauss();
    return A;
  }

  TwoSlitCamera camera() { return {matrix24(), matrix24()}; }

  Mat3 rotation() {
    Eigen::Quaterniond q(gauss(), gauss(), gauss(), gauss());
    q.normalize();
    return q.toRotationMatrix();
  }

  Mat4 euclidean() {
    Mat4 H = Mat4::Identity();
    H.topLeftCorner<3, 3>() = rotation();
    H.block<3, 1>(0, 3) = vec3();
    return H;
  }

  /// Upper-triangular 2x2 with positive diagonal and unit lower-right entry.
  Mat2 calibration() {
    Mat2 K;
    K << uni(0.3, 5.0), uni(-2.0, 2.0), 0.0, 1.0;
    return K;
  }

  /// K1 [r1 t1; r3 t3], K2 [r2 t2; r3 t4] from a random orthonormal frame.
  TwoSlitCamera parallel_camera(const Mat2& K1, const Mat2& K2, double* theta = nullptr, double* d = nullptr) {
    const Mat3 R = rotation();
    const Vec3 r1 = R.row(0).transpose();
    const Vec3 r3 = R.row(2).transpose();
    const double th = uni(0.2, std::numbers::pi - 0.2);
    const Vec3 r2 = std::cos(th) * r1 + std::sin(th) * Vec3(R.row(1).transpose());
    const double t3 = uni(), dist = uni(0.3, 3.0) * (uni() < 0 ? -1.0 : 1.0);
    Mat24 B1, B2;
    B1 << r1.transpose(), uni(), r3.transpose(), t3;
    B2 << r2.transpose(), uni(), r3.transpose(), t3 + dist;
    if (theta) *theta = th;
    if (d) *d = std::abs(dist);
    return {K1 * B1, K2 * B2};
  }

  std::mt19937_64 engine;
};

inline double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

/// Relative distance between a and b after best rescaling of a.
template <class A, class B>
double rel_up_to_scale(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double s = a.cwiseProduct(b).sum() / a.squaredNorm();
  return (s * a - b).norm() / b.norm();
}

}  // namespace twoslit::test
