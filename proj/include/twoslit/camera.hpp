#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "twoslit/congruence.hpp"

namespace twoslit {

/// Projective two-slit camera given by two 2x4 matrices A1 = (p1; p2) and
/// A2 = (q1; q2). The image of x is (p1.x q2.x, p2.x q1.x, p2.x q2.x).
///
/// Matrices are kept exactly as supplied so that the sign and scale chosen by
/// the caller survive; normalized() gives the canonical representative used
/// for comparisons.
class TwoSlitCamera {
 public:
  TwoSlitCamera(const Mat24& A1, const Mat24& A2) : A1_(A1), A2_(A2) {
    if (!A1_.allFinite() || !A2_.allFinite())
      throw Error(Errc::invalid_camera, "camera matrices must be finite");
    for (const Mat24* A : {&A1_, &A2_}) {
      Eigen::JacobiSVD<Mat24> svd(*A);
      const auto s = svd.singularValues();
      if (!(s[1] > tol::degenerate * s[0]))
        throw Error(Errc::invalid_camera, "camera matrices must have rank 2");
    }
    const Mat4 M = stacked();
    double rows = 1.0;
    for (int i = 0; i < 4; ++i) rows *= M.row(i).norm();
    if (!(std::abs(M.determinant()) > tol::singular * rows))
      throw Error(Errc::invalid_camera, "null spaces of A1 and A2 must be disjoint");
  }

  const Mat24& A1() const noexcept { return A1_; }
  const Mat24& A2() const noexcept { return A2_; }
  Vec4 p1() const { return A1_.row(0).transpose(); }
  Vec4 p2() const { return A1_.row(1).transpose(); }
  Vec4 q1() const { return A2_.row(0).transpose(); }
  Vec4 q2() const { return A2_.row(1).transpose(); }

  Mat4 stacked() const {
    Mat4 M;
    M << A1_, A2_;
    return M;
  }

  /// Each matrix scaled to unit Frobenius norm, sign fixed by the first
  /// nonzero entry of its second row.
  TwoSlitCamera normalized() const { return {normalize(A1_), normalize(A2_)}; }

 private:
  static Mat24 normalize(const Mat24& A) {
    Mat24 B = A / A.norm();
    for (int j = 0; j < 4; ++j) {
      if (std::abs(B(1, j)) > tol::incidence) {
        if (B(1, j) < 0) B = -B;
        break;
      }
    }
    return B;
  }

  Mat24 A1_, A2_;
};

/// Largest deviation between the normalized matrices.
inline double camera_distance(const TwoSlitCamera& a, const TwoSlitCamera& b) {
  const TwoSlitCamera na = a.normalized();
  const TwoSlitCamera nb = b.normalized();
  return std::max((na.A1() - nb.A1()).norm(), (na.A2() - nb.A2()).norm());
}

inline bool same(const TwoSlitCamera& a, const TwoSlitCamera& b, double tolerance = 1e-9) {
  return camera_distance(a, b) < tolerance;
}

inline Vec3 project(const TwoSlitCamera& cam, const ProjPoint& x) {
  const Vec4& X = x.coords();
  const double a1 = cam.p1().dot(X), a2 = cam.p2().dot(X);
  const double b1 = cam.q1().dot(X), b2 = cam.q2().dot(X);
  if (std::abs(a2) <= tol::incidence * cam.p2().norm() * x.norm() &&
      std::abs(b2) <= tol::incidence * cam.q2().norm() * x.norm())
    throw Error(Errc::undefined_projection, "point lies on the base line");
  return {a1 * b2, a2 * b1, a2 * b2};
}

/// Two independent null vectors of a rank-2 2x4 matrix.
inline std::pair<Vec4, Vec4> null_basis(const Mat24& A) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(A, Eigen::ComputeFullV);
  if (!(svd.singularValues()[1] > tol::degenerate * svd.singularValues()[0]))
    throw Error(Errc::invalid_camera, "matrix is rank deficient");
  return {svd.matrixV().col(2), svd.matrixV().col(3)};
}

inline std::pair<PluckerLine, PluckerLine> slits(const TwoSlitCamera& cam) {
  const auto [a, b] = null_basis(cam.A1());
  const auto [c, d] = null_basis(cam.A2());
  return {join_points(ProjPoint(a), ProjPoint(b)), join_points(ProjPoint(c), ProjPoint(d))};
}

/// The line {p2.x = q2.x = 0}; every admissible retinal plane contains it.
inline PluckerLine base_line(const TwoSlitCamera& cam) {
  return meet_planes(ProjPlane(cam.p2()), ProjPlane(cam.q2()));
}

/// 2 p2 - q2. For the camera with p2 = x3, q2 = x3 + x4 this is x3 - x4 = 0.
inline ProjPlane default_retinal_plane(const TwoSlitCamera& cam) {
  return ProjPlane(Vec4(2.0 * cam.p2() - cam.q2()));
}

inline TwoSlitCongruence congruence_of(const TwoSlitCamera& cam) {
  return {meet_planes(ProjPlane(cam.p1()), ProjPlane(cam.p2())),
          meet_planes(ProjPlane(cam.q1()), ProjPlane(cam.q2()))};
}

/// Quadratic camera with the same image map, on the given retinal plane.
inline QuadraticCamera to_quadratic(const TwoSlitCamera& cam,
                                    const std::optional<ProjPlane>& plane = std::nullopt) {
  const ProjPlane pi = plane.value_or(default_retinal_plane(cam));
  return {congruence_of(cam), intrinsic_frame(cam.p1(), cam.p2(), cam.q1(), cam.q2(), pi)};
}

inline constexpr double parallel_angle_tolerance = 1e-8;

namespace detail {

// Angle between the lines spanned by a and b.
inline double line_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

}  // namespace detail

inline bool is_parallel(const TwoSlitCamera& cam, double tolerance = parallel_angle_tolerance) {
  const Vec3 m3 = cam.A1().block<1, 3>(1, 0).transpose();
  const Vec3 n3 = cam.A2().block<1, 3>(1, 0).transpose();
  if (m3.norm() <= tol::degenerate * cam.A1().norm() || n3.norm() <= tol::degenerate * cam.A2().norm())
    return false;
  return detail::line_angle(m3, n3) < tolerance;
}

/// A = K [r_top^T t_top; r_bottom^T t_bottom] with K upper triangular,
/// K(1,1) = 1 and K(0,0) > 0. The scale of A is divided out with a positive
/// factor, so its sign is kept.
struct RowBlockRQ {
  Mat2 K;
  Vec3 r_top;
  Vec3 r_bottom;
  Vec2 t;
};

inline RowBlockRQ rq_calibrate(const Mat24& A) {
  const Vec3 bottom = A.block<1, 3>(1, 0).transpose();
  const double c = bottom.norm();
  if (c <= tol::degenerate * A.norm())
    throw Error(Errc::zero_direction, "second row has zero direction");
  const Mat24 An = A / c;
  RowBlockRQ out;
  out.r_bottom = bottom / c;
  const Vec3 top = An.block<1, 3>(0, 0).transpose();
  const double skew = top.dot(out.r_bottom);
  const Vec3 rest = top - skew * out.r_bottom;
  const double f = rest.norm();
  if (f <= tol::degenerate * top.norm() || f == 0.0)
    throw Error(Errc::invalid_camera, "rows of the 3x2 block are dependent");
  out.r_top = rest / f;
  out.K << f, skew, 0.0, 1.0;
  out.t[1] = An(1, 3);
  out.t[0] = (An(0, 3) - skew * out.t[1]) / f;
  return out;
}

/// A1 = K1 [r1 t1; r3 t3], A2 = K2 [r2 t2; r3 t4]. K2 is stored without the
/// factor 2 of the canonical form, so the canonical camera has K2 = diag(2, 1).
struct ParallelDecomposition {
  Mat2 K1, K2;
  Vec3 r1, r2, r3;
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double theta = 0;
  double d = 0;

  double fu() const { return K1(0, 0); }
  double u0() const { return K1(0, 1); }
  /// Magnification in v with the canonical factor 2 removed.
  double fv() const { return K2(0, 0) / 2.0; }
  double v0() const { return K2(0, 1); }

  TwoSlitCamera rebuild() const {
    Mat24 B1, B2;
    B1 << r1.transpose(), t1, r3.transpose(), t3;
    B2 << r2.transpose(), t2, r3.transpose(), t4;
    return {K1 * B1, K2 * B2};
  }
};

inline ParallelDecomposition decompose_parallel(const TwoSlitCamera& cam,
                                                double tolerance = parallel_angle_tolerance) {
  const Vec3 m3 = cam.A1().block<1, 3>(1, 0).transpose();
  const Vec3 n3 = cam.A2().block<1, 3>(1, 0).transpose();
  if (m3.norm() <= tol::degenerate * cam.A1().norm() || n3.norm() <= tol::degenerate * cam.A2().norm())
    throw Error(Errc::zero_direction, "slits are not finite");
  if (!is_parallel(cam, tolerance))
    throw Error(Errc::not_parallel, "retinal plane is not parallel to the slits");
  const RowBlockRQ a = rq_calibrate(cam.A1());
  const RowBlockRQ b = rq_calibrate(m3.dot(n3) < 0 ? Mat24(-cam.A2()) : cam.A2());
  ParallelDecomposition out;
  out.K1 = a.K;
  out.K2 = b.K;
  out.r1 = a.r_top;
  out.r2 = b.r_top;
  out.r3 = a.r_bottom;
  out.t1 = a.t[0];
  out.t3 = a.t[1];
  out.t2 = b.t[0];
  out.t4 = b.t[1];
  out.theta = std::acos(std::clamp(out.r1.dot(out.r2), -1.0, 1.0));
  out.d = std::abs(out.t4 - out.t3);
  return out;
}

/// A1 = diag(1/v, 1) [r1 t1; 0 1], A2 = K2 [r2 t2; r3 t3].
struct PushbroomDecomposition {
  Mat2 K1, K2;
  Vec3 r1, r2, r3;
  double t1 = 0, t2 = 0, t3 = 0;
  double theta = 0;

  double v() const { return 1.0 / K1(0, 0); }
  double f() const { return K2(0, 0); }
  double u() const { return K2(0, 1); }

  TwoSlitCamera rebuild() const {
    Mat24 B1, B2;
    B1 << r1.transpose(), t1, 0.0, 0.0, 0.0, 1.0;
    B2 << r2.transpose(), t2, r3.transpose(), t3;
    return {K1 * B1, K2 * B2};
  }
};

inline constexpr double pushbroom_orthogonality_tolerance = 1e-9;

inline PushbroomDecomposition decompose_pushbroom(const TwoSlitCamera& cam) {
  const Mat24& A1 = cam.A1();
  if (A1.block<1, 3>(1, 0).norm() > tol::incidence * A1.row(1).norm())
    throw Error(Errc::shape_mismatch, "second row of A1 must be proportional to (0, 0, 0, 1)");
  const Mat24 A1n = A1 / A1(1, 3);
  const Vec3 m1 = A1n.block<1, 3>(0, 0).transpose();
  const Vec3 m3 = cam.A2().block<1, 3>(1, 0).transpose();
  if (m1.norm() == 0.0 || m3.norm() <= tol::degenerate * cam.A2().norm())
    throw Error(Errc::zero_direction, "direction vectors must be nonzero");
  if (std::abs(m1.dot(m3)) > pushbroom_orthogonality_tolerance * m1.norm() * m3.norm())
    throw Error(Errc::non_orthogonal, "m1 and m3 must be orthogonal");
  const double v = 1.0 / m1.norm();
  const RowBlockRQ b = rq_calibrate(cam.A2());
  PushbroomDecomposition out;
  out.K1 << 1.0 / v, 0.0, 0.0, 1.0;
  out.K2 = b.K;
  out.r1 = m1 * v;
  out.t1 = A1n(0, 3) * v;
  out.r2 = b.r_top;
  out.r3 = b.r_bottom;
  out.t2 = b.t[0];
  out.t3 = b.t[1];
  out.theta = std::acos(std::clamp(out.r1.dot(out.r2), -1.0, 1.0));
  return out;
}

/// Camera seeing H x where the original saw x.
inline TwoSlitCamera apply_space_transform(const TwoSlitCamera& cam, const Mat4& H) {
  double cols = 1.0;
  for (int j = 0; j < 4; ++j) cols *= H.col(j).norm();
  if (!H.allFinite() || !(std::abs(H.determinant()) > tol::singular * cols))
    throw Error(Errc::singular_transform, "space transform must be nonsingular");
  const Mat4 Hinv = H.inverse();
  return {Mat24(cam.A1() * Hinv), Mat24(cam.A2() * Hinv)};
}

/// Canonical parallel camera: slits at angle theta and distance d.
inline TwoSlitCamera canonical_parallel(double theta, double d) {
  Mat24 A1, A2;
  A1 << 1, 0, 0, 0, 0, 0, 1, 0;
  A2 << 2 * std::cos(theta), 2 * std::sin(theta), 0, 0, 0, 0, 1, d;
  return {A1, A2};
}

/// Canonical pushbroom camera moving at angle theta to the scanning planes.
inline TwoSlitCamera canonical_pushbroom(double theta) {
  Mat24 A1, A2;
  A1 << std::sin(theta), std::cos(theta), 0, 0, 0, 0, 0, 1;
  A2 << 0, 1, 0, 0, 0, 0, 1, 0;
  return {A1, A2};
}

}  // namespace twoslit
