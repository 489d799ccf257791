#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "twoslit/error.hpp"

namespace twoslit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Mat43 = Eigen::Matrix<double, 4, 3>;

namespace tol {
/// Scale-invariant incidence threshold: |expr| / (product of input norms).
inline constexpr double incidence = 1e-9;
/// Cosine distance below which two homogeneous vectors are the same point.
inline constexpr double projective = 1e-9;
/// Normalized determinant / singular value ratio treated as singular.
inline constexpr double degenerate = 1e-9;
/// Hadamard ratio |det M| / (product of row or column norms) treated as a
/// singular 4x4 matrix.
inline constexpr double singular = 1e-14;
}  // namespace tol

/// 1 - |cos(a, b)|. Zero iff a and b are proportional (either sign).
template <class A, class B>
double cosine_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - std::abs(a.dot(b)) / (na * nb);
}

template <class A, class B>
bool proportional(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                  double tolerance = tol::projective) {
  return cosine_distance(a, b) < tolerance;
}

/// Relative distance between the rays spanned by a and b, after aligning
/// scale and sign: || a/|a| - s b/|b| || with s = sign(a.b).
template <class A, class B>
double projective_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const auto an = a.normalized().eval();
  auto bn = b.normalized().eval();
  if (an.dot(bn) < 0.0) bn = -bn;
  return (an - bn).norm();
}

/// Homogeneous 4-vector with a tag distinguishing points from planes.
template <class Tag>
class Homogeneous4 {
 public:
  explicit Homogeneous4(const Vec4& coords) : coords_(coords) {
    if (!coords_.allFinite() || coords_.norm() == 0.0)
      throw Error(Errc::zero_vector, "homogeneous coordinates must be finite and not all zero");
  }
  Homogeneous4(double a, double b, double c, double d) : Homogeneous4(Vec4(a, b, c, d)) {}

  const Vec4& coords() const noexcept { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  double norm() const { return coords_.norm(); }

 private:
  Vec4 coords_;
};

using ProjPoint = Homogeneous4<struct PointTag>;
using ProjPlane = Homogeneous4<struct PlaneTag>;

template <class Tag>
bool same(const Homogeneous4<Tag>& a, const Homogeneous4<Tag>& b,
          double tolerance = tol::projective) {
  return proportional(a.coords(), b.coords(), tolerance);
}

inline double incidence_residual(const ProjPlane& w, const ProjPoint& x) {
  return std::abs(w.coords().dot(x.coords())) / (w.norm() * x.norm());
}

inline bool lies_on(const ProjPoint& x, const ProjPlane& w, double tolerance = tol::incidence) {
  return incidence_residual(w, x) < tolerance;
}

namespace detail {

// Antisymmetric matrix with M(i,j) = c_ij for c in (41, 42, 43, 23, 31, 12) order.
inline Mat4 plucker_layout(const Vec6& c) {
  Mat4 m = Mat4::Zero();
  m(3, 0) = c[0];
  m(3, 1) = c[1];
  m(3, 2) = c[2];
  m(1, 2) = c[3];
  m(2, 0) = c[4];
  m(0, 1) = c[5];
  return m - m.transpose();
}

// c_ij = a_i b_j - a_j b_i in (41, 42, 43, 23, 31, 12) order.
inline Vec6 exterior(const Vec4& a, const Vec4& b) {
  auto e = [&](int i, int j) { return a[i] * b[j] - a[j] * b[i]; };
  Vec6 c;
  c << e(3, 0), e(3, 1), e(3, 2), e(1, 2), e(2, 0), e(0, 1);
  return c;
}

inline Vec6 swap_halves(const Vec6& c) {
  Vec6 d;
  d << c.tail<3>(), c.head<3>();
  return d;
}

}  // namespace detail

/// Generalized cross product: the vector orthogonal to a, b and c.
/// For three points this is the plane through them, for three planes the
/// common point.
inline Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  Eigen::Matrix<double, 3, 4> m;
  m.row(0) = a.transpose();
  m.row(1) = b.transpose();
  m.row(2) = c.transpose();
  Vec4 w;
  for (int i = 0; i < 4; ++i) {
    Mat3 minor;
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      minor.col(col++) = m.col(j);
    }
    w[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return w;
}

/// A line of P^3 in Plücker coordinates (l41, l42, l43, l23, l31, l12).
class PluckerLine {
 public:
  explicit PluckerLine(const Vec6& coords) : l_(coords) {
    if (!l_.allFinite() || l_.norm() == 0.0)
      throw Error(Errc::zero_vector, "Plücker coordinates must be finite and not all zero");
    if (std::abs(quadric_residual()) > tol::incidence)
      throw Error(Errc::invalid_line, "coordinates violate the Plücker quadric l.l* = 0");
  }

  /// From a primal Plücker matrix L = x y^T - y x^T.
  static PluckerLine from_primal(const Mat4& L) {
    Vec6 c;
    c << L(3, 0), L(3, 1), L(3, 2), L(1, 2), L(2, 0), L(0, 1);
    return PluckerLine(c);
  }

  /// From a dual Plücker matrix L* = u v^T - v u^T.
  static PluckerLine from_dual(const Mat4& Ls) {
    Vec6 c;
    c << Ls(3, 0), Ls(3, 1), Ls(3, 2), Ls(1, 2), Ls(2, 0), Ls(0, 1);
    return PluckerLine(detail::swap_halves(c));
  }

  const Vec6& coords() const noexcept { return l_; }
  double operator[](int i) const { return l_[i]; }
  double norm() const { return l_.norm(); }

  /// l* = (l23, l31, l12, l41, l42, l43).
  Vec6 dual() const { return detail::swap_halves(l_); }

  Mat4 primal_matrix() const { return detail::plucker_layout(l_); }
  Mat4 dual_matrix() const { return detail::plucker_layout(dual()); }

  /// l.l* / |l|^2, zero for every genuine line.
  double quadric_residual() const { return l_.dot(dual()) / l_.squaredNorm(); }

 private:
  Vec6 l_;
};

inline bool same(const PluckerLine& a, const PluckerLine& b, double tolerance = tol::projective) {
  return proportional(a.coords(), b.coords(), tolerance);
}

/// Bilinear pairing a.b*; vanishes iff the two lines meet.
inline double pairing(const PluckerLine& a, const PluckerLine& b) {
  return a.coords().dot(b.dual());
}

inline double meet_residual(const PluckerLine& a, const PluckerLine& b) {
  return std::abs(pairing(a, b)) / (a.norm() * b.norm());
}

inline bool lines_meet(const PluckerLine& a, const PluckerLine& b, double tolerance = tol::incidence) {
  return meet_residual(a, b) < tolerance;
}

/// |L* x| / (|L*| |x|): zero iff x lies on l.
inline double on_line_residual(const ProjPoint& x, const PluckerLine& l) {
  const Mat4 Ls = l.dual_matrix();
  return (Ls * x.coords()).norm() / (Ls.norm() * x.norm());
}

inline bool lies_on(const ProjPoint& x, const PluckerLine& l, double tolerance = tol::incidence) {
  return on_line_residual(x, l) < tolerance;
}

/// |L w| / (|L| |w|): zero iff l is contained in w.
inline double in_plane_residual(const PluckerLine& l, const ProjPlane& w) {
  const Mat4 L = l.primal_matrix();
  return (L * w.coords()).norm() / (L.norm() * w.norm());
}

/// x v y, with l_ij = x_i y_j - x_j y_i.
inline PluckerLine join_points(const ProjPoint& x, const ProjPoint& y) {
  const Vec6 c = detail::exterior(x.coords(), y.coords());
  if (c.norm() <= tol::incidence * x.norm() * y.norm())
    throw Error(Errc::coincident_points, "join of proportional points is undefined");
  return PluckerLine(c);
}

/// u ^ v for two planes.
inline PluckerLine meet_planes(const ProjPlane& u, const ProjPlane& v) {
  const Vec6 m = detail::exterior(u.coords(), v.coords());
  if (m.norm() <= tol::incidence * u.norm() * v.norm())
    throw Error(Errc::coincident_points, "meet of proportional planes is undefined");
  return PluckerLine(detail::swap_halves(m));
}

/// l ^ w = L w.
inline ProjPoint meet_line_plane(const PluckerLine& l, const ProjPlane& w) {
  const Mat4 L = l.primal_matrix();
  const Vec4 x = L * w.coords();
  if (x.norm() <= tol::incidence * L.norm() * w.norm())
    throw Error(Errc::line_in_plane, "line lies in the plane");
  return ProjPoint(x);
}

/// l v z = L* z.
inline ProjPlane join_line_point(const PluckerLine& l, const ProjPoint& z) {
  const Mat4 Ls = l.dual_matrix();
  const Vec4 w = Ls * z.coords();
  if (w.norm() <= tol::incidence * Ls.norm() * z.norm())
    throw Error(Errc::point_on_line, "point lies on the line");
  return ProjPlane(w);
}

inline ProjPlane plane_through(const ProjPoint& a, const ProjPoint& b, const ProjPoint& c) {
  const Vec4 w = cross4(a.coords(), b.coords(), c.coords());
  if (w.norm() <= tol::incidence * a.norm() * b.norm() * c.norm())
    throw Error(Errc::coincident_points, "points are collinear");
  return ProjPlane(w);
}

inline ProjPoint meet_planes(const ProjPlane& a, const ProjPlane& b, const ProjPlane& c) {
  const Vec4 x = cross4(a.coords(), b.coords(), c.coords());
  if (x.norm() <= tol::incidence * a.norm() * b.norm() * c.norm())
    throw Error(Errc::coincident_points, "planes share a line");
  return ProjPoint(x);
}

/// Two orthonormal points spanning l (left singular vectors of L).
inline std::pair<ProjPoint, ProjPoint> line_points(const PluckerLine& l) {
  Eigen::JacobiSVD<Mat4> svd(l.primal_matrix(), Eigen::ComputeFullU);
  return {ProjPoint(Vec4(svd.matrixU().col(0))), ProjPoint(Vec4(svd.matrixU().col(1)))};
}

/// Two orthonormal planes containing l.
inline std::pair<ProjPlane, ProjPlane> line_planes(const PluckerLine& l) {
  Eigen::JacobiSVD<Mat4> svd(l.dual_matrix(), Eigen::ComputeFullU);
  return {ProjPlane(Vec4(svd.matrixU().col(0))), ProjPlane(Vec4(svd.matrixU().col(1)))};
}

/// Image of l under the point transform x -> H x.
inline PluckerLine transform_line(const Mat4& H, const PluckerLine& l) {
  return PluckerLine::from_primal(H * l.primal_matrix() * H.transpose());
}

/// Projective coordinate frame on a retinal plane: the columns of Y are the
/// basis points y1, y2, y3 with their relative scales fixed.
class RetinalFrame {
 public:
  explicit RetinalFrame(const Mat43& Y) : Y_(Y), plane_(plane_of(Y)) {}

  static RetinalFrame from_points(const ProjPoint& y1, const ProjPoint& y2, const ProjPoint& y3) {
    Mat43 Y;
    Y << y1.coords(), y2.coords(), y3.coords();
    return RetinalFrame(Y);
  }

  const Mat43& Y() const noexcept { return Y_; }
  const ProjPlane& plane() const noexcept { return plane_; }
  ProjPoint basis(int i) const { return ProjPoint(Vec4(Y_.col(i))); }

  /// The point Y u of the retinal plane.
  ProjPoint point(const Vec3& u) const { return ProjPoint(Vec4(Y_ * u)); }

 private:
  static ProjPlane plane_of(const Mat43& Y) {
    if (!Y.allFinite())
      throw Error(Errc::rank_deficient_frame, "frame has non-finite entries");
    Eigen::JacobiSVD<Mat43> svd(Y);
    const auto s = svd.singularValues();
    if (!(s[2] > tol::degenerate * s[0]))
      throw Error(Errc::rank_deficient_frame, "frame basis points are not independent");
    return ProjPlane(cross4(Y.col(0), Y.col(1), Y.col(2)));
  }

  Mat43 Y_;
  ProjPlane plane_;
};

/// Linear map from Plücker coordinates of a line to the frame coordinates of
/// its intersection with the retinal plane.
struct LineToImageMap {
  Mat36 N;

  Vec3 operator()(const PluckerLine& l) const { return N * l.coords(); }
};

inline LineToImageMap build_line_to_image(const RetinalFrame& frame) {
  const Mat43& Y = frame.Y();
  LineToImageMap map;
  map.N.row(0) = detail::swap_halves(detail::exterior(Y.col(1), Y.col(2))).transpose();
  map.N.row(1) = detail::swap_halves(detail::exterior(Y.col(2), Y.col(0))).transpose();
  map.N.row(2) = detail::swap_halves(detail::exterior(Y.col(0), Y.col(1))).transpose();
  return map;
}

/// Coordinates u with Y u proportional to y, using the left inverse
/// (Y^T Y)^-1 Y^T. Only defined for points on the retinal plane.
inline Vec3 frame_coords(const RetinalFrame& frame, const ProjPoint& y) {
  if (!lies_on(y, frame.plane()))
    throw Error(Errc::off_plane_point, "point does not lie on the retinal plane");
  const Mat43& Y = frame.Y();
  return (Y.transpose() * Y).ldlt().solve(Y.transpose() * y.coords());
}

}  // namespace twoslit
