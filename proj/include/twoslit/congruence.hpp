#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "twoslit/projective.hpp"

namespace twoslit {

/// Homogeneous binary form sum_k c[k] x1^k x2^(n-k), n = c.size() - 1.
struct BinaryForm {
  std::vector<double> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }

  double operator()(double x1, double x2) const {
    if (c.empty()) return 0.0;
    double p = c.back();
    double pw = 1.0;
    for (int k = degree() - 1; k >= 0; --k) {
      pw *= x2;
      p = p * x1 + c[static_cast<std::size_t>(k)] * pw;
    }
    return p;
  }
};

/// Congruence of order one and class beta in normal form: the ray through x
/// joins x with (x1 f, x2 f, g, h).
class GeneralCongruence {
 public:
  GeneralCongruence(int beta, BinaryForm f, BinaryForm g, BinaryForm h)
      : beta_(beta), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)) {
    if (beta_ < 0) throw Error(Errc::invalid_argument, "class must be non-negative");
    const auto n = static_cast<std::size_t>(beta_);
    if (g_.c.size() != n + 1 || h_.c.size() != n + 1)
      throw Error(Errc::invalid_argument, "g and h must have degree beta");
    if (f_.c.size() != n)
      throw Error(Errc::invalid_argument, "f must have degree beta - 1 (absent for beta = 0)");
  }

  int beta() const noexcept { return beta_; }
  const BinaryForm& f() const noexcept { return f_; }
  const BinaryForm& g() const noexcept { return g_; }
  const BinaryForm& h() const noexcept { return h_; }

  /// The second point (x1 f, x2 f, g, h) defining the ray through x.
  Vec4 companion(const Vec4& x) const {
    const double fx = beta_ == 0 ? 0.0 : f_(x[0], x[1]);
    return {x[0] * fx, x[1] * fx, g_(x[0], x[1]), h_(x[0], x[1])};
  }

 private:
  int beta_;
  BinaryForm f_, g_, h_;
};

inline PluckerLine essential_map_general(const GeneralCongruence& c, const ProjPoint& x) {
  const Vec4 z = c.companion(x.coords());
  const Vec6 l = detail::exterior(x.coords(), z);
  if (l.norm() <= tol::incidence * x.norm() * z.norm())
    throw Error(Errc::base_point, "point lies in the focal locus");
  return PluckerLine(l);
}

/// Transversals to two skew lines.
class TwoSlitCongruence {
 public:
  TwoSlitCongruence(PluckerLine l1, PluckerLine l2) : l1_(std::move(l1)), l2_(std::move(l2)) {
    const auto [a, b] = line_points(l1_);
    const auto [c, d] = line_points(l2_);
    Mat4 m;
    m << a.coords(), b.coords(), c.coords(), d.coords();
    if (std::abs(m.determinant()) < tol::degenerate)
      throw Error(Errc::intersecting_slits, "slits must be skew lines");
  }

  const PluckerLine& l1() const noexcept { return l1_; }
  const PluckerLine& l2() const noexcept { return l2_; }
  Mat4 P1() const { return l1_.primal_matrix(); }
  Mat4 P2() const { return l2_.primal_matrix(); }
  Mat4 P1s() const { return l1_.dual_matrix(); }
  Mat4 P2s() const { return l2_.dual_matrix(); }

 private:
  PluckerLine l1_, l2_;
};

/// (x v l1) ^ (x v l2): the unique transversal through x.
inline PluckerLine two_slit_essential(const TwoSlitCongruence& c, const ProjPoint& x) {
  const Mat4 P1s = c.P1s();
  const Mat4 P2s = c.P2s();
  const Vec4 w1 = P1s * x.coords();
  const Vec4 w2 = P2s * x.coords();
  if (w1.norm() <= tol::incidence * P1s.norm() * x.norm() ||
      w2.norm() <= tol::incidence * P2s.norm() * x.norm())
    throw Error(Errc::point_on_slit, "point lies on a slit");
  return meet_planes(ProjPlane(w1), ProjPlane(w2));
}

/// Two-slit essential map composed with a retinal frame. Each image
/// coordinate is the quadratic form x^T P1* S_i P2* x.
class QuadraticCamera {
 public:
  QuadraticCamera(TwoSlitCongruence congruence, RetinalFrame frame)
      : congruence_(std::move(congruence)), frame_(std::move(frame)) {
    const Mat43& Y = frame_.Y();
    S_[0] = detail::plucker_layout(detail::exterior(Y.col(1), Y.col(2)));
    S_[1] = detail::plucker_layout(detail::exterior(Y.col(2), Y.col(0)));
    S_[2] = detail::plucker_layout(detail::exterior(Y.col(0), Y.col(1)));
    intrinsic_ = lies_on(frame_.basis(0), congruence_.l2()) &&
                 lies_on(frame_.basis(1), congruence_.l1());
  }

  const TwoSlitCongruence& congruence() const noexcept { return congruence_; }
  const RetinalFrame& frame() const noexcept { return frame_; }
  const Mat4& S(int i) const { return S_[static_cast<std::size_t>(i)]; }

  /// True when y1 lies on l2 and y2 on l1.
  bool intrinsic() const noexcept { return intrinsic_; }

 private:
  TwoSlitCongruence congruence_;
  RetinalFrame frame_;
  std::array<Mat4, 3> S_;
  bool intrinsic_ = false;
};

inline Vec3 quadratic_project(const QuadraticCamera& cam, const ProjPoint& x) {
  const Mat4 P1s = cam.congruence().P1s();
  const Mat4 P2s = cam.congruence().P2s();
  const Vec4 a = P1s.transpose() * x.coords();
  const Vec4 b = P2s * x.coords();
  Vec3 u;
  for (int i = 0; i < 3; ++i) u[i] = a.dot(cam.S(i) * b);
  const double scale = P1s.norm() * P2s.norm() * cam.S(0).norm() * x.coords().squaredNorm();
  if (u.norm() <= tol::incidence * scale)
    throw Error(Errc::undefined_projection, "projection is undefined at this point");
  return u;
}

/// Viewing ray of the image point u.
///
/// In an intrinsic frame the ray is the quadratic expansion
///   u1 u2 (p2^q2) - u1 u3 (p2^q1) - u2 u3 (p1^q2) + u3^2 (p1^q1)
/// with p1 = P1* y3, p2 = -P1* y1, q1 = P2* y3, q2 = -P2* y2. The basis
/// points y1 and y2 are images of whole slits; there the slit itself is
/// returned.
inline PluckerLine inverse_project(const QuadraticCamera& cam, const Vec3& u) {
  if (!u.allFinite() || u.norm() == 0.0)
    throw Error(Errc::zero_vector, "image point must be nonzero");
  const auto& cg = cam.congruence();
  if (cam.intrinsic()) {
    if (proportional(u, Vec3::UnitX())) return cg.l2();
    if (proportional(u, Vec3::UnitY())) return cg.l1();
    const Mat43& Y = cam.frame().Y();
    const Mat4 P1s = cg.P1s();
    const Mat4 P2s = cg.P2s();
    const Vec4 p1 = P1s * Y.col(2);
    const Vec4 p2 = -P1s * Y.col(0);
    const Vec4 q1 = P2s * Y.col(2);
    const Vec4 q2 = -P2s * Y.col(1);
    auto m = [](const Vec4& a, const Vec4& b) { return detail::swap_halves(detail::exterior(a, b)); };
    const Vec6 l = u[0] * u[1] * m(p2, q2) - u[0] * u[2] * m(p2, q1) -
                   u[1] * u[2] * m(p1, q2) + u[2] * u[2] * m(p1, q1);
    const double scale = u.squaredNorm() * P1s.norm() * P2s.norm() * Y.squaredNorm();
    if (!(l.norm() > tol::incidence * scale))
      throw Error(Errc::degenerate_frame, "inverse projection vanishes");
    return PluckerLine(l);
  }
  const ProjPoint y = cam.frame().point(u);
  if (lies_on(y, cg.l1())) return cg.l1();
  if (lies_on(y, cg.l2())) return cg.l2();
  return two_slit_essential(cg, y);
}

namespace detail {

inline bool in_pencil(const Vec4& a, const Vec4& b, const Vec4& w) {
  Eigen::Matrix<double, 4, 2> ab;
  ab << a, b;
  const Vec4 r = w - ab * ab.colPivHouseholderQr().solve(w);
  return r.norm() < tol::incidence * w.norm();
}

}  // namespace detail

/// Frame on pi in which the image of x is (p1.x q2.x, p2.x q1.x, p2.x q2.x)
/// exactly. Requires pi to contain the line p2 ^ q2.
inline RetinalFrame intrinsic_frame(const Vec4& p1, const Vec4& p2, const Vec4& q1, const Vec4& q2,
                                    const ProjPlane& pi) {
  const Vec4& w = pi.coords();
  if (!detail::in_pencil(p2, q2, w))
    throw Error(Errc::invalid_retinal_plane, "retinal plane must contain the base line");
  const Vec4 y3 = cross4(p1, q1, w);
  if (y3.norm() <= tol::incidence * p1.norm() * q1.norm() * w.norm())
    throw Error(Errc::degenerate_frame, "p1, q1 and the retinal plane share a line");
  const Mat4 L1 = detail::plucker_layout(detail::swap_halves(detail::exterior(p1, p2)));
  const Mat4 L2 = detail::plucker_layout(detail::swap_halves(detail::exterior(q1, q2)));
  Vec4 y1 = L2 * w;
  Vec4 y2 = L1 * w;
  const double s1 = p1.dot(y1);
  const double s2 = q1.dot(y2);
  if (std::abs(s1) <= tol::incidence * p1.norm() * y1.norm() ||
      std::abs(s2) <= tol::incidence * q1.norm() * y2.norm())
    throw Error(Errc::degenerate_frame, "slit meets the retinal plane on a principal plane");
  y1 *= p2.dot(y3) / s1;
  y2 *= q2.dot(y3) / s2;
  Mat43 Y;
  Y << y1, y2, y3;
  return RetinalFrame(Y);
}

struct TransversalHomography {
  Mat3 H;
  RetinalFrame target;
};

namespace detail {

// A plane through l, as far as possible from the plane w in the pencil.
inline Vec4 other_plane(const PluckerLine& l, const Vec4& w) {
  const auto [a, b] = line_planes(l);
  const Vec4 wn = w.normalized();
  const Vec4 pa = a.coords() - a.coords().dot(wn) * wn;
  const Vec4 pb = b.coords() - b.coords().dot(wn) * wn;
  return pa.norm() > pb.norm() ? pa : pb;
}

// The point of l farther from the line m.
inline ProjPoint point_off(const PluckerLine& l, const PluckerLine& m) {
  const auto [a, b] = line_points(l);
  return on_line_residual(a, m) > on_line_residual(b, m) ? a : b;
}

}  // namespace detail

/// Homography between retinal planes induced by the congruence: the point
/// y of frame.plane() maps to lambda(y) ^ target_plane. Returns the frame
/// on the target plane in which this map is the identity.
inline TransversalHomography transversal_homography(const TwoSlitCongruence& c,
                                                    const RetinalFrame& frame,
                                                    const ProjPlane& target_plane) {
  const ProjPlane& pi = frame.plane();
  if (same(pi, target_plane)) return {Mat3::Identity(), frame};
  const PluckerLine delta = meet_planes(pi, target_plane);
  if (!lines_meet(delta, c.l1()) || !lines_meet(delta, c.l2()))
    throw Error(Errc::non_transversal, "planes do not meet in a transversal to both slits");
  const Vec4 p2 = join_line_point(c.l1(), detail::point_off(delta, c.l1())).coords();
  const Vec4 q2 = join_line_point(c.l2(), detail::point_off(delta, c.l2())).coords();
  const Vec4 p1 = detail::other_plane(c.l1(), p2);
  const Vec4 q1 = detail::other_plane(c.l2(), q2);
  const RetinalFrame src = intrinsic_frame(p1, p2, q1, q2, pi);
  const RetinalFrame dst = intrinsic_frame(p1, p2, q1, q2, target_plane);
  const Mat43& Ys = src.Y();
  const Mat3 change = (Ys.transpose() * Ys).ldlt().solve(Ys.transpose() * frame.Y());
  return {Mat3::Identity(), RetinalFrame(Mat43(dst.Y() * change))};
}

/// Same map expressed in a caller-chosen frame on the target plane.
inline Mat3 transversal_homography(const TwoSlitCongruence& c, const RetinalFrame& frame,
                                   const RetinalFrame& target) {
  const TransversalHomography canonical = transversal_homography(c, frame, target.plane());
  const Mat43& Yt = target.Y();
  return (Yt.transpose() * Yt).ldlt().solve(Yt.transpose() * canonical.target.Y());
}

}  // namespace twoslit
