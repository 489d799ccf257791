#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "twoslit/camera.hpp"

namespace twoslit {

using Vec16 = Eigen::Matrix<double, 16, 1>;

/// 2x2x2x2 tensor, indices 1-based, stored with the last index fastest.
class EpipolarTensor {
 public:
  explicit EpipolarTensor(const Vec16& f) : f_(f) {
    if (!f_.allFinite() || f_.norm() == 0.0)
      throw Error(Errc::zero_vector, "epipolar tensor must be finite and nonzero");
  }

  static constexpr int index(int i, int j, int k, int l) {
    return (i - 1) * 8 + (j - 1) * 4 + (k - 1) * 2 + (l - 1);
  }

  double operator()(int i, int j, int k, int l) const { return f_[index(i, j, k, l)]; }
  const Vec16& data() const noexcept { return f_; }
  double norm() const { return f_.norm(); }

  EpipolarTensor unit() const { return EpipolarTensor(f_ / f_.norm()); }

 private:
  Vec16 f_;
};

inline double tensor_distance(const EpipolarTensor& a, const EpipolarTensor& b) {
  return projective_distance(a.data(), b.data());
}

inline bool same(const EpipolarTensor& a, const EpipolarTensor& b, double tolerance = 1e-9) {
  return tensor_distance(a, b) < tolerance;
}

struct Correspondence {
  Vec3 u;
  Vec3 v;
};

struct CameraPair {
  TwoSlitCamera a;
  TwoSlitCamera b;
};

/// Entry (i,j,k,l) is (-1)^(i+j+k+l) det of rows (A1)_{3-i}, (A2)_{3-j},
/// (B1)_{3-k}, (B2)_{3-l}.
inline EpipolarTensor tensor_from_cameras(const TwoSlitCamera& a, const TwoSlitCamera& b) {
  Vec16 f;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k)
        for (int l = 1; l <= 2; ++l) {
          Mat4 M;
          M.row(0) = a.A1().row(2 - i);
          M.row(1) = a.A2().row(2 - j);
          M.row(2) = b.A1().row(2 - k);
          M.row(3) = b.A2().row(2 - l);
          const double sign = ((i + j + k + l) % 2) ? -1.0 : 1.0;
          f[EpipolarTensor::index(i, j, k, l)] = sign * M.determinant();
        }
  return EpipolarTensor(f);
}

inline EpipolarTensor tensor_from_cameras(const CameraPair& pair) {
  return tensor_from_cameras(pair.a, pair.b);
}

namespace detail {

// The four 2-vectors (u1,u3), (u2,u3), (v1,v3), (v2,v3).
inline std::array<Vec2, 4> factors(const Correspondence& c) {
  return {Vec2(c.u[0], c.u[2]), Vec2(c.u[1], c.u[2]), Vec2(c.v[0], c.v[2]), Vec2(c.v[1], c.v[2])};
}

inline Vec16 outer4(const std::array<Vec2, 4>& x) {
  Vec16 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r[i * 8 + j * 4 + k * 2 + l] = x[0][i] * x[1][j] * x[2][k] * x[3][l];
  return r;
}

// g_{i'j'k'l'} = sum f_{ijkl} M0(i,i') M1(j,j') M2(k,k') M3(l,l').
inline Vec16 mode_multiply(const Vec16& f, const std::array<Mat2, 4>& M) {
  Vec16 g = Vec16::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double v = f[i * 8 + j * 4 + k * 2 + l];
          if (v == 0.0) continue;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  g[a * 8 + b * 4 + c * 2 + d] += v * M[0](i, a) * M[1](j, b) * M[2](k, c) * M[3](l, d);
        }
  return g;
}

}  // namespace detail

/// Quadrilinear form of the tensor on a correspondence, divided by the norms
/// of the four 2-vectors and of the tensor.
inline double epipolar_residual(const EpipolarTensor& F, const Correspondence& c) {
  const auto x = detail::factors(c);
  double scale = F.norm();
  for (const Vec2& v : x) scale *= v.norm();
  if (scale == 0.0) return 0.0;
  return F.data().dot(detail::outer4(x)) / scale;
}

inline constexpr std::size_t min_correspondences = 15;
inline constexpr double design_rank_tolerance = 1e-10;

/// Least-squares null vector of the design matrix. Each of the four
/// coordinate ratios is centred and scaled to unit spread first.
inline EpipolarTensor estimate_tensor_linear(std::span<const Correspondence> corrs) {
  const std::size_t n = corrs.size();
  if (n < min_correspondences)
    throw Error(Errc::insufficient_correspondences, "at least 15 correspondences are required");

  std::vector<std::array<Vec2, 4>> fac(n);
  for (std::size_t r = 0; r < n; ++r) fac[r] = detail::factors(corrs[r]);

  std::array<Mat2, 4> T;
  for (int m = 0; m < 4; ++m) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (const auto& x : fac) {
      if (std::abs(x[m][1]) <= tol::incidence * x[m].norm()) continue;
      const double s = x[m][0] / x[m][1];
      sum += s;
      sum2 += s * s;
      ++count;
    }
    T[m] = Mat2::Identity();
    if (count >= 2) {
      const double mu = sum / static_cast<double>(count);
      const double var = sum2 / static_cast<double>(count) - mu * mu;
      if (var > 0.0 && std::isfinite(var)) {
        const double sd = std::sqrt(var);
        T[m] << 1.0 / sd, -mu / sd, 0.0, 1.0;
      }
    }
  }

  Eigen::MatrixXd D(static_cast<Eigen::Index>(n), 16);
  for (std::size_t r = 0; r < n; ++r) {
    std::array<Vec2, 4> x = fac[r];
    for (int m = 0; m < 4; ++m) {
      x[m] = T[m] * x[m];
      const double nm = x[m].norm();
      if (nm > 0.0) x[m] /= nm;
    }
    D.row(static_cast<Eigen::Index>(r)) = detail::outer4(x).transpose();
  }
  if (!D.allFinite()) throw Error(Errc::invalid_argument, "correspondences must be finite");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  if (!(s[14] > design_rank_tolerance * s[0]))
    throw Error(Errc::rank_deficient_design, "design matrix has a null space of dimension > 1");
  const Vec16 fh = svd.matrixV().col(15);
  Vec16 f = detail::mode_multiply(fh, T);
  f /= f.norm();
  Eigen::Index imax = 0;
  f.cwiseAbs().maxCoeff(&imax);
  if (f[imax] < 0) f = -f;
  return EpipolarTensor(f);
}

/// Inverse of essential_decompose: F = E contracted with K^-1 on every mode.
inline EpipolarTensor apply_calibration(const EpipolarTensor& E, const Mat2& K1A, const Mat2& K2A,
                                        const Mat2& K1B, const Mat2& K2B) {
  std::array<Mat2, 4> M;
  const std::array<const Mat2*, 4> K{&K1A, &K2A, &K1B, &K2B};
  for (int m = 0; m < 4; ++m) {
    const Mat2& k = *K[static_cast<std::size_t>(m)];
    if (!(std::abs(k.determinant()) > tol::degenerate * k.squaredNorm()))
      throw Error(Errc::singular_calibration, "calibration matrix is singular");
    M[static_cast<std::size_t>(m)] = k.inverse();
  }
  return EpipolarTensor(detail::mode_multiply(E.data(), M));
}

/// Essential tensor E with E_{i'...} = sum_i F_{i...} (K1A)_{i i'} on each
/// mode, so that the tensor of the cameras K^-1 A equals E up to scale.
inline EpipolarTensor essential_decompose(const EpipolarTensor& F, const Mat2& K1A, const Mat2& K2A,
                                          const Mat2& K1B, const Mat2& K2B) {
  const std::array<Mat2, 4> M{K1A, K2A, K1B, K2B};
  for (const Mat2& k : M)
    if (!(std::abs(k.determinant()) > tol::degenerate * k.squaredNorm()))
      throw Error(Errc::singular_calibration, "calibration matrix is singular");
  return EpipolarTensor(detail::mode_multiply(F.data(), M));
}

// ---------------------------------------------------------------------------
// Principal minors

/// 4x4 matrix whose signed principal minors are the tensor entries, in the
/// gauge c12 = c13 = c14 = 1.
class MinorMatrix {
 public:
  explicit MinorMatrix(const Mat4& C) : C_(C) {
    if (!C_.allFinite()) throw Error(Errc::invalid_minor_matrix, "entries must be finite");
    for (int j = 1; j < 4; ++j)
      if (std::abs(C_(0, j) - 1.0) > 1e-12)
        throw Error(Errc::invalid_minor_matrix, "first row must be pinned to (c11, 1, 1, 1)");
  }

  const Mat4& C() const noexcept { return C_; }
  double operator()(int i, int j) const { return C_(i, j); }

 private:
  Mat4 C_;
};

/// Bit m of mask selects row/column m. The empty minor is 1.
inline double principal_minor(const Mat4& C, unsigned mask) {
  int idx[4];
  int n = 0;
  for (int m = 0; m < 4; ++m)
    if (mask & (1u << m)) idx[n++] = m;
  switch (n) {
    case 0: return 1.0;
    case 1: return C(idx[0], idx[0]);
    case 2: return C(idx[0], idx[0]) * C(idx[1], idx[1]) - C(idx[0], idx[1]) * C(idx[1], idx[0]);
    case 3: {
      Mat3 S;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) S(r, c) = C(idx[r], idx[c]);
      return S.determinant();
    }
    default: return C.determinant();
  }
}

namespace detail {

// Modes whose index equals 1 select the rows of C in the corresponding minor.
inline unsigned minor_mask(int i, int j, int k, int l) {
  return (i == 1 ? 1u : 0u) | (j == 1 ? 2u : 0u) | (k == 1 ? 4u : 0u) | (l == 1 ? 8u : 0u);
}

inline int popcount4(unsigned mask) {
  return static_cast<int>((mask & 1u) + ((mask >> 1) & 1u) + ((mask >> 2) & 1u) + ((mask >> 3) & 1u));
}

// Entry with index 1 exactly on the modes in mask.
inline double entry(const Vec16& f, unsigned mask) {
  auto ix = [&](int m) { return (mask & (1u << m)) ? 1 : 2; };
  return f[EpipolarTensor::index(ix(0), ix(1), ix(2), ix(3))];
}

}  // namespace detail

/// f_ijkl = (-1)^|S| det C_S with S the set of modes whose index is 1.
inline EpipolarTensor tensor_from_minors(const Mat4& C) {
  Vec16 f;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k)
        for (int l = 1; l <= 2; ++l) {
          const unsigned S = detail::minor_mask(i, j, k, l);
          const double sign = (detail::popcount4(S) % 2) ? -1.0 : 1.0;
          f[EpipolarTensor::index(i, j, k, l)] = sign * principal_minor(C, S);
        }
  return EpipolarTensor(f);
}

struct MinorCandidate {
  MinorMatrix C;
  double residual;
};

inline constexpr double leading_coefficient_tolerance = 1e-12;
inline constexpr double discriminant_tolerance = 1e-10;
inline constexpr double normalization_tolerance = 1e-12;

namespace detail {

// Real roots of a x^2 + b x + c = 0 with the pruning and clamping rules of
// the recovery.
inline std::vector<double> real_roots(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return {};
  if (std::abs(a) < leading_coefficient_tolerance * scale) {
    if (std::abs(b) < leading_coefficient_tolerance * scale) return {};
    return {-c / b};
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (disc < -discriminant_tolerance * (b * b + std::abs(4.0 * a * c))) return {};
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  if (q == 0.0) return {0.0, 0.0};
  return {q / a, c / q};
}

}  // namespace detail

/// Candidate minor matrices for the tensor, sorted by the squared deviation
/// of the two minors not used in the construction (det C and det C_234).
inline std::vector<MinorCandidate> recover_minor_matrices(const EpipolarTensor& F) {
  const double f2222 = F(2, 2, 2, 2);
  if (std::abs(f2222) < normalization_tolerance * F.norm())
    throw Error(Errc::normalization_failure, "f2222 vanishes; cannot normalize");
  const Vec16 f = F.data() / f2222;
  auto e = [&](unsigned mask) { return detail::entry(f, mask); };

  Mat4 c = Mat4::Zero();
  c(0, 1) = c(0, 2) = c(0, 3) = 1.0;
  for (int m = 0; m < 4; ++m) c(m, m) = -e(1u << m);
  for (int j = 1; j < 4; ++j) c(j, 0) = c(0, 0) * c(j, j) - e(1u | (1u << j));

  struct Branch {
    int p, q;
    std::vector<std::pair<double, double>> values;  // (c_pq, c_qp)
  };
  std::array<Branch, 3> branches{Branch{1, 2, {}}, Branch{1, 3, {}}, Branch{2, 3, {}}};
  for (Branch& br : branches) {
    const int p = br.p, q = br.q;
    const unsigned mp = 1u << p, mq = 1u << q;
    const double P = c(p, p) * c(q, q) - e(mp | mq);
    const double det1 = -e(1u | mp | mq);
    const double a = c(0, q) * c(p, 0);
    const double b = c(0, 0) * (c(p, p) * c(q, q) - P) - c(0, p) * c(p, 0) * c(q, q) -
                     c(0, q) * c(p, p) * c(q, 0) - det1;
    const double cc = c(0, p) * c(q, 0) * P;
    for (double x : detail::real_roots(a, b, cc)) {
      const double y = P / x;
      if (std::isfinite(x) && std::isfinite(y)) br.values.emplace_back(y, x);
    }
  }

  const double f1111 = e(15u);
  const double f2111 = e(14u);
  std::vector<MinorCandidate> out;
  for (const auto& v12 : branches[0].values)
    for (const auto& v13 : branches[1].values)
      for (const auto& v23 : branches[2].values) {
        Mat4 C = c;
        C(1, 2) = v12.first;
        C(2, 1) = v12.second;
        C(1, 3) = v13.first;
        C(3, 1) = v13.second;
        C(2, 3) = v23.first;
        C(3, 2) = v23.second;
        const double r1 = principal_minor(C, 15u) - f1111;
        const double r2 = -principal_minor(C, 14u) - f2111;
        out.push_back({MinorMatrix(C), r1 * r1 + r2 * r2});
      }
  if (out.empty()) throw Error(Errc::no_real_candidates, "no real solution on any branch");
  std::stable_sort(out.begin(), out.end(),
                   [](const MinorCandidate& x, const MinorCandidate& y) { return x.residual < y.residual; });
  return out;
}

/// A1 = (e1; c1), A2 = (e2; c2), B1 = (e3; c3), B2 = (e4; c4) with c_m the
/// rows of C.
inline CameraPair cameras_from_minor_matrix(const Mat4& C) {
  auto make = [&](int m) {
    Mat24 A;
    A.row(0) = Vec4::Unit(m).transpose();
    A.row(1) = C.row(m);
    return A;
  };
  return {TwoSlitCamera(make(0), make(1)), TwoSlitCamera(make(2), make(3))};
}

inline CameraPair cameras_from_minor_matrix(const MinorMatrix& C) {
  return cameras_from_minor_matrix(C.C());
}

/// D^-1 C^T D with D chosen to restore the unit first row.
inline MinorMatrix transpose_configuration(const MinorMatrix& M) {
  const Mat4& C = M.C();
  Vec4 d;
  d[0] = 1.0;
  for (int j = 1; j < 4; ++j) {
    if (std::abs(C(j, 0)) <= normalization_tolerance * C.norm())
      throw Error(Errc::transpose_renormalization, "first column of C has a zero entry");
    d[j] = 1.0 / C(j, 0);
  }
  Mat4 T;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) T(i, j) = C(j, i) * d[j] / d[i];
  for (int j = 1; j < 4; ++j) T(0, j) = 1.0;  // exact after rounding
  return MinorMatrix(T);
}

struct Configurations {
  CameraPair first;
  CameraPair second;
};

inline Configurations two_configurations(const MinorMatrix& C) {
  return {cameras_from_minor_matrix(C), cameras_from_minor_matrix(transpose_configuration(C))};
}

// ---------------------------------------------------------------------------
// Comparing reconstructions

struct Equivalence {
  /// Space transform with A'_m G proportional to A_m for all four matrices.
  Mat4 G;
  /// Smallest singular value of the normalized linear system.
  double residual;
};

/// Finds G and scales s_m minimizing sum |A'_m G - s_m A_m|^2 over unit
/// vectors (G, s). A residual near zero means the pairs are projectively
/// equivalent: original sees x where `other` sees G^-1 x.
inline Equivalence projective_equivalence(const CameraPair& original, const CameraPair& other) {
  const std::array<Mat24, 4> A{original.a.normalized().A1(), original.a.normalized().A2(),
                               original.b.normalized().A1(), original.b.normalized().A2()};
  const std::array<Mat24, 4> B{other.a.normalized().A1(), other.a.normalized().A2(),
                               other.b.normalized().A1(), other.b.normalized().A2()};
  Eigen::Matrix<double, 32, 20> S = Eigen::Matrix<double, 32, 20>::Zero();
  for (int m = 0; m < 4; ++m)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 4; ++c) {
        const int row = m * 8 + r * 4 + c;
        for (int k = 0; k < 4; ++k) S(row, k * 4 + c) = B[static_cast<std::size_t>(m)](r, k);
        S(row, 16 + m) = -A[static_cast<std::size_t>(m)](r, c);
      }
  Eigen::JacobiSVD<Eigen::Matrix<double, 32, 20>> svd(S, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 20, 1> x = svd.matrixV().col(19);
  Mat4 G;
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 4; ++c) G(k, c) = x[k * 4 + c];
  return {G, svd.singularValues()[19]};
}

namespace detail {

// The four planes of the inverse rays, scaled to unit norm.
inline Mat4 ray_planes(const CameraPair& pair, const Correspondence& c) {
  Mat4 W;
  W.row(0) = c.u[2] * pair.a.A1().row(0) - c.u[0] * pair.a.A1().row(1);
  W.row(1) = c.u[2] * pair.a.A2().row(0) - c.u[1] * pair.a.A2().row(1);
  W.row(2) = c.v[2] * pair.b.A1().row(0) - c.v[0] * pair.b.A1().row(1);
  W.row(3) = c.v[2] * pair.b.A2().row(0) - c.v[1] * pair.b.A2().row(1);
  for (int r = 0; r < 4; ++r) {
    const double n = W.row(r).norm();
    if (n == 0.0) throw Error(Errc::degenerate_frame, "image point gives no constraint");
    W.row(r) /= n;
  }
  return W;
}

// Image coordinates are ratios of linear forms: u1/u3 = p1.x / p2.x and
// u2/u3 = q1.x / q2.x. Residuals and their gradients in x.
struct RatioResidual {
  Vec4 r;
  Eigen::Matrix<double, 4, 4> J;
  bool finite = true;
};

inline RatioResidual ratio_residual(const CameraPair& pair, const Correspondence& c, const Vec4& x) {
  const std::array<const Mat24*, 4> A{&pair.a.A1(), &pair.a.A2(), &pair.b.A1(), &pair.b.A2()};
  const std::array<double, 4> target{c.u[0] / c.u[2], c.u[1] / c.u[2], c.v[0] / c.v[2], c.v[1] / c.v[2]};
  RatioResidual out;
  for (int m = 0; m < 4; ++m) {
    const Vec4 top = A[static_cast<std::size_t>(m)]->row(0).transpose();
    const Vec4 bottom = A[static_cast<std::size_t>(m)]->row(1).transpose();
    const double n = top.dot(x), d = bottom.dot(x);
    if (d == 0.0) {
      out.finite = false;
      return out;
    }
    out.r[m] = n / d - target[static_cast<std::size_t>(m)];
    out.J.row(m) = ((top * d - bottom * n) / (d * d)).transpose();
  }
  out.finite = out.r.allFinite();
  return out;
}

}  // namespace detail

inline constexpr int triangulation_iterations = 20;

/// Scene point seen at u by pair.a and at v by pair.b. Starts from the
/// least-squares common point of the four ray planes u3 p1 - u1 p2,
/// u3 q1 - u2 q2, ... and then minimizes the squared image distances by
/// Gauss-Newton on the unit sphere.
inline ProjPoint triangulate(const CameraPair& pair, const Correspondence& c) {
  Eigen::JacobiSVD<Mat4> svd(detail::ray_planes(pair, c), Eigen::ComputeFullV);
  Vec4 x = svd.matrixV().col(3);
  detail::RatioResidual cur = detail::ratio_residual(pair, c, x);
  if (!cur.finite) return ProjPoint(x);
  for (int it = 0; it < triangulation_iterations; ++it) {
    // Tangent basis at x.
    Eigen::JacobiSVD<Eigen::Matrix<double, 1, 4>> tangent(x.transpose(), Eigen::ComputeFullV);
    const Eigen::Matrix<double, 4, 3> B = tangent.matrixV().rightCols<3>();
    const Eigen::Matrix<double, 4, 3> JB = cur.J * B;
    const Vec3 step = JB.colPivHouseholderQr().solve(-cur.r);
    bool improved = false;
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      const Vec4 y = (x + t * B * step).normalized();
      const detail::RatioResidual next = detail::ratio_residual(pair, c, y);
      if (next.finite && next.r.squaredNorm() < cur.r.squaredNorm()) {
        x = y;
        cur = next;
        improved = true;
        break;
      }
    }
    if (!improved || step.norm() < 1e-14) break;
  }
  return ProjPoint(x);
}

/// Euclidean distance between the inhomogeneous image points.
inline double image_distance(const Vec3& a, const Vec3& b) {
  return (a.head<2>() / a[2] - b.head<2>() / b[2]).norm();
}

}  // namespace twoslit
