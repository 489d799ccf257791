#pragma once

// Fixed reference configurations used by the golden checks.

#include "twoslit/epipolar.hpp"

namespace twoslit::worked {

/// Parallel two-slit camera (A1, A2) and pushbroom camera (B1, B2) with
/// integer entries.
inline CameraPair integer_pair() {
  Mat24 A1, A2, B1, B2;
  A1 << -1, 7, 4, 0, 8, -1, 13, 4;
  A2 << 11, 6, -2, 4, 8, -1, 13, -5;
  B1 << 14, 9, -3, 8, 0, 0, 0, 1;
  B2 << -3, 8, 10, 3, 6, 13, 5, 13;
  return {TwoSlitCamera(A1, A2), TwoSlitCamera(B1, B2)};
}

/// Tensor of integer_pair(), in EpipolarTensor storage order.
inline Vec16 integer_pair_tensor() {
  Vec16 f;
  f << 0, 0, 21816, -25650, 1906, -2090, -3642, 5510, 880, 475, 18600, -11875, 97, -380, -1259, 1425;
  return f;
}

/// Second rows of the four matrices of the two configurations recovered
/// from integer_pair_tensor(), to two decimals. The first rows are e1..e4.
inline Mat4 recovered_rows_first() {
  Mat4 C;
  C << -3.87, 1, 1, 1,
       -14.22, 8.33, -6.67, -22.17,
       0.44, -0.28, 0.27, 1.14,
       -0.86, 0.26, 0.15, 0.88;
  return C;
}

inline Mat4 recovered_rows_second() {
  Mat4 C;
  C << -3.87, 1, 1, 1,
       -14.22, 8.33, 9.25, 4.24,
       0.44, 0.20, 0.27, -0.07,
       -0.86, -1.34, -2.26, 0.88;
  return C;
}

/// Projective change of coordinates used in the self-calibration run.
inline Mat4 upgrade_Q() {
  Mat4 Q;
  Q << 1.49, 0.60, -0.11, -1.15,
       -1.43, 0.88, -0.93, 1.52,
       -0.38, -0.21, 1.83, -0.55,
       0.83, -0.95, -0.63, 0.93;
  return Q;
}

/// Q diag(1,1,1,0) Q^T scaled to a unit top-left entry, to two decimals.
inline Mat4 upgrade_daq_display() {
  Mat4 M;
  M << 1.00, -0.58, -0.34, 0.28,
       -0.58, 1.42, -0.52, -0.55,
       -0.34, -0.52, 1.36, -0.49,
       0.28, -0.55, -0.49, 0.77;
  return M;
}

inline constexpr double first_camera_fu = 4.04;
inline constexpr double first_camera_fv = 1.37;
inline constexpr double reported_magnification1 = 4.05;
inline constexpr double reported_magnification2 = 1.38;

/// Camera with slits {x1 = x3 = 0} and {x2 = x3 + x4 = 0}.
inline TwoSlitCamera unit_square_camera() {
  Mat24 A1, A2;
  A1 << 1, 0, 0, 0, 0, 0, 1, 0;
  A2 << 0, 2, 0, 0, 0, 0, 1, 1;
  return {A1, A2};
}

/// Frame y1 = e1, y2 = e2, y3 = (0, 0, 1, 1) on the plane x3 = x4.
inline RetinalFrame unit_square_frame() {
  Mat43 Y;
  Y << 1, 0, 0,
       0, 1, 0,
       0, 0, 1,
       0, 0, 1;
  return RetinalFrame(Y);
}

}  // namespace twoslit::worked
