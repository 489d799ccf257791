// Builds a parallel two-slit camera from intrinsics and a pose, projects a
// point and reads the parameters back.

#include <cstdio>
#include <numbers>

#include "twoslit/twoslit.hpp"

using namespace twoslit;

int main() {
  const double theta = std::numbers::pi / 3, d = 2.0;
  Mat2 K1, K2;
  K1 << 3, 0.5, 0, 1;
  K2 << 1.5, -0.2, 0, 1;
  Mat4 pose = Mat4::Identity();
  pose.topLeftCorner<3, 3>() = Eigen::AngleAxisd(0.4, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  pose.topRightCorner<3, 1>() = Vec3(0.1, -0.3, 0.7);

  const TwoSlitCamera canon = canonical_parallel(theta, d);
  const TwoSlitCamera cam =
      apply_space_transform(TwoSlitCamera(Mat24(K1 * canon.A1()), Mat24(K2 * canon.A2())), pose);

  const Vec3 u = project(cam, ProjPoint(0.2, -0.1, 1.5, 1.0));
  std::printf("image of (0.2, -0.1, 1.5): (%.6f, %.6f)\n", u[0] / u[2], u[1] / u[2]);

  const ParallelDecomposition p = decompose_parallel(cam);
  std::printf("theta %.6f (built %.6f), d %.6f (built %.6f)\n", p.theta, theta, p.d, d);
  std::printf("fu %.4f, u0 %.4f, fv %.4f\n", p.fu(), p.u0(), p.fv());
}
