#include "support.hpp"

using namespace twoslit;
using twoslit::test::Gen;

namespace {

// Independent evaluation of x_i y_j - x_j y_i with 1-based indices.
double minor2(const Vec4& x, const Vec4& y, int i, int j) { return x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]; }

Vec6 plucker_by_hand(const Vec4& x, const Vec4& y) {
  Vec6 l;
  l << minor2(x, y, 4, 1), minor2(x, y, 4, 2), minor2(x, y, 4, 3), minor2(x, y, 2, 3), minor2(x, y, 3, 1),
      minor2(x, y, 1, 2);
  return l;
}

}  // namespace

TEST(JoinPoints, HandEvaluatedCoordinates) {
  const PluckerLine l = join_points(ProjPoint(1, 0, 0, 0), ProjPoint(0, 0, 1, 1));
  Vec6 expected;
  expected << -1, 0, 0, 0, -1, 0;
  EXPECT_EQ(l.coords(), expected);
}

TEST(JoinPoints, ProportionalPointsAreRejected) {
  try {
    join_points(ProjPoint(1, 0, 0, 0), ProjPoint(2, 0, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::coincident_points);
    EXPECT_EQ(e.category(), ErrorCategory::degeneracy);
  }
}

TEST(JoinPoints, RayThroughUnitPointMeetingBothSlits) {
  // (0,1,0,2) lies on {x1 = x3 = 0}; the line through it and (1,1,1,1) also
  // passes through (1,0,1,-1) on {x2 = x3 + x4 = 0}.
  const ProjPoint x(1, 1, 1, 1);
  const PluckerLine l = join_points(x, ProjPoint(0, 1, 0, 2));
  Vec6 expected;
  expected << 2, 1, 2, 1, 0, -1;
  EXPECT_LT(test::rel_up_to_scale(l.coords(), expected), 1e-15);
  EXPECT_DOUBLE_EQ(expected.dot(detail::swap_halves(expected)), 0.0);
  EXPECT_TRUE(lies_on(ProjPoint(1, 0, 1, -1), l));
}

TEST(JoinPoints, MatchesHandEvaluationOnRandomPoints) {
  Gen g(11);
  for (int t = 0; t < 100; ++t) {
    const Vec4 x = g.vec4(), y = g.vec4();
    EXPECT_LT(test::rel(join_points(ProjPoint(x), ProjPoint(y)).coords(), plucker_by_hand(x, y)), 1e-15);
  }
}

TEST(PluckerLine, RejectsZeroAndNonQuadricCoordinates) {
  EXPECT_THROW(PluckerLine(Vec6::Zero()), Error);
  Vec6 bad;
  bad << 1, 0, 0, 1, 0, 0;
  try {
    PluckerLine{bad};
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_line);
  }
}

TEST(PluckerLine, PrimalTimesDualVanishesForLines) {
  Gen g(12);
  for (int t = 0; t < 50; ++t) {
    const PluckerLine l = g.line();
    const Mat4 L = l.primal_matrix(), Ls = l.dual_matrix();
    EXPECT_LT((L + L.transpose()).norm(), 1e-15);
    EXPECT_LT((L * Ls).norm(), 1e-12 * L.norm() * Ls.norm());
    EXPECT_TRUE(same(PluckerLine::from_primal(L), l));
    EXPECT_TRUE(same(PluckerLine::from_dual(Ls), l));
  }
}

TEST(PluckerLine, PrimalTimesDualIsScalarForNonLines) {
  // Without the quadric constraint L L* is a multiple of the identity.
  Gen g(13);
  const Vec6 c(g.gauss(), g.gauss(), g.gauss(), g.gauss(), g.gauss(), g.gauss());
  const Mat4 P = detail::plucker_layout(c) * detail::plucker_layout(detail::swap_halves(c));
  EXPECT_LT((P - P(0, 0) * Mat4::Identity()).norm(), 1e-12 * P.norm());
  EXPECT_NEAR(std::abs(P(0, 0)), std::abs(c.dot(detail::swap_halves(c))) / 2.0, 1e-12);
}

TEST(MeetLinePlane, LineInsidePlaneIsRejected) {
  const PluckerLine l = join_points(ProjPoint(1, 0, 0, 0), ProjPoint(0, 1, 0, 0));
  try {
    meet_line_plane(l, ProjPlane(0, 0, 1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::line_in_plane);
  }
}

TEST(MeetLinePlane, IntersectionLiesOnLineAndPlane) {
  const PluckerLine l = join_points(ProjPoint(0, 0, 0, 1), ProjPoint(1, 0, 0, 1));
  const ProjPlane w(0, 0, 1, 1);
  const ProjPoint x = meet_line_plane(l, w);
  EXPECT_TRUE(lies_on(x, w));
  EXPECT_TRUE(lies_on(x, l));
}

TEST(MeetLinePlane, AxisMeetsPlane) {
  const PluckerLine axis = join_points(ProjPoint(0, 0, 0, 1), ProjPoint(0, 0, 1, 0));
  EXPECT_TRUE(same(meet_line_plane(axis, ProjPlane(0, 0, 1, -1)), ProjPoint(0, 0, 1, 1)));
}

TEST(JoinLinePoint, PointOnLineIsRejected) {
  const PluckerLine l = join_points(ProjPoint(0, 1, 0, 0), ProjPoint(0, 0, 0, 1));
  try {
    join_line_point(l, ProjPoint(0, 0, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::point_on_line);
  }
}

TEST(JoinLinePoint, PlaneThroughSlitAndE1) {
  const PluckerLine l = join_points(ProjPoint(0, 1, 0, 0), ProjPoint(0, 0, 0, 1));
  EXPECT_TRUE(same(join_line_point(l, ProjPoint(1, 0, 0, 0)), ProjPlane(0, 0, 1, 0)));
}

TEST(JoinLinePoint, RandomPlaneContainsLineAndPoint) {
  Gen g(14);
  for (int t = 0; t < 100; ++t) {
    const ProjPoint a = g.point(), b = g.point(), z = g.point();
    const PluckerLine l = join_points(a, b);
    const ProjPlane w = join_line_point(l, z);
    const auto [p, q] = line_points(l);
    for (const ProjPoint& x : {p, q, z, a, b}) EXPECT_LT(incidence_residual(w, x), 1e-12);
  }
}

TEST(MeetPlanes, AgreesWithJoinOfCommonPoints) {
  Gen g(15);
  for (int t = 0; t < 100; ++t) {
    const ProjPoint a = g.point(), b = g.point();
    const PluckerLine l = join_points(a, b);
    const ProjPlane u = join_line_point(l, g.point());
    const ProjPlane v = join_line_point(l, g.point());
    EXPECT_TRUE(same(meet_planes(u, v), l));
  }
}

TEST(Cross4, PlaneThroughThreePoints) {
  Gen g(16);
  const ProjPoint a = g.point(), b = g.point(), c = g.point();
  const ProjPlane w = plane_through(a, b, c);
  for (const ProjPoint& x : {a, b, c}) EXPECT_LT(incidence_residual(w, x), 1e-14);
}

TEST(LineToImage, PlaneX3EqualsX4) {
  const LineToImageMap N = build_line_to_image(worked::unit_square_frame());
  Mat36 expected;
  expected << 1, 0, 0, 0, -1, 0,
              0, 1, 0, 1, 0, 0,
              0, 0, 1, 0, 0, 0;
  EXPECT_EQ(N.N, expected);
}

TEST(LineToImage, NullSpaceOfUnitSquareMap) {
  const LineToImageMap N = build_line_to_image(worked::unit_square_frame());
  Gen g(17);
  for (int t = 0; t < 20; ++t) {
    const double a = g.gauss(), b = g.gauss(), c = g.gauss();
    Vec6 l;
    l << a, b, 0, -b, a, c;  // p41 = p31, p42 = -p23, p43 = 0
    EXPECT_EQ(N(PluckerLine(l)), Vec3::Zero());
  }
}

TEST(LineToImage, LinesThroughBasisPointsMapToBasisVectors) {
  Gen g(18);
  for (int t = 0; t < 10; ++t) {
    Mat43 Y;
    Y << g.vec4(), g.vec4(), g.vec4();
    const RetinalFrame frame(Y);
    const LineToImageMap N = build_line_to_image(frame);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 100; ++k) {
        const Vec3 u = N(join_points(frame.basis(i), g.point()));
        EXPECT_TRUE(proportional(u, Vec3(Vec3::Unit(i)), 1e-12));
      }
    }
  }
}

TEST(LineToImage, AgreesWithFrameCoordinatesOfTheIntersection) {
  Gen g(19);
  Mat43 Y;
  Y << g.vec4(), g.vec4(), g.vec4();
  const RetinalFrame frame(Y);
  const LineToImageMap N = build_line_to_image(frame);
  for (int t = 0; t < 100; ++t) {
    const PluckerLine l = g.line();
    const Vec3 u = frame_coords(frame, meet_line_plane(l, frame.plane()));
    EXPECT_TRUE(proportional(N(l), u, 1e-12));
  }
}

TEST(RetinalFrame, RankDeficientBasisIsRejected) {
  Mat43 Y;
  Y << 1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0;
  try {
    RetinalFrame{Y};
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::rank_deficient_frame);
  }
}

TEST(FrameCoords, BasisAndUnitPoints) {
  const RetinalFrame f = worked::unit_square_frame();
  EXPECT_TRUE(proportional(frame_coords(f, f.basis(0)), Vec3(1, 0, 0), 1e-15));
  EXPECT_TRUE(proportional(frame_coords(f, f.point(Vec3(1, 1, 1))), Vec3(1, 1, 1), 1e-15));
}

TEST(FrameCoords, OffPlanePointIsRejected) {
  try {
    frame_coords(worked::unit_square_frame(), ProjPoint(0, 0, 1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::off_plane_point);
  }
}

TEST(FrameCoords, RoundTripOnRandomFrames) {
  Gen g(20);
  for (int t = 0; t < 200; ++t) {
    Mat43 Y;
    Y << g.vec4(), g.vec4(), g.vec4();
    const RetinalFrame frame(Y);
    const Vec3 u = g.vec3();
    const Vec3 back = frame_coords(frame, frame.point(u));
    EXPECT_TRUE(proportional(back, u, 1e-12));
    EXPECT_TRUE(proportional(Vec4(Y * back), Vec4(Y * u), 1e-12));
  }
}

TEST(ProjectiveEquality, SignAndScaleAreIgnored) {
  EXPECT_TRUE(same(ProjPoint(1, 2, 3, 4), ProjPoint(-2, -4, -6, -8)));
  EXPECT_FALSE(same(ProjPoint(1, 2, 3, 4), ProjPoint(1, 2, 3, 4.001)));
  EXPECT_THROW(ProjPoint(0, 0, 0, 0), Error);
}

// ---- properties -------------------------------------------------------------

TEST(ProjectiveProperties, JoinSatisfiesQuadric) {
  Gen g(1001);
  for (int t = 0; t < 1000; ++t) {
    const ProjPoint x = g.point(), y = g.point();
    const Vec6 l = join_points(x, y).coords();
    EXPECT_LT(std::abs(l.dot(detail::swap_halves(l))) / l.squaredNorm(), 1e-12);
  }
}

TEST(ProjectiveProperties, MeetJoinDuality) {
  Gen g(1002);
  for (int t = 0; t < 1000; ++t) {
    const PluckerLine l = g.line();
    const ProjPlane u = join_line_point(l, g.point());
    const ProjPlane v = join_line_point(l, g.point());
    const PluckerLine back = meet_planes(u, v);
    ASSERT_TRUE(same(back, l, 1e-9));
    const ProjPlane w = g.plane();
    const ProjPoint x = meet_line_plane(back, w);
    ASSERT_LT(on_line_residual(x, l), 1e-9);
    ASSERT_LT(incidence_residual(w, x), 1e-9);
    ASSERT_LT(incidence_residual(u, x), 1e-9);
    ASSERT_LT(incidence_residual(v, x), 1e-9);
  }
}

TEST(ProjectiveProperties, TransformedLineJoinsTransformedPoints) {
  Gen g(1003);
  for (int t = 0; t < 1000; ++t) {
    const Mat4 H = g.matrix4();
    const ProjPoint a = g.point(), b = g.point();
    const PluckerLine l = join_points(a, b);
    const PluckerLine image = join_points(ProjPoint(Vec4(H * a.coords())), ProjPoint(Vec4(H * b.coords())));
    ASSERT_TRUE(same(transform_line(H, l), image, 1e-9));
  }
}
