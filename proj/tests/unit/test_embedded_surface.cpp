#include "cablefsi/surface/embedded_surface.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace cablefsi;
using namespace cablefsi::surface;

namespace {

std::vector<Vec3> straight(int nodes, double length) {
  std::vector<Vec3> c;
  for (int i = 0; i < nodes; ++i) c.emplace_back(length * i / (nodes - 1), 0.0, 0.0);
  return c;
}

std::vector<Vec3> helix(int nodes) {
  std::vector<Vec3> c;
  for (int i = 0; i < nodes; ++i) {
    const double t = 0.15 * i;
    c.emplace_back(std::cos(t), std::sin(t), 0.2 * t);
  }
  return c;
}

}  // namespace

TEST(CableSurface, TwoPointHexagonWithoutCaps) {
  const auto c = straight(2, 1.0);
  const EmbeddedSurface s = generate_cable_surface(c, 6, 0.1, false);
  EXPECT_EQ(s.num_nodes(), 12u);
  EXPECT_EQ(s.num_triangles(), 12u);
  EXPECT_FALSE(s.is_closed());
}

TEST(CableSurface, HundredElementHoseTriangleCount) {
  const auto c = straight(101, 1.0);
  const EmbeddedSurface s = generate_cable_surface(c, 6, 0.02, true);
  EXPECT_EQ(s.num_triangles(), 1212u);
  EXPECT_EQ(s.num_triangles() - 2 * 6, 1200u);  // lateral surface
  EXPECT_TRUE(s.is_closed());
  ASSERT_EQ(s.sections().size(), 101u);
  for (const auto& sec : s.sections()) EXPECT_GE(sec.size(), 6u);
}

TEST(CableSurface, SectionsAreCoplanarAndInscribed) {
  const auto c = helix(40);
  const double d = 0.05;
  const EmbeddedSurface s = generate_cable_surface(c, 7, d, true);
  EXPECT_LE(max_section_coplanarity_residual(s), 1e-10 * d);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (Index v : s.sections()[i]) {
      const double r = (s.reference()[v] - c[i]).norm();
      if (r > 0.0) EXPECT_NEAR(r, 0.5 * d, 1e-14);
    }
  }
}

TEST(CableSurface, NormalsPointAwayFromCenterline) {
  const auto c = helix(30);
  const EmbeddedSurface s = generate_cable_surface(c, 6, 0.05, false);
  for (std::size_t t = 0; t < s.num_triangles(); ++t) {
    const auto& tri = s.triangles()[t];
    const Vec3 centroid = (s.positions()[tri[0]] + s.positions()[tri[1]] + s.positions()[tri[2]]) / 3.0;
    // Closest centerline point among the two sections spanned by the triangle.
    const Index sec = std::min({s.section_of(tri[0]), s.section_of(tri[1]), s.section_of(tri[2])});
    const Vec3 axis_mid = 0.5 * (c[sec] + c[sec + 1]);
    EXPECT_GT(s.normals()[t].dot(centroid - axis_mid), 0.0) << "triangle " << t;
  }
}

TEST(CableSurface, CappedSurfaceIsWatertight) {
  const auto c = helix(25);
  const EmbeddedSurface s = generate_cable_surface(c, 5, 0.08, true);
  EXPECT_TRUE(s.is_closed());
  double area = 0.0;
  for (double a : s.areas()) area += a;
  EXPECT_LE(s.area_vector_sum().norm(), 1e-10 * area);
}

TEST(CableSurface, CapCentresJoinTerminalSections) {
  const auto c = straight(3, 1.0);
  const EmbeddedSurface s = generate_cable_surface(c, 6, 0.1, true);
  EXPECT_EQ(s.sections().front().size(), 7u);
  EXPECT_EQ(s.sections().back().size(), 7u);
  EXPECT_EQ(s.sections()[1].size(), 6u);
}

TEST(CableSurface, InvalidInputRaises) {
  const auto c = straight(3, 1.0);
  EXPECT_THROW(generate_cable_surface(c, 2, 0.1, true), GeometryError);
  EXPECT_THROW(generate_cable_surface(c, 6, 0.0, true), GeometryError);
  std::vector<Vec3> repeated = {{0, 0, 0}, {1, 0, 0}, {1, 0, 0}};
  try {
    generate_cable_surface(repeated, 6, 0.1, true);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate tangent"), std::string::npos);
  }
  std::vector<Vec3> single = {{0, 0, 0}};
  EXPECT_THROW(generate_cable_surface(single, 6, 0.1, true), GeometryError);
}

TEST(CableSurface, MotionUpdatesGeometry) {
  const auto c = straight(4, 1.0);
  EmbeddedSurface s = generate_cable_surface(c, 6, 0.1, true);
  std::vector<Vec3> disp(s.num_nodes(), Vec3(0.0, 0.2, 0.0));
  std::vector<Vec3> vel(s.num_nodes(), Vec3(1.0, 0.0, 0.0));
  const auto normals = s.normals();
  s.set_motion(disp, vel);
  for (std::size_t i = 0; i < s.num_nodes(); ++i) {
    EXPECT_EQ(s.positions()[i], s.reference()[i] + Vec3(0.0, 0.2, 0.0));
  }
  for (std::size_t t = 0; t < s.num_triangles(); ++t) EXPECT_LE((s.normals()[t] - normals[t]).norm(), 1e-14);
  EXPECT_THROW(s.set_motion(std::vector<Vec3>(3), vel), GeometryError);
}

TEST(CableSurface, RejectsInconsistentSections) {
  std::vector<Vec3> nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_THROW(EmbeddedSurface(nodes, {{0, 1, 2}}, {{0, 1}}), GeometryError);
  EXPECT_THROW(EmbeddedSurface(nodes, {{0, 1, 3}}, {{0, 1, 2}}), GeometryError);
}
