#include "cablefsi/fluid/fluid.hpp"
#include "cablefsi/geometry/amr.hpp"
#include "cablefsi/geometry/refine.hpp"
#include "cablefsi/surface/intersect.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace cablefsi;
using geometry::AmrCriteria;
using geometry::Mesh;
using fluid::GasModel;
using fluid::PrimitiveState;

namespace {

surface::EmbeddedSurface cable(double diameter, double x0, double x1, const Vec3& offset) {
  std::vector<Vec3> c;
  for (int i = 0; i <= 20; ++i) c.push_back(Vec3(x0 + (x1 - x0) * i / 20.0, 0.0, 0.0) + offset);
  return surface::generate_cable_surface(c, 8, diameter, true);
}

// Independent recount by linear scan over all triangles.
std::vector<Index> bruteforce_doubly(const Mesh& m, const surface::EmbeddedSurface& s) {
  std::vector<Index> out;
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    if (surface::intersect_edge_bruteforce(s, m.nodes()[ed.a], m.nodes()[ed.b]).size() >= 2) {
      out.push_back(static_cast<Index>(e));
    }
  }
  return out;
}

}  // namespace

TEST(Amr, NoSurfaceMarksNothing) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {3, 3, 3});
  EXPECT_TRUE(geometry::mark_for_amr(m, nullptr, nullptr, {}, AmrCriteria{}).empty());
}

TEST(Amr, AllCriteriaDisabledMarksNothing) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {3, 3, 3});
  const auto s = cable(0.1, 0.05, 0.95, Vec3(0.0, 0.52, 0.47));
  const surface::SurfaceIndex index(s);
  const surface::EdgeIntersections hits(m, index);
  AmrCriteria c;
  c.doubly_intersected = false;
  EXPECT_TRUE(geometry::mark_for_amr(m, &hits, &index, {}, c).empty());
}

TEST(Amr, DoublyIntersectedMatchesBruteForce) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {4, 4, 4});
  const auto s = cable(0.1, 0.05, 0.95, Vec3(0.0, 0.52, 0.47));
  const surface::SurfaceIndex index(s);
  const surface::EdgeIntersections hits(m, index);
  const auto marked = geometry::mark_for_amr(m, &hits, &index, {}, AmrCriteria{});
  const auto expected = bruteforce_doubly(m, s);
  EXPECT_FALSE(expected.empty());
  EXPECT_EQ(marked, expected);
}

TEST(Amr, MinimumLengthExcludesShortEdges) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {4, 4, 4});
  const auto s = cable(0.1, 0.05, 0.95, Vec3(0.0, 0.52, 0.47));
  const surface::SurfaceIndex index(s);
  const surface::EdgeIntersections hits(m, index);
  AmrCriteria c;
  c.min_edge_length = 0.3;  // only the cube diagonals (0.433) and face diagonals (0.354) survive
  for (Index e : geometry::mark_for_amr(m, &hits, &index, {}, c)) EXPECT_GT(m.edge_length(e), 0.3);
}

TEST(Amr, DistanceCriterionStaysInBand) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const auto s = cable(0.1, 0.05, 0.95, Vec3(0.0, 0.52, 0.47));
  const surface::SurfaceIndex index(s);
  AmrCriteria c;
  c.doubly_intersected = false;
  c.distance = true;
  c.distance_band = 0.1;
  c.near_wall_size = 0.05;
  const auto marked = geometry::mark_for_amr(m, nullptr, &index, {}, c);
  ASSERT_FALSE(marked.empty());
  for (Index e : marked) {
    const auto& ed = m.edges()[e];
    const double d = std::min(index.closest_triangle(m.nodes()[ed.a]).first,
                              index.closest_triangle(m.nodes()[ed.b]).first);
    EXPECT_LE(d, 0.1 + m.edge_length(e));
  }
  // Far corner edges never qualify.
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto& ed = m.edges()[e];
    if (m.nodes()[ed.a].norm() < 0.2 && m.nodes()[ed.b].norm() < 0.2) {
      EXPECT_FALSE(std::binary_search(marked.begin(), marked.end(), static_cast<Index>(e)));
    }
  }
}

TEST(Amr, HessianIgnoresUniformAndLinearSpeed) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {4, 4, 4});
  AmrCriteria c;
  c.doubly_intersected = false;
  c.hessian = true;
  c.hessian_threshold = 1e-9;
  const std::vector<Vec3> uniform(m.num_nodes(), Vec3(3.0, -1.0, 2.0));
  EXPECT_TRUE(geometry::mark_for_amr(m, nullptr, nullptr, uniform, c).empty());

  // Speed gradients from the flow solver on a uniform stream are zero.
  const GasModel gas{};
  const PrimitiveState w{1.2, Vec3(100.0, 20.0, 0.0), 1.0e5};
  fluid::FluidContext ctx(m, gas, w);
  const auto s = fluid::uniform_state(m.num_nodes(), w, gas);
  const auto g = fluid::speed_gradients(ctx, s, fluid::compute_gradients(ctx, s));
  EXPECT_TRUE(geometry::mark_for_amr(m, nullptr, nullptr, g, c).empty());
}

TEST(Amr, HessianFindsCurvedSpeedProfile) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const GasModel gas{};
  fluid::FluidContext ctx(m, gas, {1.2, Vec3::Zero(), 1.0e5});
  fluid::FluidState s = fluid::uniform_state(m.num_nodes(), {1.2, Vec3::Zero(), 1.0e5}, gas);
  // Shear layer at y = 0.5: speed varies only with y.
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const double y = m.nodes()[i].y();
    s.W[i] = riemann::to_conservative({1.2, Vec3(50.0 + 40.0 * std::tanh(10.0 * (y - 0.5)), 0.0, 0.0), 1.0e5}, gas);
  }
  const auto g = fluid::speed_gradients(ctx, s, fluid::compute_gradients(ctx, s));
  AmrCriteria c;
  c.doubly_intersected = false;
  c.hessian = true;
  c.hessian_threshold = 10.0;
  const auto marked = geometry::mark_for_amr(m, nullptr, nullptr, g, c);
  ASSERT_FALSE(marked.empty());
  // Marks stay in the layer, where the curvature of the profile is.
  for (Index e : marked) {
    const auto& ed = m.edges()[e];
    EXPECT_LT(std::abs(0.5 * (m.nodes()[ed.a].y() + m.nodes()[ed.b].y()) - 0.5), 0.3) << "edge " << e;
  }
}

TEST(Amr, InvalidCriteriaAreRejected) {
  AmrCriteria c;
  c.hessian = true;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.distance = true;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.min_edge_length = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Amr, CyclesRemoveAllDoublyIntersectedEdges) {
  const double d = 0.1;
  Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Constant(1.2)}, {3, 3, 3});  // edge 4D
  const auto s = cable(d, 0.1, 1.1, Vec3(0.0, 0.61, 0.57));
  const surface::SurfaceIndex index(s);
  int cycles = 0;
  for (; cycles < 5; ++cycles) {
    const surface::EdgeIntersections hits(m, index);
    const auto marked = geometry::mark_for_amr(m, &hits, &index, {}, AmrCriteria{});
    if (marked.empty()) break;
    const double before = m.total_volume();
    m = geometry::refine_edges(m, marked).mesh;
    EXPECT_NEAR(m.total_volume(), before, 1e-12 * before);
  }
  EXPECT_TRUE(bruteforce_doubly(m, s).empty()) << "after " << cycles << " cycles";
}
