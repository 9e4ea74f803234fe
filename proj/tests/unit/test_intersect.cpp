#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/surface/intersect.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace cablefsi;
using namespace cablefsi::surface;

namespace {

EmbeddedSurface single_triangle() {
  return EmbeddedSurface({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}, {{0, 1, 2}});
}

EmbeddedSurface straight_cable(const Vec3& a, const Vec3& b, int nodes, int sides, double d) {
  std::vector<Vec3> c;
  for (int i = 0; i < nodes; ++i) c.push_back(a + (b - a) * (static_cast<double>(i) / (nodes - 1)));
  return generate_cable_surface(c, sides, d, true);
}

std::vector<std::array<Vec3, 3>> soup(const EmbeddedSurface& s) {
  std::vector<std::array<Vec3, 3>> out;
  for (const auto& t : s.triangles()) out.push_back({s.positions()[t[0]], s.positions()[t[1]], s.positions()[t[2]]});
  return out;
}

}  // namespace

TEST(SegmentTriangle, OrthogonalPierceAtCentroid) {
  const EmbeddedSurface s = single_triangle();
  const Vec3 c(1.0 / 3.0, 1.0 / 3.0, 0.0);
  const Vec3 p0 = c + Vec3(0, 0, -0.3), p1 = c + Vec3(0, 0, 0.9);
  const auto hits = intersect_edge_bruteforce(s, p0, p1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_NEAR(hits[0].t, 0.3 / 1.2, 1e-15);
  EXPECT_LE((hits[0].point - c).norm(), 1e-15);
  EXPECT_EQ(hits[0].normal, Vec3(0, 0, 1));
}

TEST(SegmentTriangle, MissesAndTouches) {
  const EmbeddedSurface s = single_triangle();
  EXPECT_TRUE(intersect_edge_bruteforce(s, {2, 2, -1}, {2, 2, 1}).empty());
  EXPECT_TRUE(intersect_edge_bruteforce(s, {0.2, 0.2, 0.1}, {0.2, 0.2, 1.0}).empty());
  // Endpoint on the plane counts as behind it, from either direction.
  const auto a = intersect_edge_bruteforce(s, {0.2, 0.2, 0.0}, {0.2, 0.2, 1.0});
  const auto b = intersect_edge_bruteforce(s, {0.2, 0.2, 1.0}, {0.2, 0.2, 0.0});
  EXPECT_EQ(a.size(), b.size());
}

TEST(SegmentTriangle, SharedEdgeCountedOnce) {
  // Two triangles sharing the diagonal of the unit square.
  const EmbeddedSurface s({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}},
                          {{0, 1, 2, 3}});
  for (double x : {0.1, 0.5, 0.77}) {
    const auto hits = intersect_edge_bruteforce(s, {x, x, -1}, {x, x, 1});
    EXPECT_EQ(hits.size(), 1u) << x;
    const auto back = intersect_edge_bruteforce(s, {x, x, 1}, {x, x, -1});
    EXPECT_EQ(back.size(), 1u) << x;
  }
  // Shared vertex at the origin: exactly one of the two triangles owns it.
  EXPECT_LE(intersect_edge_bruteforce(s, {0, 0, -1}, {0, 0, 1}).size(), 1u);
}

TEST(SurfaceIndexTest, LongSegmentThroughClosedCylinderHitsTwice) {
  const EmbeddedSurface s = straight_cable({0, 0, 0}, {1, 0, 0}, 11, 6, 0.1);
  const SurfaceIndex idx(s);
  const Vec3 p0(0.43, -1.0, 0.013), p1(0.43, 1.0, -0.011);
  const auto hits = idx.intersect(p0, p1);
  EXPECT_EQ(hits.size(), 2u);
  EXPECT_EQ(oracle::count_crossings_naive(p0, p1, soup(s)), 2);
  EXPECT_TRUE(idx.intersect({3, 3, 3}, {4, 4, 4}).empty());
}

TEST(SurfaceIndexTest, MatchesBruteForceOnRandomSegments) {
  std::vector<Vec3> c;
  for (int i = 0; i < 30; ++i) c.emplace_back(0.05 * i, 0.1 * std::sin(0.3 * i), 0.05 * std::cos(0.2 * i));
  const EmbeddedSurface s = generate_cable_surface(c, 6, 0.08, true);
  const SurfaceIndex idx(s);
  const auto tris = soup(s);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.3, 1.8);
  std::uniform_real_distribution<double> w(-0.3, 0.3);
  int total = 0;
  for (int k = 0; k < 2000; ++k) {
    const Vec3 p0(u(rng), w(rng), w(rng)), p1(u(rng), w(rng), w(rng));
    const auto fast = idx.intersect(p0, p1);
    const auto slow = intersect_edge_bruteforce(s, p0, p1);
    ASSERT_EQ(fast.size(), slow.size()) << "segment " << k;
    for (std::size_t h = 0; h < fast.size(); ++h) {
      EXPECT_EQ(fast[h].triangle, slow[h].triangle);
      EXPECT_EQ(fast[h].t, slow[h].t);
      // On the segment and on the triangle plane.
      const Vec3 on_seg = p0 + fast[h].t * (p1 - p0);
      EXPECT_LE((on_seg - fast[h].point).norm(), 1e-10 * (p1 - p0).norm());
      const auto& tri = s.triangles()[fast[h].triangle];
      EXPECT_LE(std::abs((fast[h].point - s.positions()[tri[0]]).dot(fast[h].normal)), 1e-10 * (p1 - p0).norm());
    }
    ASSERT_TRUE(std::is_sorted(fast.begin(), fast.end(), [](const auto& a, const auto& b) { return a.t < b.t; }));
    // Generic random segments never graze, so a naive count agrees.
    EXPECT_EQ(static_cast<int>(slow.size()), oracle::count_crossings_naive(p0, p1, tris));
    total += static_cast<int>(fast.size());
  }
  EXPECT_GT(total, 100);
}

TEST(SurfaceIndexTest, ReversedSegmentMirrorsParameters) {
  const EmbeddedSurface s = straight_cable({0, 0, 0}, {1, 0, 0}, 6, 6, 0.2);
  const SurfaceIndex idx(s);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int k = 0; k < 500; ++k) {
    const Vec3 p0(u(rng), u(rng) - 0.5, u(rng) - 0.5), p1(u(rng), u(rng) - 0.5, u(rng) - 0.5);
    const auto fwd = idx.intersect(p0, p1);
    const auto bwd = idx.intersect(p1, p0);
    ASSERT_EQ(fwd.size(), bwd.size());
    for (std::size_t h = 0; h < fwd.size(); ++h) {
      const auto& r = bwd[fwd.size() - 1 - h];
      EXPECT_EQ(fwd[h].triangle, r.triangle);
      EXPECT_NEAR(fwd[h].t, 1.0 - r.t, 1e-15);
    }
  }
}

TEST(SurfaceIndexTest, EdgeThroughSharedSurfaceVertexIsDeduplicated) {
  const EmbeddedSurface s = straight_cable({0, 0, 0}, {1, 0, 0}, 3, 6, 0.2);
  const SurfaceIndex idx(s);
  // Segment passing exactly through a lateral surface node, normal to the axis.
  const Vec3 node = s.positions()[s.sections()[1][0]];
  const Vec3 dir = (node - Vec3(0.5, 0, 0)).normalized();
  const auto hits = idx.intersect(Vec3(0.5, 0, 0) - 0.01 * dir, node + 0.5 * dir);
  EXPECT_EQ(hits.size(), 1u);
}

TEST(EdgeIntersectionsTest, StoresHitsPerMeshEdge) {
  const geometry::Mesh m = geometry::build_box_mesh({Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 0.5, 0.5)}, {4, 2, 2});
  const EmbeddedSurface s = straight_cable({0.1, 0.01, 0.02}, {0.9, 0.01, 0.02}, 9, 6, 0.3);
  const SurfaceIndex idx(s);
  const EdgeIntersections ei(m, idx);
  std::size_t total = 0;
  for (Index e = 0; e < static_cast<Index>(m.num_edges()); ++e) {
    const auto& ed = m.edges()[e];
    const auto expect = intersect_edge_bruteforce(s, m.nodes()[ed.a], m.nodes()[ed.b]);
    ASSERT_EQ(ei.hits(e).size(), expect.size());
    for (const auto& h : ei.hits(e)) EXPECT_EQ(h.edge, e);
    total += expect.size();
  }
  EXPECT_EQ(ei.total_hits(), total);
  EXPECT_GT(total, 0u);
}

TEST(Occlusion, InsideNodesAreGhostsOutsideReal) {
  const geometry::Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {8, 8, 8});
  const EmbeddedSurface s = straight_cable({0.1, 0.5, 0.5}, {0.9, 0.5, 0.5}, 9, 6, 0.12);
  const SurfaceIndex idx(s);
  OcclusionOptions opts;
  opts.cross_check = true;
  const auto status = classify_occlusion(m, &idx, opts);
  const auto tris = soup(s);
  int ghosts = 0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const Vec3 x = m.nodes()[i];
    const int parity = oracle::count_crossings_naive(x, x + Vec3(0.31, 7.7, 3.9), tris) % 2;
    EXPECT_EQ(status[i] == NodeStatus::Ghost, parity == 1) << "node " << i;
    ghosts += status[i] == NodeStatus::Ghost;
  }
  EXPECT_EQ(ghosts, 7);  // x = 0.25 .. 0.875 on the axis
}

TEST(Occlusion, NoSurfaceMeansAllReal) {
  const geometry::Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {2, 2, 2});
  const auto status = classify_occlusion(m, nullptr);
  EXPECT_TRUE(std::all_of(status.begin(), status.end(), [](NodeStatus s) { return s == NodeStatus::Real; }));
}

TEST(Occlusion, InvariantUnderRigidTranslation) {
  const Vec3 shift(0.37, -1.21, 2.05);
  const geometry::Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const geometry::Mesh ms = geometry::build_box_mesh({shift, Vec3::Ones() + shift}, {6, 6, 6});
  const EmbeddedSurface s = straight_cable({0.05, 0.45, 0.52}, {0.95, 0.55, 0.48}, 8, 6, 0.25);
  const EmbeddedSurface ss = straight_cable(Vec3(0.05, 0.45, 0.52) + shift, Vec3(0.95, 0.55, 0.48) + shift, 8, 6, 0.25);
  const SurfaceIndex a(s), b(ss);
  EXPECT_EQ(classify_occlusion(m, &a), classify_occlusion(ms, &b));
}

TEST(PointTriangleDistance, RegionsOfTheTriangle) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  EXPECT_NEAR(point_triangle_distance({0.2, 0.2, 0.5}, a, b, c).first, 0.5, 1e-15);
  EXPECT_NEAR(point_triangle_distance({-1, -1, 0}, a, b, c).first, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(point_triangle_distance({0.5, -2, 0}, a, b, c).first, 2.0, 1e-15);
  const auto [d, p] = point_triangle_distance({1, 1, 0}, a, b, c);
  EXPECT_NEAR(d, std::sqrt(0.5), 1e-15);
  EXPECT_LE((p - Vec3(0.5, 0.5, 0)).norm(), 1e-15);
}
