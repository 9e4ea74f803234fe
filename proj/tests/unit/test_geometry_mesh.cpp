#include "cablefsi/geometry/dual.hpp"
#include "cablefsi/geometry/locator.hpp"
#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/geometry/mesh_io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace cablefsi;
using namespace cablefsi::geometry;

namespace {

// Kuhn decomposition of the unit cube enumerated directly: one simplex per
// permutation of the axes, walking from (0,0,0) to (1,1,1).
double kuhn_unit_cube_volume() {
  std::array<int, 3> perm = {0, 1, 2};
  double total = 0.0;
  do {
    Vec3 p[4];
    p[0] = Vec3::Zero();
    for (int k = 0; k < 3; ++k) p[k + 1] = p[k] + Vec3::Unit(perm[k]);
    total += std::abs(signed_volume(p[0], p[1], p[2], p[3]));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

double surface_area_of_cell(const Mesh& mesh, const DualGeometry& dual, Index node) {
  double area = dual.boundary_closure[node].norm();
  for (Index e : mesh.node_edges(node)) area += dual.facet[e].norm();
  return area;
}

}  // namespace

TEST(BoxMesh, UnitCubeHasSixKuhnSimplices) {
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {1, 1, 1});
  EXPECT_EQ(m.num_nodes(), 8u);
  EXPECT_EQ(m.num_tets(), 6u);
  EXPECT_NEAR(m.total_volume(), kuhn_unit_cube_volume(), 1e-15);
  EXPECT_NEAR(m.total_volume(), 1.0, 1e-15);
  EXPECT_EQ(m.num_edges(), 19u);  // 12 cube edges + 6 face diagonals + 1 main diagonal
}

TEST(BoxMesh, TwoCellsGiveTwelveTets) {
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3(2, 1, 1)}, {2, 1, 1});
  EXPECT_EQ(m.num_tets(), 12u);
}

TEST(BoxMesh, VolumePartitionAndPositiveOrientation) {
  const Box box{Vec3(-1.0, 0.5, 2.0), Vec3(2.0, 1.7, 2.9)};
  const Mesh m = build_box_mesh(box, {5, 3, 4});
  const double expected = (box.hi - box.lo).prod();
  EXPECT_NEAR(m.total_volume(), expected, 1e-12 * expected);
  for (Index t = 0; t < static_cast<Index>(m.num_tets()); ++t) {
    const auto v = m.oriented(t);
    EXPECT_GT(signed_volume(m.nodes()[v[0]], m.nodes()[v[1]], m.nodes()[v[2]], m.nodes()[v[3]]), 0.0);
    EXPECT_EQ(m.tets()[t].tag, 3);
  }
}

TEST(BoxMesh, EdgesAreExactlyTheTetNodePairs) {
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {3, 2, 2});
  std::set<std::pair<Index, Index>> pairs;
  for (const Tet& t : m.tets())
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) pairs.insert({std::min(t.v[i], t.v[j]), std::max(t.v[i], t.v[j])});
  std::set<std::pair<Index, Index>> edges;
  for (const Edge& e : m.edges()) {
    EXPECT_LT(e.a, e.b);
    edges.insert({e.a, e.b});
  }
  EXPECT_EQ(edges.size(), m.num_edges());
  EXPECT_EQ(edges, pairs);
}

TEST(BoxMesh, BoundaryTagsFollowSides) {
  const BoxSideTags tags = {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Slip,
                            BoundaryTag::Slip,   BoundaryTag::Farfield, BoundaryTag::Farfield};
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3(2, 1, 1)}, {4, 2, 2}, tags);
  EXPECT_EQ(m.boundary_faces().size(), 2u * (2 * 4 * 2 + 2 * 4 * 2 + 2 * 2 * 2));
  for (const BoundaryFace& f : m.boundary_faces()) {
    const Vec3 c = (m.nodes()[f.v[0]] + m.nodes()[f.v[1]] + m.nodes()[f.v[2]]) / 3.0;
    const Vec3 n = (m.nodes()[f.v[1]] - m.nodes()[f.v[0]]).cross(m.nodes()[f.v[2]] - m.nodes()[f.v[0]]);
    if (c.x() < 1e-12) {
      EXPECT_EQ(f.tag, BoundaryTag::Inflow);
      EXPECT_LT(n.x(), 0.0);
    } else if (c.x() > 2.0 - 1e-12) {
      EXPECT_EQ(f.tag, BoundaryTag::Outflow);
      EXPECT_GT(n.x(), 0.0);
    } else if (c.y() < 1e-12 || c.y() > 1.0 - 1e-12) {
      EXPECT_EQ(f.tag, BoundaryTag::Slip);
    } else {
      EXPECT_EQ(f.tag, BoundaryTag::Farfield);
    }
  }
}

TEST(BoxMesh, InvalidDomainRaises) {
  EXPECT_THROW(build_box_mesh({Vec3::Zero(), Vec3(1, 0, 1)}, {1, 1, 1}), GeometryError);
  EXPECT_THROW(build_box_mesh({Vec3::Zero(), Vec3(1, 1, 1)}, {1, 0, 1}), GeometryError);
  EXPECT_THROW(build_box_mesh({Vec3::Ones(), Vec3::Zero()}, {1, 1, 1}), GeometryError);
}

TEST(Mesh, DegenerateTetIsNamed) {
  std::vector<Vec3> nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  try {
    Mesh m(nodes, {Tet{{0, 1, 2, 3}, 3}});
    FAIL() << "expected GeometryError";
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find('0'), std::string::npos);
  }
}

TEST(Dual, RegularTetSplitsVolumeEvenly) {
  const std::vector<Vec3> nodes = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const Mesh m(nodes, {Tet{{0, 1, 2, 3}, 3}});
  const DualGeometry d = compute_dual_geometry(m);
  const double total = m.total_volume();
  for (double v : d.volume) EXPECT_NEAR(v, total / 4.0, 1e-15);
}

TEST(Dual, InvariantsOnBoxMesh) {
  const Mesh m = build_box_mesh({Vec3(0.1, -0.3, 0.0), Vec3(1.3, 0.9, 0.7)}, {6, 5, 4});
  const DualGeometry d = compute_dual_geometry(m);
  const double vol = std::accumulate(d.volume.begin(), d.volume.end(), 0.0);
  EXPECT_NEAR(vol, m.total_volume(), 1e-12 * m.total_volume());
  for (Index i = 0; i < static_cast<Index>(m.num_nodes()); ++i) {
    Vec3 sum = d.boundary_closure[i];
    for (Index e : m.node_edges(i)) sum += d.facet_from(m, e, i);
    EXPECT_LE(sum.norm(), 1e-12 * surface_area_of_cell(m, d, i)) << "node " << i;
  }
  for (Index e = 0; e < static_cast<Index>(m.num_edges()); ++e) {
    const Edge& ed = m.edges()[e];
    EXPECT_EQ(d.facet_from(m, e, ed.b), Vec3(-d.facet_from(m, e, ed.a)));
  }
}

TEST(Dual, UnitCubeKuhnVolumesSumToOne) {
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {1, 1, 1});
  const DualGeometry d = compute_dual_geometry(m);
  EXPECT_NEAR(std::accumulate(d.volume.begin(), d.volume.end(), 0.0), 1.0, 1e-15);
}

TEST(MeshIo, RoundTripPreservesEverything) {
  const BoxSideTags tags = {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Slip,
                            BoundaryTag::Slip,   BoundaryTag::Farfield, BoundaryTag::Farfield};
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3(1.0 / 3.0, 1, 1)}, {2, 2, 1}, tags);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_nodes(), m.num_nodes());
  ASSERT_EQ(r.num_tets(), m.num_tets());
  for (std::size_t i = 0; i < m.num_nodes(); ++i) EXPECT_EQ(r.nodes()[i], m.nodes()[i]);
  for (std::size_t t = 0; t < m.num_tets(); ++t) {
    EXPECT_EQ(r.tets()[t].v, m.tets()[t].v);
    EXPECT_EQ(r.tets()[t].tag, m.tets()[t].tag);
  }
  ASSERT_EQ(r.boundary_faces().size(), m.boundary_faces().size());
  for (std::size_t f = 0; f < m.boundary_faces().size(); ++f) {
    EXPECT_EQ(r.boundary_faces()[f].v, m.boundary_faces()[f].v);
    EXPECT_EQ(r.boundary_faces()[f].tag, m.boundary_faces()[f].tag);
  }
}

TEST(MeshIo, FourColumnElementsUseLongestEdge) {
  std::stringstream ss(
      "# single element\n4\n0 0 0\n2 0 0\n0 1 0\n0 0 0.5\n1\n1 2 3 0\n");
  const Mesh m = read_mesh(ss);
  const Tet& t = m.tets()[0];
  const auto e = t.refinement_edge();
  EXPECT_EQ(std::set<Index>({e[0], e[1]}), std::set<Index>({1, 2}));  // length sqrt(5)
}

TEST(MeshIo, MalformedInputRaises) {
  std::stringstream missing("4\n0 0 0\n1 0 0\n");
  EXPECT_THROW(read_mesh(missing), GeometryError);
  std::stringstream badtag("4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1\n0 1 2 3\n1\n0 1 2 porous\n");
  EXPECT_THROW(read_mesh(badtag), Error);
}

TEST(Locator, FindsHostAndBarycentrics) {
  const Mesh m = build_box_mesh({Vec3::Zero(), Vec3(2, 1, 1)}, {6, 3, 3});
  const PointLocator loc(m);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Vec3 x(2 * u(rng), u(rng), u(rng));
    const auto t = loc.locate(x);
    ASSERT_TRUE(t.has_value());
    const auto b = loc.barycentric(*t, x);
    Vec3 back = Vec3::Zero();
    for (int k = 0; k < 4; ++k) {
      EXPECT_GE(b[k], -1e-10);
      back += b[k] * m.nodes()[m.tets()[*t].v[k]];
    }
    EXPECT_LE((back - x).norm(), 1e-12);
  }
  EXPECT_FALSE(loc.locate(Vec3(2.5, 0.5, 0.5)).has_value());
  EXPECT_FALSE(loc.locate(Vec3(-1e-3, 0.5, 0.5)).has_value());
}
