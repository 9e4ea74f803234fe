#include "cablefsi/geometry/dual.hpp"

#include <string>

namespace cablefsi::geometry {

namespace {

// For a positively oriented tet (p, q, r, s) the median-dual facet of edge
// p->q is the quadrilateral (m_pq, c_pqr, g, c_pqs); its area vector reduces to
// (r + s - p - q) x (s - r) / 24 and has positive projection on q - p.
// Each entry is an even permutation of (0, 1, 2, 3) so orientation is kept.
constexpr std::array<std::array<int, 4>, 6> kEdgePermutations = {
    {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 3, 0, 1}}};

}  // namespace

DualGeometry compute_dual_geometry(const Mesh& mesh) {
  DualGeometry dual;
  dual.volume.assign(mesh.num_nodes(), 0.0);
  dual.facet.assign(mesh.num_edges(), Vec3::Zero());
  dual.boundary_closure.assign(mesh.num_nodes(), Vec3::Zero());

  const auto& x = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto o = mesh.oriented(static_cast<Index>(t));
    const double vol = signed_volume(x[o[0]], x[o[1]], x[o[2]], x[o[3]]);
    if (!(vol > 0.0)) {
      throw GeometryError("zero-volume tetrahedron " + std::to_string(t) +
                          " in dual construction");
    }
    for (Index v : o) dual.volume[v] += 0.25 * vol;
    for (const auto& perm : kEdgePermutations) {
      const Index p = o[perm[0]], q = o[perm[1]], r = o[perm[2]], s = o[perm[3]];
      const Vec3 area = (x[r] + x[s] - x[p] - x[q]).cross(x[s] - x[r]) / 24.0;
      const Index e = *mesh.find_edge(p, q);
      if (mesh.edges()[e].a == p) {
        dual.facet[e] += area;
      } else {
        dual.facet[e] -= area;
      }
    }
  }

  dual.boundary.reserve(mesh.boundary_faces().size() * 3);
  for (const auto& f : mesh.boundary_faces()) {
    const Vec3 area = 0.5 * (x[f.v[1]] - x[f.v[0]]).cross(x[f.v[2]] - x[f.v[0]]);
    for (Index v : f.v) {
      dual.boundary.push_back({v, area / 3.0, f.tag});
      dual.boundary_closure[v] += area / 3.0;
    }
  }
  return dual;
}

}  // namespace cablefsi::geometry
