#pragma once

#include "cablefsi/geometry/mesh.hpp"

#include <vector>

namespace cablefsi::geometry {

/// Share of one boundary face owned by one of its nodes (one third of the
/// face's outward area vector for the median dual).
struct BoundaryFacet {
  Index node = 0;
  Vec3 area = Vec3::Zero();
  BoundaryTag tag = BoundaryTag::Farfield;
};

/// Median-dual control volumes of a vertex-centred finite volume scheme.
struct DualGeometry {
  std::vector<double> volume;           // per node
  std::vector<Vec3> facet;              // per edge, area vector oriented edge.a -> edge.b
  std::vector<Vec3> boundary_closure;   // per node, summed outward boundary area
  std::vector<BoundaryFacet> boundary;  // per (boundary face, node)

  /// Area vector of the facet between `from` and the other end of `edge`,
  /// oriented away from `from`.
  [[nodiscard]] Vec3 facet_from(const Mesh& mesh, Index edge, Index from) const {
    return mesh.edges()[edge].a == from ? facet[edge] : Vec3(-facet[edge]);
  }
};

DualGeometry compute_dual_geometry(const Mesh& mesh);

}  // namespace cablefsi::geometry
