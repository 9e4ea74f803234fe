#include "cablefsi/geometry/amr.hpp"

#include "cablefsi/log.hpp"
#include "cablefsi/surface/intersect.hpp"

#include <cmath>

namespace cablefsi::geometry {

void AmrCriteria::validate() const {
  if (!(min_edge_length >= 0.0)) throw ConfigError("amr.min_edge_length must be non-negative");
  if (distance && !(distance_band > 0.0)) throw ConfigError("amr.distance_band must be positive");
  if (distance && !(near_wall_size > 0.0)) throw ConfigError("amr.near_wall_size must be positive");
  if (hessian && !(hessian_threshold > 0.0)) throw ConfigError("amr.hessian_threshold must be positive");
  if (hessian && !(feature_size >= 0.0)) throw ConfigError("amr.feature_size must be non-negative");
}

double speed_second_difference(const Mesh& mesh, std::span<const Vec3> g, Index edge) {
  const auto& e = mesh.edges()[edge];
  return std::abs((g[e.b] - g[e.a]).dot(mesh.nodes()[e.b] - mesh.nodes()[e.a]));
}

std::vector<Index> mark_for_amr(const Mesh& mesh, const surface::EdgeIntersections* hits,
                                const surface::SurfaceIndex* index, std::span<const Vec3> speed_gradient,
                                const AmrCriteria& c) {
  c.validate();
  if (c.hessian && speed_gradient.size() != mesh.num_nodes()) {
    throw ConfigError("Hessian criterion needs one speed gradient per mesh node");
  }
  const auto& x = mesh.nodes();
  std::vector<Index> marked;
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t k = 0; k < mesh.num_edges(); ++k) {
    const auto e = static_cast<Index>(k);
    const double len = mesh.edge_length(e);
    bool mark = false;
    if (c.doubly_intersected && hits != nullptr && len > c.min_edge_length && hits->hits(e).size() >= 2) {
      mark = true;
      ++counts[0];
    }
    if (!mark && c.distance && index != nullptr && len > c.near_wall_size) {
      // Endpoints and midpoint; the band is wide compared to the sampling gap
      // on any edge still long enough to be marked.
      const auto& ed = mesh.edges()[k];
      const Vec3 mid = 0.5 * (x[ed.a] + x[ed.b]);
      double d = index->closest_triangle(mid).first;
      d = std::min({d, index->closest_triangle(x[ed.a]).first, index->closest_triangle(x[ed.b]).first});
      if (d <= c.distance_band) {
        mark = true;
        ++counts[1];
      }
    }
    if (!mark && c.hessian && len > c.feature_size &&
        speed_second_difference(mesh, speed_gradient, e) > c.hessian_threshold) {
      mark = true;
      ++counts[2];
    }
    if (mark) marked.push_back(e);
  }
  logger()->debug("amr marks: {} doubly intersected, {} near wall, {} Hessian", counts[0], counts[1], counts[2]);
  return marked;
}

}  // namespace cablefsi::geometry
