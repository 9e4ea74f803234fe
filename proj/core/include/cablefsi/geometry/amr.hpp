#pragma once

#include "cablefsi/geometry/mesh.hpp"

#include <span>
#include <vector>

namespace cablefsi::surface {
class EdgeIntersections;
class SurfaceIndex;
}  // namespace cablefsi::surface

namespace cablefsi::geometry {

struct AmrCriteria {
  // (a) edges crossed at least twice by the surface
  bool doubly_intersected = true;
  double min_edge_length = 0.0;

  // (b) edges within `distance_band` of the surface and longer than `near_wall_size`
  bool distance = false;
  double distance_band = 0.0;
  double near_wall_size = 0.0;

  // (c) |(grad s_b - grad s_a) . (x_b - x_a)| of the speed s above `hessian_threshold`
  // on edges longer than `feature_size`. No default threshold.
  bool hessian = false;
  double hessian_threshold = 0.0;
  double feature_size = 0.0;

  void validate() const;
};

/// Union of the enabled criteria, sorted by edge id. `hits` and `index` may be
/// null when there is no surface; `speed_gradient` is per node and only read by
/// criterion (c).
std::vector<Index> mark_for_amr(const Mesh& mesh, const surface::EdgeIntersections* hits,
                                const surface::SurfaceIndex* index, std::span<const Vec3> speed_gradient,
                                const AmrCriteria& criteria);

/// Edge-wise second difference of the speed used by criterion (c).
double speed_second_difference(const Mesh& mesh, std::span<const Vec3> speed_gradient, Index edge);

}  // namespace cablefsi::geometry
