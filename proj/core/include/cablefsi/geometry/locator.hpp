#pragma once

#include "cablefsi/geometry/mesh.hpp"

#include <optional>
#include <vector>

namespace cablefsi::geometry {

/// Point-in-tetrahedron search through a uniform bucket grid of element
/// bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Host tetrahedron of `x`, or nullopt when `x` lies outside the mesh.
  [[nodiscard]] std::optional<Index> locate(const Vec3& x) const;

  /// Barycentric coordinates of `x` in tet `t` with respect to Mesh::tets()[t].v.
  [[nodiscard]] std::array<double, 4> barycentric(Index t, const Vec3& x) const;

 private:
  [[nodiscard]] std::array<int, 3> cell_of(const Vec3& x) const;

  const Mesh* mesh_;
  Box box_;
  Vec3 origin_;
  double cell_size_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace cablefsi::geometry
