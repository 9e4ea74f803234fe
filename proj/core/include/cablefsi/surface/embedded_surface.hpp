#pragma once

#include "cablefsi/common.hpp"
#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/vtk.hpp"

#include <span>
#include <vector>

namespace cablefsi::surface {

using Triangle = std::array<Index, 3>;

/// Triangulated cable surface. Nodes are grouped in coplanar cross sections;
/// triangles are outward oriented. Geometry queries always use the current
/// configuration (reference + displacement).
class EmbeddedSurface {
 public:
  EmbeddedSurface() = default;
  EmbeddedSurface(std::vector<Vec3> reference, std::vector<Triangle> triangles,
                  std::vector<std::vector<Index>> sections);

  [[nodiscard]] const std::vector<Vec3>& reference() const { return reference_; }
  [[nodiscard]] const std::vector<Vec3>& positions() const { return positions_; }
  [[nodiscard]] const std::vector<Vec3>& displacement() const { return displacement_; }
  [[nodiscard]] const std::vector<Vec3>& velocity() const { return velocity_; }
  [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
  [[nodiscard]] const std::vector<std::vector<Index>>& sections() const { return sections_; }
  [[nodiscard]] Index section_of(Index node) const { return section_of_[node]; }

  /// Unit outward normal and area of each triangle in the current configuration.
  [[nodiscard]] const std::vector<Vec3>& normals() const { return normals_; }
  [[nodiscard]] const std::vector<double>& areas() const { return areas_; }

  [[nodiscard]] std::size_t num_nodes() const { return reference_.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles_.size(); }
  [[nodiscard]] bool empty() const { return triangles_.empty(); }

  /// Every triangle edge shared by exactly two triangles.
  [[nodiscard]] bool is_closed() const;
  [[nodiscard]] geometry::Box bounding_box() const;
  /// Sum of area-weighted outward normals (zero for a closed surface).
  [[nodiscard]] Vec3 area_vector_sum() const;

  void set_motion(std::span<const Vec3> displacement, std::span<const Vec3> velocity);

  [[nodiscard]] vtk::UnstructuredGrid to_vtk() const;

 private:
  void update_geometry();

  std::vector<Vec3> reference_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> displacement_;
  std::vector<Vec3> velocity_;
  std::vector<Triangle> triangles_;
  std::vector<std::vector<Index>> sections_;
  std::vector<Index> section_of_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
};

/// Regular-polygon cross sections (vertices on the circle of the given
/// diameter) swept along the centerline with rotation-minimizing frames,
/// stitched with 2*sides triangles per segment and optional fan end caps
/// (one extra centre node per cap, attached to the terminal section).
EmbeddedSurface generate_cable_surface(std::span<const Vec3> centerline, int sides,
                                       double diameter, bool caps);

/// Largest distance of a section node from the best plane through its
/// section (uses the reference configuration).
double max_section_coplanarity_residual(const EmbeddedSurface& surface);

}  // namespace cablefsi::surface
