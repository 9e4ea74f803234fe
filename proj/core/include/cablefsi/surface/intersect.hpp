#pragma once

#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/surface/embedded_surface.hpp"

#include <span>
#include <vector>

namespace cablefsi::surface {

struct Intersection {
  Index edge = -1;        // mesh edge id, -1 for free segments
  Vec3 point = Vec3::Zero();
  double t = 0.0;         // parameter along the queried segment, in [0, 1]
  Vec3 normal = Vec3::Zero();  // outward unit normal of the hit triangle
  Index triangle = -1;
};

/// Segment-triangle crossing with deterministic tie-breaking: points on the
/// triangle plane count as behind it, and exact zero orientations across a
/// triangle edge are attributed by node ids so a hit on an edge shared by two
/// triangles is reported once. Returns the segment parameter when crossing.
std::optional<double> segment_crosses_triangle(const EmbeddedSurface& surface, Index triangle,
                                               const Vec3& p0, const Vec3& p1);

/// Linear-scan intersection of a segment against all triangles.
std::vector<Intersection> intersect_edge_bruteforce(const EmbeddedSurface& surface, const Vec3& p0,
                                                    const Vec3& p1);

/// Uniform bucket grid over the surface bounding box with cells sized to the
/// median triangle diameter. Valid until the surface moves.
class SurfaceIndex {
 public:
  explicit SurfaceIndex(const EmbeddedSurface& surface);

  /// All transversal crossings of [p0, p1], sorted by parameter.
  [[nodiscard]] std::vector<Intersection> intersect(const Vec3& p0, const Vec3& p1) const;

  [[nodiscard]] const EmbeddedSurface& surface() const { return *surface_; }
  [[nodiscard]] const geometry::Box& box() const { return box_; }

  /// Closest surface point to x: (distance, triangle id).
  [[nodiscard]] std::pair<double, Index> closest_triangle(const Vec3& x) const;

 private:
  [[nodiscard]] std::array<int, 3> cell_of(const Vec3& x) const;
  [[nodiscard]] std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
  }

  const EmbeddedSurface* surface_;
  geometry::Box box_;
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::vector<Index>> buckets_;
};

/// Crossings of every mesh edge with the surface (CSR by edge id).
class EdgeIntersections {
 public:
  EdgeIntersections() = default;
  EdgeIntersections(const geometry::Mesh& mesh, const SurfaceIndex& index);

  /// Crossings of `edge`, ordered from edge.a to edge.b.
  [[nodiscard]] std::span<const Intersection> hits(Index edge) const {
    if (offsets_.empty()) return {};
    return {hits_.data() + offsets_[edge], static_cast<std::size_t>(offsets_[edge + 1] - offsets_[edge])};
  }
  [[nodiscard]] std::size_t total_hits() const { return hits_.size(); }
  [[nodiscard]] bool empty() const { return hits_.empty(); }

 private:
  std::vector<Index> offsets_;
  std::vector<Intersection> hits_;
};

enum class NodeStatus : std::uint8_t { Real = 0, Ghost = 1 };

struct OcclusionOptions {
  /// Also compare against the sign of the nearest triangle normal and warn on
  /// disagreement.
  bool cross_check = false;
};

/// A node is ghost iff it lies inside the closed surface (ray parity).
std::vector<NodeStatus> classify_occlusion(const geometry::Mesh& mesh, const SurfaceIndex* index,
                                           const OcclusionOptions& options = {});

/// Point-triangle distance and closest point.
std::pair<double, Vec3> point_triangle_distance(const Vec3& x, const Vec3& a, const Vec3& b,
                                                const Vec3& c);

}  // namespace cablefsi::surface
