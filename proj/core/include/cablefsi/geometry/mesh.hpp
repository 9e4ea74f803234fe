#pragma once

#include "cablefsi/common.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cablefsi::geometry {

enum class BoundaryTag : std::uint8_t { Inflow = 0, Outflow = 1, Slip = 2, Farfield = 3 };

std::string_view to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(std::string_view name);

/// Tetrahedron in bisection order. The refinement edge is (v[0], v[tag]),
/// tag in {1, 2, 3}. The node order carries the bisection history and is
/// not necessarily positively oriented; use Mesh::oriented() for geometry.
struct Tet {
  std::array<Index, 4> v{};
  int tag = 3;

  [[nodiscard]] std::array<Index, 2> refinement_edge() const { return {v[0], v[tag]}; }
};

struct Edge {
  Index a = 0;  // a < b
  Index b = 0;
};

/// Boundary triangle, outward oriented (right-hand rule).
struct BoundaryFace {
  std::array<Index, 3> v{};
  BoundaryTag tag = BoundaryTag::Farfield;
};

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

/// Tag per box side in the order x-, x+, y-, y+, z-, z+.
using BoxSideTags = std::array<BoundaryTag, 6>;

inline constexpr BoxSideTags kAllFarfield = {BoundaryTag::Farfield, BoundaryTag::Farfield,
                                             BoundaryTag::Farfield, BoundaryTag::Farfield,
                                             BoundaryTag::Farfield, BoundaryTag::Farfield};
inline constexpr BoxSideTags kAllSlip = {BoundaryTag::Slip, BoundaryTag::Slip, BoundaryTag::Slip,
                                         BoundaryTag::Slip, BoundaryTag::Slip, BoundaryTag::Slip};

inline std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

/// Unstructured tetrahedral mesh. Immutable after construction: edges,
/// element-to-edge tables and the oriented boundary are derived once.
class Mesh {
 public:
  Mesh() = default;

  /// `tagged_faces` may list any subset of the boundary (node order is
  /// irrelevant); untagged boundary faces default to Farfield.
  Mesh(std::vector<Vec3> nodes, std::vector<Tet> tets,
       std::span<const BoundaryFace> tagged_faces = {});

  [[nodiscard]] const std::vector<Vec3>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<Tet>& tets() const { return tets_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<BoundaryFace>& boundary_faces() const { return boundary_; }

  [[nodiscard]] std::size_t num_nodes() const { return nodes_.size(); }
  [[nodiscard]] std::size_t num_tets() const { return tets_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }

  [[nodiscard]] std::optional<Index> find_edge(Index a, Index b) const;

  /// Edge ids of tet `t` in the order (01, 02, 03, 12, 13, 23) of its bisection order.
  [[nodiscard]] const std::array<Index, 6>& tet_edges(Index t) const { return tet_edges_[t]; }

  /// Nodes of tet `t` permuted to positive orientation.
  [[nodiscard]] std::array<Index, 4> oriented(Index t) const;

  [[nodiscard]] double tet_volume(Index t) const;
  [[nodiscard]] double total_volume() const;
  [[nodiscard]] double edge_length(Index e) const;
  [[nodiscard]] Box bounding_box() const;

  /// Tets incident to each node (CSR layout).
  [[nodiscard]] std::span<const Index> node_tets(Index node) const;
  /// Edges incident to each node (CSR layout).
  [[nodiscard]] std::span<const Index> node_edges(Index node) const;

 private:
  void build_topology(std::span<const BoundaryFace> tagged_faces);

  std::vector<Vec3> nodes_;
  std::vector<Tet> tets_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 6>> tet_edges_;
  std::vector<bool> flipped_;
  std::vector<BoundaryFace> boundary_;
  std::unordered_map<std::uint64_t, Index> edge_index_;
  std::vector<Index> node_tet_offsets_, node_tet_list_;
  std::vector<Index> node_edge_offsets_, node_edge_list_;
};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Minimum dihedral angle (radians) over all tets.
double min_dihedral_angle(const Mesh& mesh);

/// Structured box mesher: every cube cell is split into the 6 Kuhn simplices
/// sharing its main diagonal, all with tag 3 so the mesh is bisection compatible.
Mesh build_box_mesh(const Box& box, const std::array<int, 3>& resolution,
                    const BoxSideTags& side_tags = kAllFarfield);

}  // namespace cablefsi::geometry
