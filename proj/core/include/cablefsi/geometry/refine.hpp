#pragma once

#include "cablefsi/geometry/mesh.hpp"

#include <span>
#include <vector>

namespace cablefsi::geometry {

struct RefineOptions {
  /// Bound on conformity-closure sweeps; exceeding it means the bisection
  /// tags of the input mesh are not compatible.
  int max_closure_passes = 64;
};

struct Refinement {
  Mesh mesh;
  /// Parent edge (two old node ids) of every new node, in creation order.
  /// New node k has id `old_node_count + k`.
  std::vector<std::array<Index, 2>> new_node_parents;
};

/// Newest-vertex bisection of every marked edge, followed by conformity
/// closure so that the result has no hanging nodes.
Refinement refine_edges(const Mesh& mesh, std::span<const Index> marked_edges,
                        const RefineOptions& options = {});

/// Nodal field transfer to a refined mesh: new nodes get the mean of their
/// parent edge's values. Applied in creation order, so parents may themselves
/// be new nodes.
template <typename T>
void transfer_by_midpoints(std::vector<T>& values, const Refinement& refinement) {
  values.reserve(values.size() + refinement.new_node_parents.size());
  for (const auto& p : refinement.new_node_parents) {
    T mid = T(0.5 * (values[p[0]] + values[p[1]]));
    values.push_back(std::move(mid));
  }
}

}  // namespace cablefsi::geometry
