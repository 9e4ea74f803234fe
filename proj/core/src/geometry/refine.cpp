#include "cablefsi/geometry/refine.hpp"

#include "cablefsi/log.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace cablefsi::geometry {

namespace {

using FaceTriple = std::array<Index, 3>;

FaceTriple sorted_triple(Index a, Index b, Index c) {
  FaceTriple f = {a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

// Maubach's bisection of a tagged simplex (x0, x1, x2, x3)_k with z the
// midpoint of the refinement edge (x0, xk).
std::array<Tet, 2> bisect(const Tet& tet, Index z) {
  const int k = tet.tag;
  const int child_tag = k > 1 ? k - 1 : 3;
  Tet first, second;
  for (int i = 0; i < 4; ++i) {
    if (i < k) {
      first.v[i] = tet.v[i];
      second.v[i] = tet.v[i + 1];
    } else if (i == k) {
      first.v[i] = z;
      second.v[i] = z;
    } else {
      first.v[i] = tet.v[i];
      second.v[i] = tet.v[i];
    }
  }
  first.tag = child_tag;
  second.tag = child_tag;
  return {first, second};
}

}  // namespace

Refinement refine_edges(const Mesh& mesh, std::span<const Index> marked_edges,
                        const RefineOptions& options) {
  std::unordered_set<std::uint64_t> pending;
  for (Index e : marked_edges) {
    if (e < 0 || e >= static_cast<Index>(mesh.num_edges())) {
      throw RefinementError("marked edge " + std::to_string(e) + " does not exist");
    }
    pending.insert(edge_key(mesh.edges()[e].a, mesh.edges()[e].b));
  }
  if (pending.empty()) return {mesh, {}};

  std::vector<Vec3> nodes = mesh.nodes();
  std::vector<Tet> tets = mesh.tets();
  std::vector<std::array<Index, 2>> parents;
  std::unordered_map<std::uint64_t, Index> midpoints;
  std::map<FaceTriple, BoundaryTag> boundary;
  for (const auto& f : mesh.boundary_faces()) boundary[sorted_triple(f.v[0], f.v[1], f.v[2])] = f.tag;

  auto contains_pending = [&](const Tet& t) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (pending.count(edge_key(t.v[i], t.v[j]))) return true;
    return false;
  };

  auto midpoint_of = [&](Index a, Index b) {
    const auto key = edge_key(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const auto id = static_cast<Index>(nodes.size());
    nodes.push_back(0.5 * (nodes[a] + nodes[b]));
    parents.push_back({std::min(a, b), std::max(a, b)});
    midpoints.emplace(key, id);
    pending.insert(key);
    return id;
  };

  int passes = 0;
  bool changed = true;
  while (changed) {
    if (++passes > options.max_closure_passes) {
      throw RefinementError("conformity closure exceeded " +
                            std::to_string(options.max_closure_passes) +
                            " passes (incompatible bisection tags?)");
    }
    changed = false;
    std::vector<Tet> next;
    next.reserve(tets.size() + tets.size() / 4);
    std::vector<Tet> stack;
    for (const auto& root : tets) {
      stack.push_back(root);
      while (!stack.empty()) {
        const Tet t = stack.back();
        stack.pop_back();
        if (!contains_pending(t)) {
          next.push_back(t);
          continue;
        }
        changed = true;
        const auto [a, b] = t.refinement_edge();
        const Index z = midpoint_of(a, b);
        for (Index c : t.v) {
          if (c == a || c == b) continue;
          auto it = boundary.find(sorted_triple(a, b, c));
          if (it == boundary.end()) continue;
          const BoundaryTag tag = it->second;
          boundary.erase(it);
          boundary[sorted_triple(a, z, c)] = tag;
          boundary[sorted_triple(z, b, c)] = tag;
        }
        const auto children = bisect(t, z);
        // Second child first so the first child is processed first.
        stack.push_back(children[1]);
        stack.push_back(children[0]);
      }
    }
    tets = std::move(next);
  }
  logger()->debug("refine_edges: {} new nodes, {} tets after {} passes", parents.size(),
                  tets.size(), passes);

  std::vector<BoundaryFace> faces;
  faces.reserve(boundary.size());
  for (const auto& [f, tag] : boundary) faces.push_back({f, tag});
  return {Mesh(std::move(nodes), std::move(tets), faces), std::move(parents)};
}

}  // namespace cablefsi::geometry
