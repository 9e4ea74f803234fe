#include "cablefsi/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cablefsi::geometry {

namespace {

constexpr std::array<std::array<int, 2>, 6> kLocalEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Outward faces of a positively oriented tet.
constexpr std::array<std::array<int, 3>, 4> kOutwardFaces = {
    {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

struct FaceKey {
  std::array<Index, 3> sorted;
  bool operator==(const FaceKey&) const = default;
};

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Index v : k.sorted) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

FaceKey make_face_key(std::array<Index, 3> v) {
  std::sort(v.begin(), v.end());
  return {v};
}

void build_csr(std::size_t n, const std::vector<std::pair<Index, Index>>& pairs,
               std::vector<Index>& offsets, std::vector<Index>& list) {
  offsets.assign(n + 1, 0);
  for (const auto& [node, item] : pairs) ++offsets[node + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  list.assign(pairs.size(), 0);
  std::vector<Index> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [node, item] : pairs) list[fill[node]++] = item;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Inflow: return "inflow";
    case BoundaryTag::Outflow: return "outflow";
    case BoundaryTag::Slip: return "slip";
    case BoundaryTag::Farfield: return "farfield";
  }
  return "farfield";
}

BoundaryTag boundary_tag_from_string(std::string_view name) {
  if (name == "inflow") return BoundaryTag::Inflow;
  if (name == "outflow") return BoundaryTag::Outflow;
  if (name == "slip") return BoundaryTag::Slip;
  if (name == "farfield") return BoundaryTag::Farfield;
  throw ConfigError("unknown boundary tag '" + std::string(name) + "'");
}

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

Mesh::Mesh(std::vector<Vec3> nodes, std::vector<Tet> tets,
           std::span<const BoundaryFace> tagged_faces)
    : nodes_(std::move(nodes)), tets_(std::move(tets)) {
  build_topology(tagged_faces);
}

void Mesh::build_topology(std::span<const BoundaryFace> tagged_faces) {
  const auto n_nodes = static_cast<Index>(nodes_.size());
  flipped_.assign(tets_.size(), false);
  tet_edges_.resize(tets_.size());

  double scale = 0.0;
  for (const auto& p : nodes_) scale = std::max(scale, p.cwiseAbs().maxCoeff());

  for (std::size_t t = 0; t < tets_.size(); ++t) {
    const auto& tet = tets_[t];
    if (tet.tag < 1 || tet.tag > 3) {
      throw GeometryError("tetrahedron " + std::to_string(t) + " has invalid bisection tag");
    }
    for (Index v : tet.v) {
      if (v < 0 || v >= n_nodes) {
        throw GeometryError("tetrahedron " + std::to_string(t) + " references missing node " +
                            std::to_string(v));
      }
    }
    const double vol = signed_volume(nodes_[tet.v[0]], nodes_[tet.v[1]], nodes_[tet.v[2]],
                                     nodes_[tet.v[3]]);
    const double edge0 = (nodes_[tet.v[1]] - nodes_[tet.v[0]]).norm();
    if (!(std::abs(vol) > 1e-14 * edge0 * edge0 * edge0) || !std::isfinite(vol)) {
      throw GeometryError("degenerate tetrahedron " + std::to_string(t) + " (volume " +
                          std::to_string(vol) + ")");
    }
    flipped_[t] = vol < 0.0;
  }

  edges_.clear();
  edge_index_.clear();
  edge_index_.reserve(tets_.size() * 2);
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    const auto& v = tets_[t].v;
    for (int k = 0; k < 6; ++k) {
      Index a = v[kLocalEdges[k][0]];
      Index b = v[kLocalEdges[k][1]];
      const auto key = edge_key(a, b);
      auto [it, inserted] = edge_index_.try_emplace(key, static_cast<Index>(edges_.size()));
      if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
      tet_edges_[t][k] = it->second;
    }
  }

  std::unordered_map<FaceKey, BoundaryTag, FaceKeyHash> tags;
  for (const auto& f : tagged_faces) tags[make_face_key(f.v)] = f.tag;

  std::unordered_map<FaceKey, std::pair<int, std::array<Index, 3>>, FaceKeyHash> faces;
  faces.reserve(tets_.size() * 3);
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    const auto o = oriented(static_cast<Index>(t));
    for (const auto& lf : kOutwardFaces) {
      std::array<Index, 3> f = {o[lf[0]], o[lf[1]], o[lf[2]]};
      auto& entry = faces[make_face_key(f)];
      entry.first += 1;
      entry.second = f;
    }
  }
  boundary_.clear();
  for (const auto& [key, entry] : faces) {
    if (entry.first > 2) {
      throw GeometryError("non-manifold face shared by " + std::to_string(entry.first) +
                          " tetrahedra");
    }
    if (entry.first == 1) {
      auto it = tags.find(key);
      boundary_.push_back({entry.second, it == tags.end() ? BoundaryTag::Farfield : it->second});
    }
  }
  // Deterministic order independent of hash iteration.
  std::sort(boundary_.begin(), boundary_.end(), [](const BoundaryFace& x, const BoundaryFace& y) {
    auto kx = make_face_key(x.v).sorted;
    auto ky = make_face_key(y.v).sorted;
    return kx < ky;
  });

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(tets_.size() * 4);
  for (std::size_t t = 0; t < tets_.size(); ++t)
    for (Index v : tets_[t].v) pairs.emplace_back(v, static_cast<Index>(t));
  build_csr(nodes_.size(), pairs, node_tet_offsets_, node_tet_list_);

  pairs.clear();
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    pairs.emplace_back(edges_[e].a, static_cast<Index>(e));
    pairs.emplace_back(edges_[e].b, static_cast<Index>(e));
  }
  build_csr(nodes_.size(), pairs, node_edge_offsets_, node_edge_list_);
}

std::optional<Index> Mesh::find_edge(Index a, Index b) const {
  auto it = edge_index_.find(edge_key(a, b));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::array<Index, 4> Mesh::oriented(Index t) const {
  auto v = tets_[t].v;
  if (flipped_[t]) std::swap(v[2], v[3]);
  return v;
}

double Mesh::tet_volume(Index t) const {
  const auto& v = tets_[t].v;
  return std::abs(signed_volume(nodes_[v[0]], nodes_[v[1]], nodes_[v[2]], nodes_[v[3]]));
}

double Mesh::total_volume() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < tets_.size(); ++t) sum += tet_volume(static_cast<Index>(t));
  return sum;
}

double Mesh::edge_length(Index e) const {
  return (nodes_[edges_[e].b] - nodes_[edges_[e].a]).norm();
}

Box Mesh::bounding_box() const {
  Box box{Vec3::Constant(std::numeric_limits<double>::infinity()),
          Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& p : nodes_) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box;
}

std::span<const Index> Mesh::node_tets(Index node) const {
  return {node_tet_list_.data() + node_tet_offsets_[node],
          static_cast<std::size_t>(node_tet_offsets_[node + 1] - node_tet_offsets_[node])};
}

std::span<const Index> Mesh::node_edges(Index node) const {
  return {node_edge_list_.data() + node_edge_offsets_[node],
          static_cast<std::size_t>(node_edge_offsets_[node + 1] - node_edge_offsets_[node])};
}

double min_dihedral_angle(const Mesh& mesh) {
  double best = std::numbers::pi;
  const auto& x = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto& v = mesh.tets()[t].v;
    for (int k = 0; k < 6; ++k) {
      const int i = kLocalEdges[k][0];
      const int j = kLocalEdges[k][1];
      int others[2];
      int n = 0;
      for (int m = 0; m < 4; ++m)
        if (m != i && m != j) others[n++] = m;
      const Vec3 e = (x[v[j]] - x[v[i]]).normalized();
      Vec3 u = x[v[others[0]]] - x[v[i]];
      Vec3 w = x[v[others[1]]] - x[v[i]];
      u -= u.dot(e) * e;
      w -= w.dot(e) * e;
      const double c = std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0);
      best = std::min(best, std::acos(c));
    }
  }
  return best;
}

Mesh build_box_mesh(const Box& box, const std::array<int, 3>& resolution,
                    const BoxSideTags& side_tags) {
  const Vec3 extent = box.hi - box.lo;
  if (!(extent.minCoeff() > 0.0)) {
    throw GeometryError("invalid domain: box extents must be positive");
  }
  for (int r : resolution) {
    if (r < 1) throw GeometryError("invalid domain: resolution must be >= 1 per axis");
  }
  const int nx = resolution[0], ny = resolution[1], nz = resolution[2];
  auto id = [&](int i, int j, int k) -> Index {
    return static_cast<Index>(i) + static_cast<Index>(nx + 1) *
                                       (static_cast<Index>(j) + static_cast<Index>(ny + 1) * k);
  };

  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        // Exact end coordinates so side faces are detected without tolerance.
        auto coord = [](double lo, double hi, int m, int n) {
          return m == n ? hi : lo + (hi - lo) * static_cast<double>(m) / n;
        };
        nodes.emplace_back(coord(box.lo.x(), box.hi.x(), i, nx), coord(box.lo.y(), box.hi.y(), j, ny),
                           coord(box.lo.z(), box.hi.z(), k, nz));
      }

  static constexpr std::array<std::array<int, 3>, 6> kPermutations = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  std::vector<Tet> tets;
  tets.reserve(static_cast<std::size_t>(6 * nx * ny * nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& perm : kPermutations) {
          std::array<int, 3> c = {i, j, k};
          Tet tet;
          tet.v[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            tet.v[s + 1] = id(c[0], c[1], c[2]);
          }
          tet.tag = 3;
          tets.push_back(tet);
        }

  Mesh untagged(nodes, tets);
  std::vector<BoundaryFace> tagged;
  tagged.reserve(untagged.boundary_faces().size());
  for (const auto& f : untagged.boundary_faces()) {
    BoundaryFace out = f;
    for (int axis = 0; axis < 3; ++axis) {
      const double lo = box.lo[axis], hi = box.hi[axis];
      if (std::all_of(f.v.begin(), f.v.end(), [&](Index v) { return nodes[v][axis] == lo; }))
        out.tag = side_tags[2 * axis];
      if (std::all_of(f.v.begin(), f.v.end(), [&](Index v) { return nodes[v][axis] == hi; }))
        out.tag = side_tags[2 * axis + 1];
    }
    tagged.push_back(out);
  }
  return Mesh(std::move(nodes), std::move(tets), tagged);
}

}  // namespace cablefsi::geometry
