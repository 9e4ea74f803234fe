#include "cablefsi/surface/intersect.hpp"

#include "cablefsi/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cablefsi::surface {

namespace {

bool lexicographically_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

double orient(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b) {
  return (q - p).dot((a - p).cross(b - p));
}

void sort_hits(std::vector<Intersection>& hits) {
  std::sort(hits.begin(), hits.end(), [](const Intersection& x, const Intersection& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.triangle < y.triangle;
  });
}

bool box_overlaps(const geometry::Box& a, const Vec3& lo, const Vec3& hi) {
  for (int k = 0; k < 3; ++k)
    if (hi[k] < a.lo[k] || lo[k] > a.hi[k]) return false;
  return true;
}

}  // namespace

std::optional<double> segment_crosses_triangle(const EmbeddedSurface& surface, Index triangle,
                                               const Vec3& p0, const Vec3& p1) {
  // Canonical segment direction so reversed queries evaluate identical predicates.
  const bool flipped = lexicographically_less(p1, p0);
  const Vec3& p = flipped ? p1 : p0;
  const Vec3& q = flipped ? p0 : p1;

  const auto& ids = surface.triangles()[triangle];
  const auto& x = surface.positions();
  const Vec3& a = x[ids[0]];
  const Vec3& b = x[ids[1]];
  const Vec3& c = x[ids[2]];

  const Vec3 nraw = (b - a).cross(c - a);
  const double nlen = nraw.norm();
  if (nlen == 0.0) return std::nullopt;
  const double scale = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  const double tol = 1e-12 * scale;
  const double dp = nraw.dot(p - a) / nlen;
  const double dq = nraw.dot(q - a) / nlen;
  // Points within tol of the plane see the surface shifted outward by epsilon.
  const int sp = dp > tol ? 1 : -1;
  const int sq = dq > tol ? 1 : -1;
  if (sp == sq) return std::nullopt;

  auto side = [&](Index i, Index j) {
    const Index lo = std::min(i, j), hi = std::max(i, j);
    const double v = orient(p, q, x[lo], x[hi]);
    const int s = v < 0.0 ? -1 : 1;
    return i == lo ? s : -s;
  };
  const int s0 = side(ids[0], ids[1]);
  const int s1 = side(ids[1], ids[2]);
  const int s2 = side(ids[2], ids[0]);
  if (s0 != s1 || s1 != s2) return std::nullopt;

  double t = dp / (dp - dq);
  if (!std::isfinite(t)) t = 0.5;
  t = std::clamp(t, 0.0, 1.0);
  return flipped ? 1.0 - t : t;
}

std::vector<Intersection> intersect_edge_bruteforce(const EmbeddedSurface& surface, const Vec3& p0,
                                                    const Vec3& p1) {
  std::vector<Intersection> hits;
  for (std::size_t tri = 0; tri < surface.num_triangles(); ++tri) {
    if (auto t = segment_crosses_triangle(surface, static_cast<Index>(tri), p0, p1)) {
      hits.push_back({-1, p0 + *t * (p1 - p0), *t, surface.normals()[tri], static_cast<Index>(tri)});
    }
  }
  sort_hits(hits);
  return hits;
}

SurfaceIndex::SurfaceIndex(const EmbeddedSurface& surface) : surface_(&surface) {
  if (surface.empty()) {
    box_ = {Vec3::Zero(), Vec3::Zero()};
    buckets_.assign(1, {});
    return;
  }
  const auto& x = surface.positions();
  std::vector<double> diameters;
  diameters.reserve(surface.num_triangles());
  for (const auto& t : surface.triangles()) {
    diameters.push_back(std::max({(x[t[1]] - x[t[0]]).norm(), (x[t[2]] - x[t[1]]).norm(),
                                  (x[t[0]] - x[t[2]]).norm()}));
  }
  std::nth_element(diameters.begin(), diameters.begin() + diameters.size() / 2, diameters.end());
  const double median = diameters[diameters.size() / 2];

  box_ = surface.bounding_box();
  const double pad = 1e-9 * std::max((box_.hi - box_.lo).norm(), median);
  box_.lo.array() -= pad;
  box_.hi.array() += pad;
  const Vec3 extent = box_.hi - box_.lo;
  cell_ = std::max(median, extent.maxCoeff() / 256.0);
  for (int a = 0; a < 3; ++a) dims_[a] = std::max(1, static_cast<int>(std::ceil(extent[a] / cell_)));
  buckets_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], {});

  for (std::size_t t = 0; t < surface.num_triangles(); ++t) {
    const auto& v = surface.triangles()[t];
    Vec3 lo = x[v[0]].cwiseMin(x[v[1]]).cwiseMin(x[v[2]]);
    Vec3 hi = x[v[0]].cwiseMax(x[v[1]]).cwiseMax(x[v[2]]);
    lo.array() -= 1e-9 * cell_;
    hi.array() += 1e-9 * cell_;
    const auto c0 = cell_of(lo), c1 = cell_of(hi);
    for (int k = c0[2]; k <= c1[2]; ++k)
      for (int j = c0[1]; j <= c1[1]; ++j)
        for (int i = c0[0]; i <= c1[0]; ++i) buckets_[flat({i, j, k})].push_back(static_cast<Index>(t));
  }
}

std::array<int, 3> SurfaceIndex::cell_of(const Vec3& x) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((x[a] - box_.lo[a]) / cell_)), 0, dims_[a] - 1);
  return c;
}

std::vector<Intersection> SurfaceIndex::intersect(const Vec3& p0, const Vec3& p1) const {
  std::vector<Intersection> hits;
  if (surface_->empty()) return hits;
  if (!box_overlaps(box_, p0.cwiseMin(p1), p0.cwiseMax(p1))) return hits;

  // Clip the segment to the grid box.
  const Vec3 d = p1 - p0;
  double t0 = 0.0, t1 = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (p0[a] < box_.lo[a] || p0[a] > box_.hi[a]) return hits;
      continue;
    }
    double ta = (box_.lo[a] - p0[a]) / d[a];
    double tb = (box_.hi[a] - p0[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return hits;
  }

  // Voxel walk.
  std::vector<Index> candidates;
  auto cell = cell_of(p0 + t0 * d);
  std::array<int, 3> step{};
  std::array<double, 3> t_max{}, t_delta{};
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (box_.lo[a] + (cell[a] + 1) * cell_ - p0[a]) / d[a];
      t_delta[a] = cell_ / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (box_.lo[a] + cell[a] * cell_ - p0[a]) / d[a];
      t_delta[a] = -cell_ / d[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }
  const std::size_t max_steps = static_cast<std::size_t>(dims_[0] + dims_[1] + dims_[2]) + 3;
  for (std::size_t s = 0; s < max_steps; ++s) {
    const auto& bucket = buckets_[flat(cell)];
    candidates.insert(candidates.end(), bucket.begin(), bucket.end());
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    if (t_max[a] > t1) break;
    cell[a] += step[a];
    if (cell[a] < 0 || cell[a] >= dims_[a]) break;
    t_max[a] += t_delta[a];
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (Index tri : candidates) {
    if (auto t = segment_crosses_triangle(*surface_, tri, p0, p1)) {
      hits.push_back({-1, p0 + *t * d, *t, surface_->normals()[tri], tri});
    }
  }
  sort_hits(hits);
  return hits;
}

std::pair<double, Vec3> point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                                const Vec3& c) {
  // Ericson, closest point on triangle by Voronoi regions.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {(p - a).norm(), a};
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {(p - b).norm(), b};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const Vec3 q = a + d1 / (d1 - d3) * ab;
    return {(p - q).norm(), q};
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {(p - c).norm(), c};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const Vec3 q = a + d2 / (d2 - d6) * ac;
    return {(p - q).norm(), q};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const Vec3 q = b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
    return {(p - q).norm(), q};
  }
  const double denom = 1.0 / (va + vb + vc);
  const Vec3 q = a + ab * (vb * denom) + ac * (vc * denom);
  return {(p - q).norm(), q};
}

std::pair<double, Index> SurfaceIndex::closest_triangle(const Vec3& x) const {
  double best = std::numeric_limits<double>::infinity();
  Index best_tri = -1;
  const auto& pos = surface_->positions();
  for (std::size_t t = 0; t < surface_->num_triangles(); ++t) {
    const auto& v = surface_->triangles()[t];
    const double d = point_triangle_distance(x, pos[v[0]], pos[v[1]], pos[v[2]]).first;
    if (d < best) {
      best = d;
      best_tri = static_cast<Index>(t);
    }
  }
  return {best, best_tri};
}

EdgeIntersections::EdgeIntersections(const geometry::Mesh& mesh, const SurfaceIndex& index) {
  offsets_.assign(mesh.num_edges() + 1, 0);
  const auto& x = mesh.nodes();
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges()[e];
    auto found = index.intersect(x[edge.a], x[edge.b]);
    for (auto& h : found) {
      h.edge = static_cast<Index>(e);
      hits_.push_back(h);
    }
    offsets_[e + 1] = static_cast<Index>(hits_.size());
  }
}

std::vector<NodeStatus> classify_occlusion(const geometry::Mesh& mesh, const SurfaceIndex* index,
                                           const OcclusionOptions& options) {
  std::vector<NodeStatus> status(mesh.num_nodes(), NodeStatus::Real);
  if (index == nullptr || index->surface().empty()) return status;
  const auto& surface = index->surface();
  if (!surface.is_closed()) {
    logger()->warn("occlusion parity on an open surface; results may be meaningless");
  }
  const geometry::Box& box = index->box();
  const double reach = 2.0 * (box.hi - box.lo).norm() + 1.0;
  // Generic direction, never aligned with mesh or cable axes.
  const Vec3 dir = Vec3(0.5773502691896258, 0.6123724356957945, 0.5400617248673217).normalized();

  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const Vec3& p = mesh.nodes()[i];
    bool inside_box = true;
    for (int a = 0; a < 3; ++a)
      if (p[a] < box.lo[a] || p[a] > box.hi[a]) inside_box = false;
    if (!inside_box) continue;
    const auto hits = index->intersect(p, p + reach * dir);
    const bool ghost = hits.size() % 2 == 1;
    if (ghost) status[i] = NodeStatus::Ghost;

    if (options.cross_check) {
      const auto [dist, tri] = index->closest_triangle(p);
      if (tri >= 0 && dist > 1e-9 * (box.hi - box.lo).norm()) {
        const auto& v = surface.triangles()[tri];
        const Vec3 closest = point_triangle_distance(p, surface.positions()[v[0]],
                                                     surface.positions()[v[1]],
                                                     surface.positions()[v[2]]).second;
        const bool inside_by_normal = (p - closest).dot(surface.normals()[tri]) < 0.0;
        if (inside_by_normal != ghost) {
          logger()->warn("occlusion ambiguity at node {}: parity says {}, nearest normal says {}", i,
                         ghost ? "ghost" : "real", inside_by_normal ? "ghost" : "real");
        }
      }
    }
  }
  return status;
}

}  // namespace cablefsi::surface
