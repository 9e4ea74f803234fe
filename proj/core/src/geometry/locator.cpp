#include "cablefsi/geometry/locator.hpp"

#include <algorithm>
#include <cmath>

namespace cablefsi::geometry {

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  box_ = mesh.bounding_box();
  const Box& box = box_;
  const Vec3 extent = (box.hi - box.lo).cwiseMax(1e-300);
  const double mean_volume = mesh.total_volume() / std::max<std::size_t>(1, mesh.num_tets());
  // About two tets per bucket on average.
  cell_size_ = std::max(std::cbrt(2.0 * mean_volume), 1e-12 * extent.maxCoeff());
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::clamp(static_cast<int>(std::ceil(extent[a] / cell_size_)), 1, 512);
  }
  cell_size_ = std::max({extent[0] / dims_[0], extent[1] / dims_[1], extent[2] / dims_[2]});
  origin_ = box.lo;
  buckets_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], {});

  const auto& x = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto& v = mesh.tets()[t].v;
    Vec3 lo = x[v[0]], hi = x[v[0]];
    for (int k = 1; k < 4; ++k) {
      lo = lo.cwiseMin(x[v[k]]);
      hi = hi.cwiseMax(x[v[k]]);
    }
    const auto c0 = cell_of(lo), c1 = cell_of(hi);
    for (int k = c0[2]; k <= c1[2]; ++k)
      for (int j = c0[1]; j <= c1[1]; ++j)
        for (int i = c0[0]; i <= c1[0]; ++i)
          buckets_[(static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i].push_back(
              static_cast<Index>(t));
  }
}

std::array<int, 3> PointLocator::cell_of(const Vec3& x) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    c[a] = std::clamp(static_cast<int>(std::floor((x[a] - origin_[a]) / cell_size_)), 0,
                      dims_[a] - 1);
  }
  return c;
}

std::array<double, 4> PointLocator::barycentric(Index t, const Vec3& x) const {
  const auto& p = mesh_->nodes();
  const auto& v = mesh_->tets()[t].v;
  const double total = signed_volume(p[v[0]], p[v[1]], p[v[2]], p[v[3]]);
  return {signed_volume(x, p[v[1]], p[v[2]], p[v[3]]) / total,
          signed_volume(p[v[0]], x, p[v[2]], p[v[3]]) / total,
          signed_volume(p[v[0]], p[v[1]], x, p[v[3]]) / total,
          signed_volume(p[v[0]], p[v[1]], p[v[2]], x) / total};
}

std::optional<Index> PointLocator::locate(const Vec3& x) const {
  const Box& box = box_;
  const double slack = 1e-12 * cell_size_;
  for (int a = 0; a < 3; ++a) {
    if (x[a] < box.lo[a] - slack || x[a] > box.hi[a] + slack) return std::nullopt;
  }
  const auto c = cell_of(x);
  const auto& bucket = buckets_[(static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0]];
  std::optional<Index> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (Index t : bucket) {
    const auto b = barycentric(t, x);
    const double m = std::min({b[0], b[1], b[2], b[3]});
    if (m >= 0.0) return t;
    if (m > best_min) {
      best_min = m;
      best = t;
    }
  }
  if (best && best_min > -1e-10) return best;
  return std::nullopt;
}

}  // namespace cablefsi::geometry
