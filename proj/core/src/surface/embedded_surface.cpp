#include "cablefsi/surface/embedded_surface.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace cablefsi::surface {

EmbeddedSurface::EmbeddedSurface(std::vector<Vec3> reference, std::vector<Triangle> triangles,
                                 std::vector<std::vector<Index>> sections)
    : reference_(std::move(reference)),
      triangles_(std::move(triangles)),
      sections_(std::move(sections)) {
  const auto n = static_cast<Index>(reference_.size());
  for (const auto& tri : triangles_)
    for (Index v : tri)
      if (v < 0 || v >= n) throw GeometryError("surface triangle references missing node");
  section_of_.assign(reference_.size(), -1);
  for (std::size_t s = 0; s < sections_.size(); ++s) {
    if (sections_[s].size() < 3) {
      throw GeometryError("surface section " + std::to_string(s) + " has fewer than 3 nodes");
    }
    for (Index v : sections_[s]) {
      if (v < 0 || v >= n || section_of_[v] != -1)
        throw GeometryError("surface node listed in more than one section");
      section_of_[v] = static_cast<Index>(s);
    }
  }
  if (!sections_.empty() && std::count(section_of_.begin(), section_of_.end(), -1) != 0) {
    throw GeometryError("surface node without a section");
  }
  displacement_.assign(reference_.size(), Vec3::Zero());
  velocity_.assign(reference_.size(), Vec3::Zero());
  update_geometry();
}

void EmbeddedSurface::update_geometry() {
  positions_.resize(reference_.size());
  for (std::size_t i = 0; i < reference_.size(); ++i) positions_[i] = reference_[i] + displacement_[i];
  normals_.resize(triangles_.size());
  areas_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& v = triangles_[t];
    const Vec3 n = (positions_[v[1]] - positions_[v[0]]).cross(positions_[v[2]] - positions_[v[0]]);
    const double len = n.norm();
    areas_[t] = 0.5 * len;
    normals_[t] = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
  }
}

void EmbeddedSurface::set_motion(std::span<const Vec3> displacement, std::span<const Vec3> velocity) {
  if (displacement.size() != reference_.size() || velocity.size() != reference_.size()) {
    throw GeometryError("surface motion size mismatch");
  }
  displacement_.assign(displacement.begin(), displacement.end());
  velocity_.assign(velocity.begin(), velocity.end());
  update_geometry();
}

bool EmbeddedSurface::is_closed() const {
  if (triangles_.empty()) return false;
  std::map<std::pair<Index, Index>, int> count;
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) {
      Index a = t[k], b = t[(k + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

geometry::Box EmbeddedSurface::bounding_box() const {
  geometry::Box box{Vec3::Constant(std::numeric_limits<double>::infinity()),
                    Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (const auto& p : positions_) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  return box;
}

Vec3 EmbeddedSurface::area_vector_sum() const {
  Vec3 sum = Vec3::Zero();
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += areas_[t] * normals_[t];
  return sum;
}

vtk::UnstructuredGrid EmbeddedSurface::to_vtk() const {
  vtk::UnstructuredGrid grid;
  grid.points = positions_;
  grid.cell_type = vtk::CellType::Triangle;
  for (const auto& t : triangles_) grid.cells.push_back({t[0], t[1], t[2]});
  grid.vectors.push_back({"displacement", displacement_});
  grid.vectors.push_back({"velocity", velocity_});
  return grid;
}

namespace {

Vec3 any_perpendicular(const Vec3& t) {
  int smallest = 0;
  t.cwiseAbs().minCoeff(&smallest);
  const Vec3 axis = Vec3::Unit(smallest);
  const Vec3 n = axis - axis.dot(t) * t;
  return n.normalized();
}

// Minimal rotation taking unit vector `from` to unit vector `to`, applied to v.
Vec3 transport(const Vec3& v, const Vec3& from, const Vec3& to) {
  const Vec3 axis = from.cross(to);
  const double s = axis.norm();
  const double c = from.dot(to);
  if (s < 1e-15) return v;
  const Vec3 k = axis / s;
  return v * c + k.cross(v) * s + k * k.dot(v) * (1.0 - c);
}

}  // namespace

EmbeddedSurface generate_cable_surface(std::span<const Vec3> centerline, int sides, double diameter,
                                       bool caps) {
  if (sides < 3) throw GeometryError("invalid section: at least 3 sides are required");
  if (centerline.size() < 2) throw GeometryError("centerline needs at least 2 points");
  if (!(diameter > 0.0)) throw GeometryError("invalid section: diameter must be positive");
  const std::size_t n = centerline.size();
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, (centerline[i + 1] - centerline[i]).norm());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((centerline[i + 1] - centerline[i]).norm() <= 1e-14 * scale || scale == 0.0) {
      throw GeometryError("degenerate tangent: repeated centerline point " + std::to_string(i + 1));
    }
  }

  std::vector<Vec3> tangents(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 ahead = i + 1 < n ? Vec3((centerline[i + 1] - centerline[i]).normalized()) : Vec3::Zero();
    const Vec3 behind = i > 0 ? Vec3((centerline[i] - centerline[i - 1]).normalized()) : Vec3::Zero();
    Vec3 t = ahead + behind;
    if (t.norm() < 1e-12) {
      throw GeometryError("degenerate tangent: centerline folds back at point " + std::to_string(i));
    }
    tangents[i] = t.normalized();
  }

  const double radius = 0.5 * diameter;
  std::vector<Vec3> nodes;
  std::vector<std::vector<Index>> sections(n);
  Vec3 normal = any_perpendicular(tangents[0]);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      normal = transport(normal, tangents[i - 1], tangents[i]);
      normal = (normal - normal.dot(tangents[i]) * tangents[i]).normalized();
    }
    const Vec3 binormal = tangents[i].cross(normal);
    for (int k = 0; k < sides; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / sides;
      sections[i].push_back(static_cast<Index>(nodes.size()));
      nodes.push_back(centerline[i] + radius * (std::cos(phi) * normal + std::sin(phi) * binormal));
    }
  }

  std::vector<Triangle> triangles;
  triangles.reserve(2 * sides * (n - 1) + (caps ? 2 * sides : 0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int k = 0; k < sides; ++k) {
      const Index a0 = sections[i][k], a1 = sections[i][(k + 1) % sides];
      const Index b0 = sections[i + 1][k], b1 = sections[i + 1][(k + 1) % sides];
      triangles.push_back({a0, a1, b1});
      triangles.push_back({a0, b1, b0});
    }
  }
  if (caps) {
    const auto start = static_cast<Index>(nodes.size());
    nodes.push_back(centerline.front());
    const auto end = static_cast<Index>(nodes.size());
    nodes.push_back(centerline.back());
    for (int k = 0; k < sides; ++k) {
      triangles.push_back({start, sections.front()[(k + 1) % sides], sections.front()[k]});
      triangles.push_back({end, sections.back()[k], sections.back()[(k + 1) % sides]});
    }
    sections.front().push_back(start);
    sections.back().push_back(end);
  }
  return EmbeddedSurface(std::move(nodes), std::move(triangles), std::move(sections));
}

double max_section_coplanarity_residual(const EmbeddedSurface& surface) {
  double worst = 0.0;
  for (const auto& section : surface.sections()) {
    Vec3 mean = Vec3::Zero();
    for (Index v : section) mean += surface.reference()[v];
    mean /= static_cast<double>(section.size());
    Mat3 cov = Mat3::Zero();
    for (Index v : section) {
      const Vec3 d = surface.reference()[v] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 normal = eig.eigenvectors().col(0);
    for (Index v : section) worst = std::max(worst, std::abs((surface.reference()[v] - mean).dot(normal)));
  }
  return worst;
}

}  // namespace cablefsi::surface
