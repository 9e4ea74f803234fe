#include "cablefsi/fluid/fluid.hpp"

#include "cablefsi/log.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace cablefsi::fluid {

FluidState uniform_state(std::size_t nodes, const PrimitiveState& w, const GasModel& gas) {
  FluidState s;
  s.W.assign(nodes, riemann::to_conservative(w, gas));
  return s;
}

FluidContext::FluidContext(const geometry::Mesh& mesh, GasModel gas, PrimitiveState farfield, FluidOptions options)
    : mesh_(&mesh),
      dual_(geometry::compute_dual_geometry(mesh)),
      gas_(gas),
      farfield_(farfield),
      options_(options) {
  gas_.validate();
  if (!(farfield_.rho > 0.0) || !(farfield_.p > 0.0)) throw ConfigError("farfield density and pressure must be positive");
  if (!(options_.cfl > 0.0)) throw ConfigError("CFL number must be positive");

  const auto& x = mesh.nodes();
  elements_.resize(mesh.num_tets());
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    ElementGeometry& el = elements_[t];
    el.nodes = mesh.oriented(static_cast<Index>(t));
    Mat3 j;
    for (int k = 0; k < 3; ++k) j.col(k) = x[el.nodes[k + 1]] - x[el.nodes[0]];
    el.volume = j.determinant() / 6.0;
    const Mat3 inv = j.inverse();
    el.grad_phi[0] = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      el.grad_phi[k + 1] = inv.row(k).transpose();
      el.grad_phi[0] -= el.grad_phi[k + 1];
    }
  }

  // Dual-cell size vol_i / sum |A_ij|; tighter than the shortest edge for
  // median duals and what the explicit update actually sees.
  std::vector<double> perimeter(mesh.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const double a = dual_.facet[e].norm();
    perimeter[mesh.edges()[e].a] += a;
    perimeter[mesh.edges()[e].b] += a;
  }
  for (const auto& b : dual_.boundary) perimeter[b.node] += b.area.norm();
  node_size_.resize(mesh.num_nodes());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) node_size_[i] = dual_.volume[i] / perimeter[i];
  locator_ = std::make_unique<geometry::PointLocator>(mesh);
  build_gradient_stencils();
}

void FluidContext::build_gradient_stencils() {
  const auto& mesh = *mesh_;
  const auto& x = mesh.nodes();
  lsq_inverse_.assign(mesh.num_nodes(), Mat3::Zero());
  std::size_t deficient = 0;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const auto n = static_cast<Index>(i);
    if (!is_real(n)) continue;
    Mat3 m = Mat3::Zero();
    for (Index e : mesh.node_edges(n)) {
      const auto& ed = mesh.edges()[e];
      const Index j = ed.a == n ? ed.b : ed.a;
      if (!is_real(j) || edge_cut(e)) continue;
      const Vec3 dx = x[j] - x[n];
      m += dx * dx.transpose() / dx.squaredNorm();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(m, Eigen::EigenvaluesOnly);
    const Vec3 ev = eig.eigenvalues();
    if (!(ev[0] > 1e-10 * ev[2])) {
      ++deficient;
      continue;
    }
    lsq_inverse_[i] = m.inverse();
  }
  if (deficient > 0) logger()->debug("{} nodes with rank-deficient gradient stencils use zero gradients", deficient);
}

void FluidContext::set_surface(const surface::EmbeddedSurface* surface) {
  interface_ = Interface{};
  if (surface != nullptr && !surface->empty()) {
    const surface::SurfaceIndex index(*surface);
    interface_.surface = surface;
    interface_.hits = surface::EdgeIntersections(*mesh_, index);
    interface_.status = surface::classify_occlusion(*mesh_, &index);
  }
  build_gradient_stencils();
}

std::vector<Primitive5> primitives(const FluidContext& ctx, const FluidState& state) {
  std::vector<Primitive5> w(state.W.size(), Primitive5::Zero());
  for (std::size_t i = 0; i < state.W.size(); ++i) {
    if (!ctx.is_real(static_cast<Index>(i))) continue;
    const PrimitiveState p = riemann::to_primitive(state.W[i], ctx.gas());
    w[i] << p.rho, p.v, p.p;
  }
  return w;
}

Conservative total_conserved(const FluidContext& ctx, const FluidState& state) {
  Conservative sum = Conservative::Zero();
  for (std::size_t i = 0; i < state.W.size(); ++i) {
    if (ctx.is_real(static_cast<Index>(i))) sum += ctx.dual().volume[i] * state.W[i];
  }
  return sum;
}

vtk::UnstructuredGrid to_vtk(const FluidContext& ctx, const FluidState& state) {
  const auto& mesh = ctx.mesh();
  vtk::UnstructuredGrid g;
  g.points = mesh.nodes();
  g.cell_type = vtk::CellType::Tetra;
  for (const ElementGeometry& el : ctx.elements()) g.cells.emplace_back(el.nodes.begin(), el.nodes.end());
  vtk::ScalarField rho{"density", {}}, p{"pressure", {}}, mach{"mach", {}}, status{"ghost", {}};
  vtk::VectorField v{"velocity", {}};
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const bool real = ctx.is_real(static_cast<Index>(i));
    status.values.push_back(real ? 0.0 : 1.0);
    if (real && riemann::is_admissible(state.W[i], ctx.gas())) {
      const PrimitiveState w = riemann::to_primitive(state.W[i], ctx.gas());
      rho.values.push_back(w.rho);
      p.values.push_back(w.p);
      v.values.push_back(w.v);
      mach.values.push_back(w.v.norm() / ctx.gas().sound_speed(w.rho, w.p));
    } else {
      rho.values.push_back(0.0);
      p.values.push_back(0.0);
      v.values.push_back(Vec3::Zero());
      mach.values.push_back(0.0);
    }
  }
  g.scalars = {rho, p, mach, status};
  g.vectors = {v};
  return g;
}

std::size_t reinitialize_uncovered(const FluidContext& ctx, FluidState& state,
                                   const std::vector<surface::NodeStatus>& previous) {
  const auto& mesh = ctx.mesh();
  const auto was_real = [&](Index n) { return previous.empty() || previous[n] == surface::NodeStatus::Real; };
  std::vector<Index> pending;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const auto n = static_cast<Index>(i);
    if (ctx.is_real(n) && !was_real(n)) pending.push_back(n);
  }
  if (pending.empty()) return 0;
  std::vector<char> valid(mesh.num_nodes(), 0);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    valid[i] = ctx.is_real(static_cast<Index>(i)) && was_real(static_cast<Index>(i)) ? 1 : 0;
  }
  const std::size_t count = pending.size();
  // Sweep outward so nodes deep in a formerly covered region still find data.
  while (!pending.empty()) {
    std::vector<Index> next;
    std::vector<std::pair<Index, Conservative>> updates;
    for (Index n : pending) {
      Conservative sum = Conservative::Zero();
      int k = 0;
      for (Index e : mesh.node_edges(n)) {
        const auto& ed = mesh.edges()[e];
        const Index m = ed.a == n ? ed.b : ed.a;
        if (valid[m] && !ctx.edge_cut(e)) {
          sum += state.W[m];
          ++k;
        }
      }
      if (k > 0) {
        updates.emplace_back(n, sum / k);
      } else {
        next.push_back(n);
      }
    }
    if (updates.empty()) {
      for (Index n : next) state.W[n] = riemann::to_conservative(ctx.farfield(), ctx.gas());
      logger()->info("{} uncovered nodes without real neighbours reset to the farfield state", next.size());
      break;
    }
    for (const auto& [n, w] : updates) {
      state.W[n] = w;
      valid[n] = 1;
    }
    pending = std::move(next);
  }
  logger()->info("re-initialized {} nodes uncovered by the moving surface", count);
  return count;
}

}  // namespace cablefsi::fluid
