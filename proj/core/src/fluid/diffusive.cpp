#include "cablefsi/fluid/fluid.hpp"

#include "cablefsi/log.hpp"

#include <algorithm>
#include <sstream>

namespace cablefsi::fluid {

namespace {

struct NodalVT {
  Vec3 v = Vec3::Zero();
  double t = 0.0;
};

// Velocity and temperature at real nodes.
std::vector<NodalVT> nodal_vt(const FluidContext& ctx, const FluidState& state) {
  std::vector<NodalVT> out(state.W.size());
  for (std::size_t i = 0; i < state.W.size(); ++i) {
    if (!ctx.is_real(static_cast<Index>(i))) continue;
    const PrimitiveState w = riemann::to_primitive(state.W[i], ctx.gas());
    const double t = ctx.gas().temperature(w.rho, w.p);
    if (!(t > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive temperature " << t << " at node " << i;
      throw StateError(msg.str());
    }
    out[i] = {w.v, t};
  }
  return out;
}

}  // namespace

std::vector<Index> GhostPopulation::entries_of_node(Index node) const {
  std::vector<Index> ids;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].node == node) ids.push_back(static_cast<Index>(k));
  }
  return ids;
}

GhostPopulation populate_ghosts_local(const FluidContext& ctx, const FluidState& state) {
  GhostPopulation pop;
  if (!ctx.has_surface()) return pop;
  const auto& mesh = ctx.mesh();
  const auto& x = mesh.nodes();
  const auto vt = nodal_vt(ctx, state);
  const bool isothermal = ctx.options().isothermal_wall;
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto& nodes = mesh.tets()[t].v;
    if (std::all_of(nodes.begin(), nodes.end(), [&](Index n) { return ctx.is_real(n); })) continue;
    std::vector<Index> real, ghost;
    for (Index n : nodes) (ctx.is_real(n) ? real : ghost).push_back(n);
    if (ghost.empty()) continue;
    if (real.empty()) {
      ++pop.skipped_cells;
      continue;
    }
    std::array<Index, 4> slots{-1, -1, -1, -1};

    // Linear extrapolation needs three real nodes spanning a plane.
    bool linear = false;
    Eigen::Matrix<double, 2, 3> e;
    if (real.size() == 3) {
      e.row(0) = (x[real[1]] - x[real[0]]).transpose();
      e.row(1) = (x[real[2]] - x[real[0]]).transpose();
      const double cross = e.row(0).transpose().cross(e.row(1).transpose()).norm();
      linear = cross > 1e-12 * e.row(0).norm() * e.row(1).norm();
    }
    Eigen::Matrix<double, 3, 2> pinv;
    if (linear) pinv = e.transpose() * (e * e.transpose()).inverse();

    for (Index g : ghost) {
      GhostEntry entry;
      entry.node = g;
      entry.tet = static_cast<Index>(t);
      entry.sources = real;
      entry.linear = linear;
      if (linear) {
        // Minimum-norm in-plane gradient through the three real values.
        const Vec3 dx = x[g] - x[real[0]];
        const Vec3 tw = pinv * Eigen::Vector2d(vt[real[1]].t - vt[real[0]].t, vt[real[2]].t - vt[real[0]].t);
        entry.temperature = vt[real[0]].t + tw.dot(dx);
        for (int c = 0; c < 3; ++c) {
          const Vec3 gv =
              pinv * Eigen::Vector2d(vt[real[1]].v[c] - vt[real[0]].v[c], vt[real[2]].v[c] - vt[real[0]].v[c]);
          entry.velocity[c] = vt[real[0]].v[c] + gv.dot(dx);
        }
      } else {
        for (Index s : real) {
          entry.velocity += vt[s].v;
          entry.temperature += vt[s].t;
        }
        entry.velocity /= static_cast<double>(real.size());
        entry.temperature /= static_cast<double>(real.size());
      }
      if (isothermal) entry.temperature = ctx.options().wall_temperature;
      // Extrapolation may overshoot below zero; keep the cell usable.
      if (!(entry.temperature > 0.0)) {
        double lo = vt[real[0]].t;
        for (Index s : real) lo = std::min(lo, vt[s].t);
        entry.temperature = lo;
      }
      const auto local = std::find(nodes.begin(), nodes.end(), g) - nodes.begin();
      slots[local] = static_cast<Index>(pop.entries.size());
      pop.entries.push_back(std::move(entry));
    }
    pop.by_tet.emplace(static_cast<Index>(t), slots);
  }
  if (pop.skipped_cells > 0) logger()->debug("{} fully occluded cells skipped in ghost population", pop.skipped_cells);
  return pop;
}

std::vector<Conservative> diffusive_residual(const FluidContext& ctx, const FluidState& state,
                                             const GhostPopulation& ghosts) {
  const auto& mesh = ctx.mesh();
  const auto& gas = ctx.gas();
  std::vector<Conservative> g(mesh.num_nodes(), Conservative::Zero());
  const auto vt = nodal_vt(ctx, state);
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const ElementGeometry& el = ctx.elements()[t];
    std::array<NodalVT, 4> local;
    bool any_real = false;
    bool usable = true;
    auto slots = ghosts.by_tet.end();
    for (int k = 0; k < 4; ++k) {
      const Index n = el.nodes[k];
      if (ctx.is_real(n)) {
        local[k] = vt[n];
        any_real = true;
        continue;
      }
      if (slots == ghosts.by_tet.end()) slots = ghosts.by_tet.find(static_cast<Index>(t));
      if (slots == ghosts.by_tet.end()) {
        usable = false;
        break;
      }
      // by_tet is keyed by the tet's bisection-order vertices.
      const auto& v = mesh.tets()[t].v;
      const auto pos = std::find(v.begin(), v.end(), n) - v.begin();
      const Index id = slots->second[pos];
      if (id < 0) {
        usable = false;
        break;
      }
      local[k] = {ghosts.entries[id].velocity, ghosts.entries[id].temperature};
    }
    if (!any_real || !usable) continue;

    Mat3 lgrad = Mat3::Zero();  // lgrad(a, b) = d v_a / d x_b
    Vec3 tgrad = Vec3::Zero();
    Vec3 vbar = Vec3::Zero();
    double tbar = 0.0;
    for (int k = 0; k < 4; ++k) {
      lgrad += local[k].v * el.grad_phi[k].transpose();
      tgrad += local[k].t * el.grad_phi[k];
      vbar += 0.25 * local[k].v;
      tbar += 0.25 * local[k].t;
    }
    const double mu = gas.viscosity(tbar);
    const double kappa = gas.conductivity(tbar);
    const Mat3 tau = mu * (lgrad + lgrad.transpose() - (2.0 / 3.0) * lgrad.trace() * Mat3::Identity());
    const Vec3 energy_flux = tau * vbar + kappa * tgrad;
    for (int k = 0; k < 4; ++k) {
      const Index n = el.nodes[k];
      if (!ctx.is_real(n)) continue;
      g[n].segment<3>(1) -= el.volume * tau * el.grad_phi[k];
      g[n][4] -= el.volume * energy_flux.dot(el.grad_phi[k]);
    }
  }
  return g;
}

}  // namespace cablefsi::fluid
