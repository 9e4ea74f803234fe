#include "cablefsi/driver/audit.hpp"

#include "cablefsi/driver/simulation.hpp"
#include "cablefsi/geometry/dual.hpp"
#include "cablefsi/rotation.hpp"

#include <random>

namespace cablefsi::driver {

namespace {

AuditResult result(std::string name, double value, double tol) { return {std::move(name), value <= tol, value, tol}; }

// Total facet area bounding each dual cell.
std::vector<double> cell_area(const geometry::Mesh& mesh, const geometry::DualGeometry& dual) {
  std::vector<double> area(mesh.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    area[mesh.edges()[e].a] += dual.facet[e].norm();
    area[mesh.edges()[e].b] += dual.facet[e].norm();
  }
  for (const auto& b : dual.boundary) area[b.node] += b.area.norm();
  return area;
}

double dual_closure(const geometry::Mesh& mesh, const geometry::DualGeometry& dual) {
  std::vector<Vec3> sum = dual.boundary_closure;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    sum[mesh.edges()[e].a] += dual.facet[e];
    sum[mesh.edges()[e].b] -= dual.facet[e];
  }
  const auto area = cell_area(mesh, dual);
  double worst = 0.0;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) worst = std::max(worst, sum[i].norm() / area[i]);
  return worst;
}

}  // namespace

std::vector<AuditResult> run_audit(const RunConfig& config, std::uint64_t seed, int trials) {
  std::vector<AuditResult> out;
  RunConfig cfg = config;
  cfg.amr.initial_cycles = std::min(cfg.amr.initial_cycles, 2);
  Simulation sim(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto rand3 = [&] { return Vec3(u(rng), u(rng), u(rng)); };

  out.push_back(result("dual_closure", dual_closure(sim.mesh(), sim.fluid().dual()), 1e-12));

  const auto& surf = sim.surface();
  double area = 0.0;
  for (double a : surf.areas()) area += a;
  out.push_back(result("surface_closed", surf.is_closed() ? surf.area_vector_sum().norm() / area : 1.0, 1e-12));

  // Virtual work and load balance for random slave forces and virtual motions.
  const auto& cable = sim.cable();
  const auto& pairing = sim.pairing();
  double work = 0.0, balance = 0.0;
  for (int t = 0; t < trials; ++t) {
    structure::CableState state = structure::CableState::zero(cable.num_nodes());
    for (std::size_t n = 0; n < cable.num_nodes(); ++n) state.theta[n] = 0.3 * rand3();
    std::vector<Vec3> f(surf.num_nodes());
    for (Vec3& v : f) v = rand3();
    std::vector<Vec3> du(cable.num_nodes()), dth(cable.num_nodes());
    for (std::size_t n = 0; n < cable.num_nodes(); ++n) {
      du[n] = rand3();
      dth[n] = rand3();
    }
    const auto w = coupling::virtual_work_check(f, pairing, cable, state, du, dth);
    work = std::max(work, std::abs(w.fluid - w.structure) / std::abs(w.fluid));
    const auto a = coupling::audit_transfer(f, pairing, cable, state);
    double scale = 0.0;
    for (const Vec3& v : f) scale += v.norm();
    balance = std::max(balance, (a.slave_force_sum - a.nodal_force_sum).norm() / scale);
  }
  out.push_back(result("transfer_virtual_work", work, 1e-12));
  out.push_back(result("transfer_load_balance", balance, 1e-13));

  // Rigid motions of the whole cable move every slave rigidly.
  double rigid = 0.0;
  const double size = (config.cable.end - config.cable.start).norm() + config.cable.diameter;
  for (int t = 0; t < trials; ++t) {
    const Vec3 c = 0.5 * size * rand3();
    const Vec3 phi = 2.0 * rand3();
    const Mat3 r = rotation::rotation_matrix(phi);
    const Vec3 origin = cable.nodes.front();
    structure::CableState state = structure::CableState::zero(cable.num_nodes());
    for (std::size_t n = 0; n < cable.num_nodes(); ++n) {
      state.u[n] = c + (r - Mat3::Identity()) * (cable.nodes[n] - origin);
      state.theta[n] = phi;
    }
    const auto m = coupling::slave_motion(pairing, cable, state);
    for (std::size_t s = 0; s < surf.num_nodes(); ++s) {
      const Vec3 exact = c + (r - Mat3::Identity()) * (surf.reference()[s] - origin);
      rigid = std::max(rigid, (m.displacement[s] - exact).norm() / size);
    }
  }
  out.push_back(result("rigid_kinematics", rigid, 1e-13));

  // Uniform farfield without the surface.
  {
    fluid::FluidContext ctx(sim.mesh(), cfg.gas, cfg.farfield_state(), cfg.fluid);
    const auto s = fluid::uniform_state(sim.mesh().num_nodes(), cfg.farfield_state(), cfg.gas);
    const auto r = fluid::convective_residual(ctx, s, fluid::compute_gradients(ctx, s));
    const double scale = riemann::physical_flux(s.W[0], Vec3::UnitX(), cfg.gas).norm();
    const auto area = cell_area(sim.mesh(), ctx.dual());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, r[i].norm() / (scale * area[i]));
    out.push_back(result("free_stream_residual", worst, 1e-12));
  }

  // Every change of fluid mass is accounted for by fluxes or status changes.
  {
    RunConfig steady = cfg;
    steady.coupling.steady_steps = 3;
    steady.amr.period = 0;
    steady.output.audit = false;
    Simulation s(steady);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(s.advance().mass_residual));
    out.push_back(result("mass_ledger", worst, 1e-12));
  }
  return out;
}

}  // namespace cablefsi::driver
