#include "cablefsi/driver/simulation.hpp"

#include "cablefsi/geometry/amr.hpp"
#include "cablefsi/geometry/mesh_io.hpp"
#include "cablefsi/geometry/refine.hpp"
#include "cablefsi/log.hpp"
#include "cablefsi/surface/intersect.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace cablefsi::driver {

namespace {

structure::NodeFixity fixity_of(Support s) {
  switch (s) {
    case Support::Free:
      return structure::kFree;
    case Support::Pinned:
      return structure::kPinned;
    case Support::Clamped:
      return structure::kClamped;
  }
  return structure::kFree;
}

void put_vec(std::ostream& out, const Vec3& v) { out << ',' << v.x() << ',' << v.y() << ',' << v.z(); }

}  // namespace

void write_history_header(std::ostream& out, const std::vector<int>& probes) {
  out << "step,time,phase,force_x,force_y,force_z,drag,lift";
  for (int p : probes) out << ",u" << p << "_x,u" << p << "_y,u" << p << "_z";
  out << ",fluid_mass,mass_residual,interface_mass_flux,boundary_mass_flux"
         ",sum_fS_x,sum_fS_y,sum_fS_z,sum_fN_x,sum_fN_y,sum_fN_z,work_mismatch"
         ",nodes,tets,ghost_nodes,subcycles,halvings\n";
}

void write_history_row(std::ostream& out, const HistoryRow& r) {
  const auto old = out.precision(17);
  out << r.step << ',' << r.time << ',' << r.phase;
  put_vec(out, r.force);
  out << ',' << r.drag << ',' << r.lift;
  for (const Vec3& u : r.probe_displacement) put_vec(out, u);
  out << ',' << r.fluid_mass << ',' << r.mass_residual << ',' << r.interface_mass_flux << ','
      << r.boundary_mass_flux;
  put_vec(out, r.transfer.slave_force_sum);
  put_vec(out, r.transfer.nodal_force_sum);
  out << ',' << r.transfer.work_mismatch << ',' << r.nodes << ',' << r.tets << ',' << r.ghost_nodes << ','
      << r.subcycles << ',' << r.halvings << '\n';
  out.precision(old);
}

Simulation::Simulation(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  auto mesh = std::make_unique<geometry::Mesh>(
      config_.mesh.file.empty()
          ? geometry::build_box_mesh(config_.mesh.box, config_.mesh.resolution, config_.mesh.sides)
          : geometry::read_mesh(config_.mesh.file));
  build_structure();
  rebuild_fluid(std::move(mesh));

  const fluid::PrimitiveState w = config_.farfield_state();
  flow_ = fluid::uniform_state(mesh_->num_nodes(), w, config_.gas);
  if (config_.perturbation > 0.0) {
    std::mt19937_64 rng(config_.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double scale = config_.perturbation * std::max(w.v.norm(), config_.gas.sound_speed(w.rho, w.p));
    for (auto& W : flow_.W) {
      const Vec3 dv = scale * Vec3(u(rng), u(rng), u(rng));
      W = riemann::to_conservative({w.rho, w.v + dv, w.p}, config_.gas);
    }
  }
  for (int k = 0; k < config_.amr.initial_cycles; ++k) {
    const AmrReport r = adapt();
    if (r.marked_edges == 0 || r.skipped) break;
  }
  mass_ = MassLedger{};
  mass_.initial = fluid::total_conserved(*ctx_, flow_)[0];
  if (config_.output.probe_nodes.empty()) {
    history_.probe_nodes = {static_cast<int>(cable_.num_nodes()) - 1};
  } else {
    history_.probe_nodes = config_.output.probe_nodes;
  }
  compute_loads();
}

void Simulation::build_structure() {
  const CableConfig& c = config_.cable;
  const double area = std::numbers::pi * c.diameter * c.diameter / 4.0;
  const auto section =
      structure::circular_section(c.youngs_modulus, c.poisson_ratio, c.diameter, c.density * area);
  cable_ = structure::make_straight_cable(c.start, c.end, c.elements, section,
                                          c.fixed ? structure::kClamped : fixity_of(c.start_support),
                                          c.fixed ? structure::kClamped : fixity_of(c.end_support), c.rayleigh_alpha);
  if (c.fixed) cable_.fixity.assign(cable_.num_nodes(), structure::kClamped);
  cable_state_ = structure::CableState::zero(cable_.num_nodes());
  for (std::size_t i = 0; i < cable_.num_nodes(); ++i) {
    cable_state_.velocity[i] = c.initial_velocity * (static_cast<double>(i) / c.elements);
  }
  structure::apply_fixity(cable_, cable_state_);

  const int n = c.elements * config_.surface.sections_per_element;
  std::vector<Vec3> centerline;
  for (int i = 0; i <= n; ++i) centerline.push_back(c.start + (c.end - c.start) * (static_cast<double>(i) / n));
  centerline.back() = c.end;
  surface_ = std::make_unique<surface::EmbeddedSurface>(
      surface::generate_cable_surface(centerline, config_.surface.sides, c.diameter, config_.surface.caps));
  pairing_ = coupling::pair_slaves(*surface_, cable_);
  coupling::update_surface_motion(pairing_, cable_, cable_state_, *surface_);
}

void Simulation::rebuild_fluid(std::unique_ptr<geometry::Mesh> mesh) {
  fluid::FluidOptions opt = config_.fluid;
  opt.viscous = config_.viscous;
  auto ctx = std::make_unique<fluid::FluidContext>(*mesh, config_.gas, config_.farfield_state(), opt);
  ctx->set_surface(surface_.get());
  ctx_ = std::move(ctx);
  mesh_ = std::move(mesh);
}

std::size_t Simulation::ghost_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < mesh_->num_nodes(); ++i) n += ctx_->is_real(static_cast<Index>(i)) ? 0 : 1;
  return n;
}

void Simulation::refresh_surface() {
  const auto previous = ctx_->interface().status;
  coupling::update_surface_motion(pairing_, cable_, cable_state_, *surface_);
  const double before = fluid::total_conserved(*ctx_, flow_)[0];
  ctx_->set_surface(surface_.get());
  const std::size_t uncovered = fluid::reinitialize_uncovered(*ctx_, flow_, previous);
  mass_.status += fluid::total_conserved(*ctx_, flow_)[0] - before;
  if (uncovered > 0) logger()->debug("step {}: {} nodes uncovered", step_, uncovered);
}

void Simulation::compute_loads() {
  const auto grad = fluid::compute_gradients(*ctx_, flow_);
  loads_.samples = fluid::sample_tractions(*ctx_, flow_, grad, *surface_, config_.traction);
  loads_.slave_forces = fluid::integrate_slave_forces(loads_.samples, *surface_);
  const auto master = coupling::aggregate_loads(loads_.slave_forces, pairing_, cable_, cable_state_);
  loads_.nodal_loads = coupling::distribute_loads(master, pairing_, cable_);
  if (config_.output.audit) {
    loads_.audit = coupling::audit_transfer(loads_.slave_forces, pairing_, cable_, cable_state_);
  }
  if (config_.coupling.zero_loads) loads_.nodal_loads.setZero();
}

HistoryRow Simulation::make_row(int subcycles, int halvings) const {
  HistoryRow r;
  r.step = step_;
  r.time = time_;
  r.phase = step_ > config_.coupling.steady_steps ? 2 : 1;
  r.force = fluid::total_force(loads_.samples);
  const Vec3& d = config_.farfield.direction;
  r.drag = r.force.dot(d);
  r.lift = (r.force - r.drag * d).norm();
  for (int p : history_.probe_nodes) r.probe_displacement.push_back(cable_state_.u[p]);
  r.fluid_mass = fluid::total_conserved(*ctx_, flow_)[0];
  r.mass_residual = mass_.residual(r.fluid_mass);
  r.interface_mass_flux = mass_.interface;
  r.boundary_mass_flux = mass_.boundary;
  r.transfer = loads_.audit;
  r.nodes = mesh_->num_nodes();
  r.tets = mesh_->num_tets();
  r.ghost_nodes = ghost_count();
  r.subcycles = subcycles;
  r.halvings = halvings;
  return r;
}

HistoryRow Simulation::advance() {
  const double dt = config_.coupling.dt;
  const bool couple = coupled() && !config_.cable.fixed;

  // Fluid subcycles with the surface frozen at its end-of-previous-step motion.
  double remaining = dt;
  int subcycles = 0, halvings = 0;
  while (remaining > 0.0) {
    if (subcycles >= config_.coupling.max_subcycles) {
      throw NumericalError("fluid needed more than coupling.max_subcycles steps in one coupling step");
    }
    double h = fluid::stable_time_step(*ctx_, flow_);
    // Take the remainder in this step rather than leave a sliver for the next.
    if (h >= remaining || remaining - h < 1e-3 * h) h = remaining;
    const fluid::StepReport rep = fluid::advance_fluid(*ctx_, flow_, h);
    remaining = rep.dt == h && h == remaining ? 0.0 : remaining - rep.dt;
    mass_.boundary += rep.flux.boundary[0];
    mass_.interface += rep.flux.interface[0];
    halvings += rep.halvings;
    ++subcycles;
  }
  time_ += dt;
  flow_.time = time_;

  compute_loads();
  if (couple) {
    const structure::DofVector& f = loads_.nodal_loads;
    if (config_.coupling.integrator == Integrator::Midpoint) {
      cable_state_ = structure::step_midpoint(cable_, cable_state_, f, dt);
    } else {
      const int n = std::max(1, static_cast<int>(std::ceil(dt / (0.9 * cable_.critical_time_step))));
      for (int k = 0; k < n; ++k) cable_state_ = structure::step_central_difference(cable_, cable_state_, f, dt / n);
    }
    cable_state_.time = time_;
    refresh_surface();
  }
  ++step_;

  HistoryRow row = make_row(subcycles, halvings);
  if (config_.amr.period > 0 && step_ % config_.amr.period == 0) {
    const AmrReport r = adapt();
    if (r.new_nodes > 0) {
      compute_loads();
      row.nodes = mesh_->num_nodes();
      row.tets = mesh_->num_tets();
      row.ghost_nodes = ghost_count();
      row.fluid_mass = fluid::total_conserved(*ctx_, flow_)[0];
      row.mass_residual = mass_.residual(row.fluid_mass);
    }
  }
  history_.rows.push_back(row);
  return row;
}

AmrReport Simulation::adapt() {
  AmrReport report;
  const geometry::AmrCriteria& criteria = config_.amr.criteria;
  std::vector<Vec3> speed_grad;
  if (criteria.hessian) speed_grad = fluid::speed_gradients(*ctx_, flow_, fluid::compute_gradients(*ctx_, flow_));
  const surface::SurfaceIndex index(*surface_);
  const auto marked = geometry::mark_for_amr(*mesh_, &ctx_->interface().hits, &index, speed_grad, criteria);
  report.marked_edges = marked.size();
  if (marked.empty()) return report;

  geometry::Refinement ref = geometry::refine_edges(*mesh_, marked);
  if (ref.mesh.num_nodes() > config_.amr.node_budget) {
    logger()->warn("AMR cycle skipped: {} nodes would exceed the budget of {}", ref.mesh.num_nodes(),
                   config_.amr.node_budget);
    report.skipped = true;
    return report;
  }
  report.new_nodes = ref.new_node_parents.size();

  // New nodes between a ghost and anything inherit stale ghost payload; mark
  // them as previously covered so they are re-initialized if now real.
  auto status = ctx_->interface().status;
  if (status.empty()) status.assign(mesh_->num_nodes(), surface::NodeStatus::Real);
  for (const auto& p : ref.new_node_parents) {
    const bool ghost = status[p[0]] == surface::NodeStatus::Ghost || status[p[1]] == surface::NodeStatus::Ghost;
    status.push_back(ghost ? surface::NodeStatus::Ghost : surface::NodeStatus::Real);
  }
  const double before = fluid::total_conserved(*ctx_, flow_)[0];
  geometry::transfer_by_midpoints(flow_.W, ref);
  rebuild_fluid(std::make_unique<geometry::Mesh>(std::move(ref.mesh)));
  fluid::reinitialize_uncovered(*ctx_, flow_, status);
  report.mass_change = fluid::total_conserved(*ctx_, flow_)[0] - before;
  mass_.amr += report.mass_change;
  logger()->info("AMR: {} edges marked, {} new nodes ({} total), transfer mass change {:.3e}", marked.size(),
                 report.new_nodes, mesh_->num_nodes(), report.mass_change);
  return report;
}

Simulation::Snapshot Simulation::snapshot() const {
  return {flow_, cable_state_, step_, time_, mass_, history_.rows.size()};
}

void Simulation::restore(const Snapshot& s) {
  flow_ = s.flow;
  cable_state_ = s.cable_state;
  step_ = s.step;
  time_ = s.time;
  mass_ = s.mass;
  history_.rows.resize(s.history_rows);
  coupling::update_surface_motion(pairing_, cable_, cable_state_, *surface_);
  ctx_->set_surface(surface_.get());
}

}  // namespace cablefsi::driver
