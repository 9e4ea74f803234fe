#include "cablefsi/fluid/fluid.hpp"

#include "cablefsi/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cablefsi::fluid {

namespace {

// Net flux out of each dual cell, F - G.
std::vector<Conservative> residual(const FluidContext& ctx, const FluidState& s, FluxTotals& totals) {
  const auto grad = compute_gradients(ctx, s);
  auto r = convective_residual(ctx, s, grad, &totals);
  if (ctx.options().viscous) {
    const GhostPopulation ghosts = populate_ghosts_local(ctx, s);
    const auto g = diffusive_residual(ctx, s, ghosts);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= g[i];
  }
  return r;
}

bool update(const FluidContext& ctx, const FluidState& base, const std::vector<Conservative>& r, double dt,
            FluidState& out) {
  out.W = base.W;
  for (std::size_t i = 0; i < base.W.size(); ++i) {
    if (!ctx.is_real(static_cast<Index>(i))) continue;
    out.W[i] = base.W[i] - (dt / ctx.dual().volume[i]) * r[i];
    if (!riemann::is_admissible(out.W[i], ctx.gas())) return false;
  }
  return true;
}

}  // namespace

double stable_time_step(const FluidContext& ctx, const FluidState& state) {
  const auto& gas = ctx.gas();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.W.size(); ++i) {
    const auto n = static_cast<Index>(i);
    if (!ctx.is_real(n)) continue;
    const PrimitiveState w = riemann::to_primitive(state.W[i], gas);
    const double h = ctx.node_size(n);
    double speed = w.v.norm() + gas.sound_speed(w.rho, w.p);
    if (ctx.options().viscous) {
      const double mu = gas.viscosity(gas.temperature(w.rho, w.p));
      speed += 2.0 * gas.gamma * mu / (w.rho * gas.prandtl * h);
    }
    dt = std::min(dt, h / speed);
  }
  return ctx.options().cfl * dt;
}

StepReport advance_fluid(const FluidContext& ctx, FluidState& state, double dt) {
  if (!(dt > 0.0)) throw NumericalError("fluid time step must be positive");
  StepReport report;
  FluxTotals t0;
  const auto r0 = residual(ctx, state, t0);
  FluidState stage, next;
  for (int attempt = 0; attempt <= ctx.options().max_step_halvings; ++attempt) {
    if (update(ctx, state, r0, dt, stage)) {
      FluxTotals t1;
      std::vector<Conservative> r1;
      bool ok = true;
      try {
        r1 = residual(ctx, stage, t1);
      } catch (const StateError&) {
        ok = false;
      }
      if (ok && update(ctx, stage, r1, dt, next)) {
        for (std::size_t i = 0; i < state.W.size(); ++i) {
          if (ctx.is_real(static_cast<Index>(i))) state.W[i] = 0.5 * (state.W[i] + next.W[i]);
        }
        state.time += dt;
        report.dt = dt;
        report.halvings = attempt;
        report.flux.boundary = 0.5 * dt * (t0.boundary + t1.boundary);
        report.flux.interface = 0.5 * dt * (t0.interface + t1.interface);
        if (attempt > 0) logger()->info("fluid step accepted after {} halvings, dt = {:.3e}", attempt, dt);
        return report;
      }
    }
    dt *= 0.5;
  }
  throw StateError("fluid positivity could not be restored by halving the time step");
}

}  // namespace cablefsi::fluid
