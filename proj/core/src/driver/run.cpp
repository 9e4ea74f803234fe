#include "cablefsi/driver/simulation.hpp"

#include "cablefsi/log.hpp"

#include <spdlog/fmt/fmt.h>

#include <fstream>
#include <optional>

namespace cablefsi::driver {

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_forces(std::ostream& out, const Simulation& sim) {
  const auto old = out.precision(17);
  const auto& f = sim.last_loads().nodal_loads;
  for (std::size_t n = 0; n < sim.cable().num_nodes(); ++n) {
    out << sim.time() << ',' << n;
    for (int k = 0; k < 6; ++k) out << ',' << f[6 * n + k];
    out << '\n';
  }
  out.precision(old);
}

void write_vtk(const std::filesystem::path& dir, const Simulation& sim) {
  vtk::write(dir / fmt::format("fluid_{:06d}.vtk", sim.step()), fluid::to_vtk(sim.fluid(), sim.flow()));
  vtk::write(dir / fmt::format("surface_{:06d}.vtk", sim.step()), sim.surface().to_vtk());
}

}  // namespace

RunHistory run_staggered(const RunConfig& config, const RunOptions& options) {
  Simulation sim = options.restart.empty() ? Simulation(config) : Simulation::from_checkpoint(config, options.restart);
  const OutputConfig& out = config.output;
  const int total = config.coupling.steady_steps + config.coupling.steps;

  std::ofstream history, forces, audit;
  if (options.write_files) {
    std::filesystem::create_directories(out.directory);
    history = open_csv(out.directory / "history.csv");
    write_history_header(history, sim.history().probe_nodes);
    for (const HistoryRow& r : sim.history().rows) {
      if (r.step % out.history_every == 0) write_history_row(history, r);
    }
    if (out.forces_every > 0) {
      forces = open_csv(out.directory / "forces.csv");
      forces << "time,node,f_x,f_y,f_z,m_x,m_y,m_z\n";
    }
    if (out.audit) {
      audit = open_csv(out.directory / "audit.csv");
      coupling::write_audit_header(audit);
    }
    if (out.vtk_every > 0 && sim.step() == 0) write_vtk(out.directory, sim);
  }

  while (sim.step() < total) {
    const Simulation::Snapshot snap = sim.snapshot();
    HistoryRow row;
    try {
      row = sim.advance();
    } catch (const Error& e) {
      logger()->error("step {} failed: {}", snap.step + 1, e.what());
      sim.restore(snap);
      if (options.write_files) {
        const auto path = out.directory / "checkpoint_abort.json";
        sim.save_checkpoint(path);
        logger()->error("last valid state (step {}) saved to {}", sim.step(), path.string());
      }
      throw;
    }
    if (!options.write_files) continue;
    if (row.step % out.history_every == 0) {
      write_history_row(history, row);
      history.flush();
    }
    if (out.audit) coupling::write_audit_row(audit, row.time, row.transfer);
    if (out.forces_every > 0 && row.step % out.forces_every == 0) write_forces(forces, sim);
    if (out.vtk_every > 0 && row.step % out.vtk_every == 0) write_vtk(out.directory, sim);
    if (out.checkpoint_every > 0 && row.step % out.checkpoint_every == 0) {
      sim.save_checkpoint(out.directory / fmt::format("checkpoint_{:06d}.json", row.step));
    }
  }
  return sim.history();
}

}  // namespace cablefsi::driver
