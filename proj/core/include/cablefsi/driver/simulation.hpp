#pragma once

#include "cablefsi/coupling/master_slave.hpp"
#include "cablefsi/driver/config.hpp"
#include "cablefsi/fluid/fluid.hpp"
#include "cablefsi/fluid/traction.hpp"
#include "cablefsi/structure/cable.hpp"
#include "cablefsi/surface/embedded_surface.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

namespace cablefsi::driver {

struct HistoryRow {
  int step = 0;  // coupling steps completed
  double time = 0.0;
  int phase = 1;  // 1: flow about the frozen structure, 2: coupled
  Vec3 force = Vec3::Zero();
  double drag = 0.0;  // force along the farfield direction
  double lift = 0.0;  // magnitude of the transverse force
  std::vector<Vec3> probe_displacement;
  double fluid_mass = 0.0;
  double mass_residual = 0.0;  // relative mass audit, see MassLedger
  double interface_mass_flux = 0.0;
  double boundary_mass_flux = 0.0;
  coupling::TransferAudit transfer;
  std::size_t nodes = 0;
  std::size_t tets = 0;
  std::size_t ghost_nodes = 0;
  int subcycles = 0;
  int halvings = 0;
};

struct RunHistory {
  std::vector<int> probe_nodes;
  std::vector<HistoryRow> rows;
};

void write_history_header(std::ostream& out, const std::vector<int>& probe_nodes);
void write_history_row(std::ostream& out, const HistoryRow& row);

/// Running account of the fluid mass. Every change is attributed to fluxes
/// or to node status changes, so that
///   M - initial + boundary + interface - status - amr = 0
/// up to roundoff.
struct MassLedger {
  double initial = 0.0;
  double boundary = 0.0;   // left through the mesh boundary
  double interface = 0.0;  // left through the embedded surface
  double status = 0.0;     // gained when nodes are covered or uncovered
  double amr = 0.0;        // gained by state transfer in refinement

  [[nodiscard]] double residual(double mass) const {
    return (mass - initial + boundary + interface - status - amr) / initial;
  }
};

struct AmrReport {
  std::size_t marked_edges = 0;
  std::size_t new_nodes = 0;
  bool skipped = false;  // node budget exceeded
  double mass_change = 0.0;
};

/// Loads of the last coupling step.
struct StepLoads {
  std::vector<fluid::TractionSample> samples;
  std::vector<Vec3> slave_forces;
  structure::DofVector nodal_loads;  // after the zero-load hook
  coupling::TransferAudit audit;
};

/// The complete state bundle of a run: mesh, flow, cable, surface, pairing.
class Simulation {
 public:
  /// Fresh start: builds mesh, cable and surface, applies the initial AMR
  /// cycles and initializes the flow to the (perturbed) farfield.
  explicit Simulation(RunConfig config);

  /// Restores a checkpoint written by save_checkpoint under a compatible config.
  static Simulation from_checkpoint(RunConfig config, const std::filesystem::path& path);

  Simulation(Simulation&&) noexcept = default;
  Simulation& operator=(Simulation&&) noexcept = default;

  /// One coupling step: fluid subcycles, loads, structure, surface update,
  /// then an AMR cycle when the cadence calls for one.
  HistoryRow advance();

  /// One mark/refine/transfer cycle.
  AmrReport adapt();

  void save_checkpoint(const std::filesystem::path& path) const;

  [[nodiscard]] const RunConfig& config() const { return config_; }
  [[nodiscard]] const geometry::Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const fluid::FluidContext& fluid() const { return *ctx_; }
  [[nodiscard]] const fluid::FluidState& flow() const { return flow_; }
  [[nodiscard]] const structure::CableModel& cable() const { return cable_; }
  [[nodiscard]] const structure::CableState& cable_state() const { return cable_state_; }
  [[nodiscard]] const surface::EmbeddedSurface& surface() const { return *surface_; }
  [[nodiscard]] const coupling::Pairing& pairing() const { return pairing_; }
  [[nodiscard]] const MassLedger& mass() const { return mass_; }
  [[nodiscard]] const RunHistory& history() const { return history_; }
  [[nodiscard]] const StepLoads& last_loads() const { return loads_; }
  [[nodiscard]] int step() const { return step_; }
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] bool coupled() const { return step_ >= config_.coupling.steady_steps; }
  [[nodiscard]] std::size_t ghost_count() const;

  /// Values needed to roll back a failed step.
  struct Snapshot {
    fluid::FluidState flow;
    structure::CableState cable_state;
    int step = 0;
    double time = 0.0;
    MassLedger mass;
    std::size_t history_rows = 0;
  };
  [[nodiscard]] Snapshot snapshot() const;
  void restore(const Snapshot& snap);

 private:
  Simulation() = default;
  void build_structure();
  void rebuild_fluid(std::unique_ptr<geometry::Mesh> mesh);
  void refresh_surface();
  void compute_loads();
  [[nodiscard]] HistoryRow make_row(int subcycles, int halvings) const;

  RunConfig config_;
  std::unique_ptr<geometry::Mesh> mesh_;
  std::unique_ptr<fluid::FluidContext> ctx_;
  fluid::FluidState flow_;
  structure::CableModel cable_;
  structure::CableState cable_state_;
  std::unique_ptr<surface::EmbeddedSurface> surface_;
  coupling::Pairing pairing_;
  MassLedger mass_;
  RunHistory history_;
  StepLoads loads_;
  int step_ = 0;
  double time_ = 0.0;
};

struct RunOptions {
  std::filesystem::path restart;  // checkpoint to resume from
  bool write_files = true;
};

/// Runs the configured steady phase and coupled steps, writing history,
/// forces, audit, VTK and checkpoint files at the configured cadence. A failed
/// step writes checkpoint_abort.json with the last valid state and rethrows.
RunHistory run_staggered(const RunConfig& config, const RunOptions& options = {});

}  // namespace cablefsi::driver
