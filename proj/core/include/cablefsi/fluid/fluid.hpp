#pragma once

#include "cablefsi/common.hpp"
#include "cablefsi/geometry/dual.hpp"
#include "cablefsi/geometry/locator.hpp"
#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/riemann/riemann.hpp"
#include "cablefsi/surface/embedded_surface.hpp"
#include "cablefsi/surface/intersect.hpp"
#include "cablefsi/vtk.hpp"

#include <memory>
#include <unordered_map>
#include <vector>

namespace cablefsi::fluid {

using riemann::Conservative;
using riemann::GasModel;
using riemann::PrimitiveState;

/// Primitive gradient rows (rho, vx, vy, vz, p), columns d/dx, d/dy, d/dz.
using Gradient = Eigen::Matrix<double, 5, 3>;
using Primitive5 = Eigen::Matrix<double, 5, 1>;

struct FluidOptions {
  double cfl = 0.5;
  bool second_order = true;         // MUSCL with the Van Albada limiter
  bool viscous = true;
  bool isothermal_wall = false;     // default adiabatic
  double wall_temperature = 288.15;
  double alpha_min = 0.1;           // mixed-cell reconstruction point kept >= alpha_min * |edge| from V_i
  int max_step_halvings = 6;
};

struct FluidState {
  std::vector<Conservative> W;  // per mesh node; ghost entries are frozen payload
  double time = 0.0;
};

FluidState uniform_state(std::size_t nodes, const PrimitiveState& w, const GasModel& gas);

/// Per-tet P1 data in positive orientation.
struct ElementGeometry {
  std::array<Index, 4> nodes{};
  std::array<Vec3, 4> grad_phi{};
  double volume = 0.0;
};

/// Embedded-surface data current for one surface configuration.
struct Interface {
  const surface::EmbeddedSurface* surface = nullptr;
  surface::EdgeIntersections hits;
  std::vector<surface::NodeStatus> status;
};

/// Everything the semi-discretization needs about one mesh. Holds a pointer
/// to the mesh, which must outlive the context.
class FluidContext {
 public:
  FluidContext(const geometry::Mesh& mesh, GasModel gas, PrimitiveState farfield, FluidOptions options = {});

  [[nodiscard]] const geometry::Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const geometry::DualGeometry& dual() const { return dual_; }
  [[nodiscard]] const GasModel& gas() const { return gas_; }
  [[nodiscard]] const PrimitiveState& farfield() const { return farfield_; }
  [[nodiscard]] const FluidOptions& options() const { return options_; }
  FluidOptions& options() { return options_; }
  [[nodiscard]] const std::vector<ElementGeometry>& elements() const { return elements_; }
  [[nodiscard]] const geometry::PointLocator& locator() const { return *locator_; }
  /// Dual-cell size vol_i / sum of its facet areas.
  [[nodiscard]] double node_size(Index node) const { return node_size_[node]; }

  /// Rebuilds intersections and occlusion for the surface in its current
  /// configuration; nullptr removes the surface.
  void set_surface(const surface::EmbeddedSurface* surface);
  [[nodiscard]] const Interface& interface() const { return interface_; }
  [[nodiscard]] bool has_surface() const { return interface_.surface != nullptr; }
  [[nodiscard]] bool is_real(Index node) const {
    return interface_.status.empty() || interface_.status[node] == surface::NodeStatus::Real;
  }
  [[nodiscard]] bool edge_cut(Index edge) const { return !interface_.hits.hits(edge).empty(); }
  /// Inverse of the weighted least-squares normal matrix over the node's
  /// uncut real edges; zero when the stencil is rank deficient or the node is
  /// a ghost.
  [[nodiscard]] const Mat3& lsq_inverse(Index node) const { return lsq_inverse_[node]; }

 private:
  void build_gradient_stencils();

  const geometry::Mesh* mesh_;
  geometry::DualGeometry dual_;
  GasModel gas_;
  PrimitiveState farfield_;
  FluidOptions options_;
  std::vector<ElementGeometry> elements_;
  std::vector<double> node_size_;
  std::vector<Mat3> lsq_inverse_;
  std::unique_ptr<geometry::PointLocator> locator_;
  Interface interface_;
};

/// Primitive vector of each real node (ghost entries left at zero).
std::vector<Primitive5> primitives(const FluidContext& ctx, const FluidState& state);

/// Weighted least squares over real, non-intersected edge neighbours.
std::vector<Gradient> compute_gradients(const FluidContext& ctx, const FluidState& state);

/// Gradient of the velocity magnitude from primitive gradients; zero at ghost
/// nodes and at rest.
std::vector<Vec3> speed_gradients(const FluidContext& ctx, const FluidState& state,
                                  const std::vector<Gradient>& gradients);

/// Van Albada slope average; zero when the slopes disagree in sign.
double van_albada(double a, double b);

/// Flux totals leaving the real fluid, summed over one residual evaluation.
struct FluxTotals {
  Conservative boundary = Conservative::Zero();
  Conservative interface = Conservative::Zero();
};

/// Convective residual F (flux out of each dual cell).
std::vector<Conservative> convective_residual(const FluidContext& ctx, const FluidState& state,
                                              const std::vector<Gradient>& gradients,
                                              FluxTotals* totals = nullptr);

/// Interface state W*_I for the mixed-cell edge from real node i through
/// intersection `hit`, built from the reconstructed primitive state w_I.
Conservative interface_state(const PrimitiveState& w_i, const Vec3& normal_into_fluid, const Vec3& wall_velocity,
                             const GasModel& gas);

/// W_ij = alpha W_i + (1 - alpha) W*_I with the signed alpha that places the
/// value on the line through (x_i, W_i) and (x_I, W*) at the edge midpoint;
/// negative alpha means extrapolation. Returns alpha.
double mixed_cell_alpha(const Vec3& x_i, const Vec3& x_j, const Vec3& x_I, double alpha_min, bool* clamped = nullptr);

/// Steger-Warming split flux through a unit normal: sign > 0 keeps the
/// positive eigenvalues, sign < 0 the negative ones.
Conservative split_flux(const PrimitiveState& w, const Vec3& n, double sign, const GasModel& gas);

/// Local ghost population: one (v, T) pair per (ghost node, mixed tet).
struct GhostEntry {
  Index node = 0;
  Index tet = 0;
  Vec3 velocity = Vec3::Zero();
  double temperature = 0.0;
  std::vector<Index> sources;  // real nodes of the tet used for the entry
  bool linear = false;         // linear rather than constant extrapolation
};

struct GhostPopulation {
  std::vector<GhostEntry> entries;
  std::unordered_map<Index, std::array<Index, 4>> by_tet;  // local vertex -> entry id, -1 for real
  std::size_t skipped_cells = 0;                           // mixed tets without real nodes

  [[nodiscard]] std::vector<Index> entries_of_node(Index node) const;
};

GhostPopulation populate_ghosts_local(const FluidContext& ctx, const FluidState& state);

/// Diffusive residual G from element-wise P1 gradients of v and T.
std::vector<Conservative> diffusive_residual(const FluidContext& ctx, const FluidState& state,
                                             const GhostPopulation& ghosts);

/// Largest stable step for the configured CFL number.
double stable_time_step(const FluidContext& ctx, const FluidState& state);

struct StepReport {
  double dt = 0.0;          // step actually taken
  int halvings = 0;
  FluxTotals flux;          // time-integrated totals over the step
};

/// One SSP-RK2 step of at most dt; halves on positivity failure.
StepReport advance_fluid(const FluidContext& ctx, FluidState& state, double dt);

/// Re-initializes nodes that turned from ghost to real by averaging real
/// neighbours. Returns the number of nodes re-initialized.
std::size_t reinitialize_uncovered(const FluidContext& ctx, FluidState& state,
                                   const std::vector<surface::NodeStatus>& previous);

/// Sum of V_i W_i over real nodes.
Conservative total_conserved(const FluidContext& ctx, const FluidState& state);

vtk::UnstructuredGrid to_vtk(const FluidContext& ctx, const FluidState& state);

}  // namespace cablefsi::fluid
