#pragma once

#include "cablefsi/fluid/fluid.hpp"
#include "cablefsi/fluid/traction.hpp"
#include "cablefsi/geometry/amr.hpp"
#include "cablefsi/geometry/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cablefsi::driver {

enum class Support { Free, Pinned, Clamped };
enum class Integrator { CentralDifference, Midpoint };

struct FarfieldConfig {
  double density = 0.0;
  double pressure = 0.0;
  double mach = 0.0;
  Vec3 direction = Vec3::UnitX();  // normalized on load
};

struct MeshConfig {
  std::filesystem::path file;  // empty: structured box
  geometry::Box box;
  std::array<int, 3> resolution{1, 1, 1};
  geometry::BoxSideTags sides = geometry::kAllFarfield;
};

struct CableConfig {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::UnitZ();
  int elements = 1;
  double diameter = 0.0;
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double density = 0.0;
  Support start_support = Support::Pinned;
  Support end_support = Support::Free;
  double rayleigh_alpha = 0.0;
  bool fixed = false;                      // every DOF fixed: rigid surface
  Vec3 initial_velocity = Vec3::Zero();    // ramped linearly from start (0) to end
};

struct SurfaceConfig {
  int sides = 8;
  int sections_per_element = 1;
  bool caps = true;
};

struct CouplingConfig {
  double dt = 0.0;             // coupling step
  int steps = 0;               // coupled steps
  int steady_steps = 0;        // fluid-only steps about the frozen structure first
  Integrator integrator = Integrator::Midpoint;
  int max_subcycles = 100000;  // fluid steps per coupling step
  bool zero_loads = false;     // test hook: structure sees no fluid loads
};

struct AmrConfig {
  geometry::AmrCriteria criteria;
  int initial_cycles = 0;  // before the first step
  int period = 0;          // coupling steps between cycles, 0 = never
  std::size_t node_budget = 200000;
};

struct OutputConfig {
  std::filesystem::path directory = "output";
  int history_every = 1;
  int forces_every = 0;      // 0 = no force CSV
  int vtk_every = 0;         // 0 = no VTK series
  int checkpoint_every = 0;  // 0 = only on abort
  bool audit = true;         // per-step transfer audit CSV
  std::vector<int> probe_nodes;  // cable nodes reported in the history; empty = last node
};

struct RunConfig {
  fluid::GasModel gas;
  bool viscous = true;
  FarfieldConfig farfield;
  fluid::FluidOptions fluid;
  fluid::TractionOptions traction;
  MeshConfig mesh;
  CableConfig cable;
  SurfaceConfig surface;
  CouplingConfig coupling;
  AmrConfig amr;
  OutputConfig output;
  std::uint64_t seed = 0;
  double perturbation = 0.0;  // relative random velocity perturbation of the initial flow

  /// Farfield primitive state from density, pressure, Mach number and direction.
  [[nodiscard]] fluid::PrimitiveState farfield_state() const;

  /// Checks ranges; throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses the YAML key-value format documented in configs/. Unknown
/// keys and missing physics keys are errors naming the key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace cablefsi::driver
