#pragma once

#include "cablefsi/common.hpp"

namespace cablefsi::riemann {

/// Calorically perfect gas with Sutherland viscosity mu(T) = mu0 T^1.5 / (T + T0).
struct GasModel {
  double gamma = 1.4;
  double gas_constant = 287.05;  // J/(kg K)
  double mu0 = 1.458e-6;         // kg/(m s K^0.5)
  double sutherland_t0 = 110.6;  // K
  double prandtl = 0.72;

  [[nodiscard]] double sound_speed(double rho, double p) const;
  [[nodiscard]] double temperature(double rho, double p) const { return p / (rho * gas_constant); }
  [[nodiscard]] double viscosity(double temperature) const;
  [[nodiscard]] double cp() const { return gamma * gas_constant / (gamma - 1.0); }
  /// Thermal conductivity from the constant Prandtl number.
  [[nodiscard]] double conductivity(double temperature) const { return viscosity(temperature) * cp() / prandtl; }
  void validate() const;
};

struct PrimitiveState {
  double rho = 1.0;
  Vec3 v = Vec3::Zero();
  double p = 1.0;
};

/// (rho, rho v, E) with E the total energy per unit volume.
using Conservative = Eigen::Matrix<double, 5, 1>;

Conservative to_conservative(const PrimitiveState& w, const GasModel& gas);
/// Throws StateError for non-positive density or pressure.
PrimitiveState to_primitive(const Conservative& u, const GasModel& gas);
bool is_admissible(const Conservative& u, const GasModel& gas);

/// Physical flux F(U) . nu (nu need not be unit length).
Conservative physical_flux(const Conservative& u, const Vec3& nu, const GasModel& gas);

struct HalfRiemannSolution {
  double rho = 0.0;
  double p = 0.0;
};

/// Fluid state (rho, vn, p) next to a wall moving with normal velocity
/// wall_vn, both measured along the normal pointing from the wall into the
/// fluid. The interface velocity equals wall_vn. Compression (wall_vn > vn)
/// produces a shock, expansion a rarefaction; both branches are closed form.
HalfRiemannSolution solve_half_riemann(double rho, double vn, double p, double wall_vn, const GasModel& gas);

/// One-dimensional state for the full Riemann problem.
struct State1D {
  double rho = 1.0;
  double u = 0.0;
  double p = 1.0;
};

struct StarRegion {
  double p = 0.0;
  double u = 0.0;
  double rho_left = 0.0;
  double rho_right = 0.0;
  int iterations = 0;
};

/// Exact solver: Newton on the pressure function, relative tolerance 1e-12.
StarRegion solve_riemann(const State1D& left, const State1D& right, const GasModel& gas);

/// Self-similar solution on the ray x/t = xi.
State1D sample_riemann(const State1D& left, const State1D& right, const StarRegion& star, double xi,
                       const GasModel& gas);

/// Roe flux through a face with unit normal nu, Harten entropy fix on the
/// acoustic waves with width 0.05 (|v.nu| + c) of the Roe state.
Conservative roe_flux(const Conservative& ul, const Conservative& ur, const Vec3& nu, const GasModel& gas);

}  // namespace cablefsi::riemann
