#pragma once

#include "cablefsi/common.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <span>
#include <vector>

namespace cablefsi::structure {

/// Section and material constants of a (uniform) cable.
struct SectionProperties {
  double EA = 0.0;
  double EIy = 0.0;
  double EIz = 0.0;
  double GJ = 0.0;
  double GAs = 0.0;                 // shear stiffness kappa*G*A
  double mass_per_length = 0.0;     // m_L
  double rotary_inertia_per_length = 0.0;
};

/// Solid circular section of diameter D; shear area equals the section area.
SectionProperties circular_section(double youngs_modulus, double poisson_ratio, double diameter,
                                   double mass_per_length);

/// Per-node fixity, DOF order (ux, uy, uz, thx, thy, thz).
using NodeFixity = std::array<bool, 6>;

inline constexpr NodeFixity kFree = {false, false, false, false, false, false};
inline constexpr NodeFixity kPinned = {true, true, true, false, false, false};
inline constexpr NodeFixity kClamped = {true, true, true, true, true, true};

struct CableModel {
  std::vector<Vec3> nodes;                       // reference positions
  std::vector<std::array<Index, 2>> elements;
  SectionProperties section;
  std::vector<NodeFixity> fixity;
  std::vector<double> lengths;                   // reference element lengths
  std::vector<Mat3> frames;                      // reference element frames (e1 = axis)
  std::vector<double> nodal_mass;                // lumped translational mass
  std::vector<double> nodal_inertia;             // lumped isotropic rotary inertia
  double rayleigh_alpha = 0.0;                   // mass-proportional damping
  double critical_time_step = 0.0;               // 2 / omega_max

  [[nodiscard]] std::size_t num_nodes() const { return nodes.size(); }
  [[nodiscard]] std::size_t num_elements() const { return elements.size(); }
  [[nodiscard]] Index num_dofs() const { return static_cast<Index>(6 * nodes.size()); }
  [[nodiscard]] bool is_fixed(Index dof) const { return fixity[dof / 6][dof % 6]; }
};

/// Builds the element chain N_0 - N_1 - ... along the polyline, reference
/// frames, lumped masses and the explicit stability estimate.
CableModel make_cable_model(std::vector<Vec3> nodes, const SectionProperties& section,
                            std::vector<NodeFixity> fixity, double rayleigh_alpha = 0.0);

/// Straight cable of `elements` equal elements from a to b.
CableModel make_straight_cable(const Vec3& a, const Vec3& b, int elements,
                               const SectionProperties& section, const NodeFixity& first,
                               const NodeFixity& last, double rayleigh_alpha = 0.0);

struct CableState {
  std::vector<Vec3> u;
  std::vector<Vec3> theta;
  std::vector<Vec3> velocity;
  std::vector<Vec3> omega;
  double time = 0.0;

  static CableState zero(std::size_t nodes);
  [[nodiscard]] std::size_t num_nodes() const { return u.size(); }
};

/// Generalized nodal vector, node-major (force xyz, moment xyz).
using DofVector = Eigen::VectorXd;

/// Corotational internal forces. Moments are conjugate to spatial spins.
DofVector assemble_internal_forces(const CableModel& model, const CableState& state);

/// Linear Timoshenko stiffness about the reference configuration.
Eigen::SparseMatrix<double> linear_stiffness(const CableModel& model);

/// Finite-difference tangent of assemble_internal_forces (spin perturbations
/// for rotational DOFs).
Eigen::SparseMatrix<double> tangent_stiffness(const CableModel& model, const CableState& state);

/// Lumped mass diagonal.
DofVector mass_diagonal(const CableModel& model);

/// Kinetic energy, and strain energy of the corotated elements.
double kinetic_energy(const CableModel& model, const CableState& state);
double strain_energy(const CableModel& model, const CableState& state);
Vec3 linear_momentum(const CableModel& model, const CableState& state);

/// Explicit central difference (velocity form) with lumped mass.
CableState step_central_difference(const CableModel& model, const CableState& state,
                                   const DofVector& f_ext, double dt);

struct NewtonOptions {
  int max_iterations = 25;
  double tolerance = 1e-10;  // relative residual
};

/// Implicit midpoint rule solved by Newton on the end-of-step velocities.
CableState step_midpoint(const CableModel& model, const CableState& state, const DofVector& f_ext,
                         double dt, const NewtonOptions& options = {});

struct PointKinematics {
  Vec3 u;
  Vec3 theta;
  Vec3 velocity;
  Vec3 omega;
};

/// Linear interpolation of all nodal fields inside an element.
PointKinematics interpolate_at_point(const CableModel& model, const CableState& state,
                                     Index element, double s);

/// Lowest `count` natural frequencies (Hz) of the linearized free DOFs.
std::vector<double> natural_frequencies(const CableModel& model, int count);

/// Zeroes entries of fixed DOFs.
void apply_fixity(const CableModel& model, CableState& state);

}  // namespace cablefsi::structure
