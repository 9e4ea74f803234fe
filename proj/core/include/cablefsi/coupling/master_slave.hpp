#pragma once

#include "cablefsi/common.hpp"
#include "cablefsi/structure/cable.hpp"
#include "cablefsi/surface/embedded_surface.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace cablefsi::coupling {

/// Master point M_i of one surface section.
struct MasterPoint {
  Index element = 0;
  double s = 0.0;           // parametric coordinate in the element
  Vec3 reference = Vec3::Zero();
};

struct SlaveRecord {
  Index section = 0;
  Vec3 offset = Vec3::Zero();  // d = x0_S - x0_M, constant after pairing
};

/// Immutable association of surface nodes to points of the cable centerline.
struct Pairing {
  std::vector<MasterPoint> masters;               // per section
  std::vector<SlaveRecord> slaves;                // per surface node
  std::vector<std::vector<Index>> section_nodes;  // slave ids per section

  [[nodiscard]] std::size_t num_sections() const { return masters.size(); }
  [[nodiscard]] std::size_t num_slaves() const { return slaves.size(); }
};

/// M_i is the point of the centerline closest to the centroid of section i
/// (reference configuration); equidistant elements resolve to the lower id.
Pairing pair_slaves(const surface::EmbeddedSurface& surface, const structure::CableModel& cable);

/// Kinematics of every master point, interpolated from the cable state.
std::vector<structure::PointKinematics> master_kinematics(const Pairing& pairing,
                                                          const structure::CableModel& cable,
                                                          const structure::CableState& state);

struct SlaveMotion {
  std::vector<Vec3> displacement;
  std::vector<Vec3> velocity;
};

/// u_S = u_M + R(theta_M) d - d,  du_S/dt = du_M/dt + omega_M x R(theta_M) d.
SlaveMotion slave_motion(const Pairing& pairing, const structure::CableModel& cable,
                         const structure::CableState& state);

/// Computes slave_motion and writes it into the surface.
void update_surface_motion(const Pairing& pairing, const structure::CableModel& cable,
                           const structure::CableState& state, surface::EmbeddedSurface& surface);

struct MasterLoads {
  std::vector<Vec3> force;   // per section
  std::vector<Vec3> moment;  // per section, about M_i
};

/// f_M = sum_j f_S,  m_M = sum_j R(theta_M) d x f_S.
MasterLoads aggregate_loads(std::span<const Vec3> slave_forces, const Pairing& pairing,
                            const structure::CableModel& cable, const structure::CableState& state);

/// Generalized nodal loads (force, moment per node) with linear shape
/// functions evaluated at each M_i.
structure::DofVector distribute_loads(const MasterLoads& loads, const Pairing& pairing,
                                      const structure::CableModel& cable);

struct VirtualWork {
  double fluid = 0.0;      // sum over slaves of f_S . du_S
  double structure = 0.0;  // sum over FE nodes of f_N . du_N + m_N . dtheta_N
};

/// Both sides of the transfer's virtual-work identity for a virtual nodal
/// motion (du_N, dtheta_N).
VirtualWork virtual_work_check(std::span<const Vec3> slave_forces, const Pairing& pairing,
                               const structure::CableModel& cable, const structure::CableState& state,
                               std::span<const Vec3> du, std::span<const Vec3> dtheta);

/// Per-step transfer audit: totals on both sides and the virtual-work
/// mismatch for a fixed, deterministic virtual motion.
struct TransferAudit {
  Vec3 slave_force_sum = Vec3::Zero();
  Vec3 nodal_force_sum = Vec3::Zero();
  double work_mismatch = 0.0;  // |dW_F - dW_S| / max(|dW_F|, tiny)
};

TransferAudit audit_transfer(std::span<const Vec3> slave_forces, const Pairing& pairing,
                             const structure::CableModel& cable, const structure::CableState& state);

void write_audit_header(std::ostream& out);
void write_audit_row(std::ostream& out, double time, const TransferAudit& audit);

}  // namespace cablefsi::coupling
