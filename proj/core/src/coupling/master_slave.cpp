#include "cablefsi/coupling/master_slave.hpp"

#include "cablefsi/log.hpp"
#include "cablefsi/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace cablefsi::coupling {

using structure::CableModel;
using structure::CableState;

namespace {
constexpr double kSnap = 1e-12;
}  // namespace

Pairing pair_slaves(const surface::EmbeddedSurface& surface, const CableModel& cable) {
  if (surface.sections().empty()) throw GeometryError("surface has no cross sections to pair");
  if (cable.num_elements() == 0) throw GeometryError("cable has no elements");
  Pairing p;
  p.section_nodes = surface.sections();
  p.slaves.resize(surface.num_nodes());
  for (std::size_t sec = 0; sec < surface.sections().size(); ++sec) {
    const auto& nodes = surface.sections()[sec];
    if (nodes.size() < 3) throw GeometryError("section " + std::to_string(sec) + " has fewer than 3 slaves");
    Vec3 centroid = Vec3::Zero();
    for (Index v : nodes) centroid += surface.reference()[v];
    centroid /= static_cast<double>(nodes.size());

    double best = std::numeric_limits<double>::infinity();
    MasterPoint master;
    for (std::size_t e = 0; e < cable.num_elements(); ++e) {
      const Vec3& a = cable.nodes[cable.elements[e][0]];
      const Vec3& b = cable.nodes[cable.elements[e][1]];
      const Vec3 ab = b - a;
      double s = std::clamp((centroid - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      // Sections built at a node land on it exactly despite centroid roundoff.
      if (s < kSnap) s = 0.0;
      if (s > 1.0 - kSnap) s = 1.0;
      const Vec3 m = s == 1.0 ? b : a + s * ab;
      const double dist = (centroid - m).norm();
      const double tol = 1e-12 * std::max(cable.lengths[e], dist);
      if (dist < best - tol) {
        best = dist;
        master = {static_cast<Index>(e), s, m};
      } else if (dist <= best + tol) {
        // Ties keep the lower element (visited first).
        logger()->debug("section {}: equidistant to elements {} and {}, keeping {}", sec, master.element, e,
                        master.element);
      }
    }
    p.masters.push_back(master);
    for (Index v : nodes) p.slaves[v] = {static_cast<Index>(sec), surface.reference()[v] - master.reference};
  }
  return p;
}

std::vector<structure::PointKinematics> master_kinematics(const Pairing& pairing, const CableModel& cable,
                                                          const CableState& state) {
  std::vector<structure::PointKinematics> k;
  k.reserve(pairing.num_sections());
  for (const MasterPoint& m : pairing.masters) k.push_back(structure::interpolate_at_point(cable, state, m.element, m.s));
  return k;
}

SlaveMotion slave_motion(const Pairing& pairing, const CableModel& cable, const CableState& state) {
  const auto km = master_kinematics(pairing, cable, state);
  std::vector<Mat3> rot(km.size());
  for (std::size_t i = 0; i < km.size(); ++i) rot[i] = rotation::rotation_matrix(km[i].theta);
  SlaveMotion out;
  out.displacement.resize(pairing.num_slaves());
  out.velocity.resize(pairing.num_slaves());
  for (std::size_t j = 0; j < pairing.num_slaves(); ++j) {
    const SlaveRecord& s = pairing.slaves[j];
    const auto& k = km[s.section];
    const Vec3 rd = rot[s.section] * s.offset;
    out.displacement[j] = k.u + rd - s.offset;
    out.velocity[j] = k.velocity + k.omega.cross(rd);
  }
  return out;
}

void update_surface_motion(const Pairing& pairing, const CableModel& cable, const CableState& state,
                           surface::EmbeddedSurface& surface) {
  const SlaveMotion m = slave_motion(pairing, cable, state);
  surface.set_motion(m.displacement, m.velocity);
}

MasterLoads aggregate_loads(std::span<const Vec3> slave_forces, const Pairing& pairing, const CableModel& cable,
                            const CableState& state) {
  if (slave_forces.size() != pairing.num_slaves()) throw Error("slave force count does not match the pairing");
  const auto km = master_kinematics(pairing, cable, state);
  MasterLoads loads;
  loads.force.assign(pairing.num_sections(), Vec3::Zero());
  loads.moment.assign(pairing.num_sections(), Vec3::Zero());
  for (std::size_t i = 0; i < pairing.num_sections(); ++i) {
    const Mat3 r = rotation::rotation_matrix(km[i].theta);
    for (Index j : pairing.section_nodes[i]) {
      loads.force[i] += slave_forces[j];
      loads.moment[i] += (r * pairing.slaves[j].offset).cross(slave_forces[j]);
    }
  }
  return loads;
}

structure::DofVector distribute_loads(const MasterLoads& loads, const Pairing& pairing, const CableModel& cable) {
  structure::DofVector f = structure::DofVector::Zero(cable.num_dofs());
  for (std::size_t i = 0; i < pairing.num_sections(); ++i) {
    const MasterPoint& m = pairing.masters[i];
    const auto [a, b] = cable.elements[m.element];
    const double phi[2] = {1.0 - m.s, m.s};
    const Index nodes[2] = {a, b};
    for (int k = 0; k < 2; ++k) {
      f.segment<3>(6 * nodes[k]) += phi[k] * loads.force[i];
      f.segment<3>(6 * nodes[k] + 3) += phi[k] * loads.moment[i];
    }
  }
  return f;
}

VirtualWork virtual_work_check(std::span<const Vec3> slave_forces, const Pairing& pairing, const CableModel& cable,
                               const CableState& state, std::span<const Vec3> du, std::span<const Vec3> dtheta) {
  if (du.size() != cable.num_nodes() || dtheta.size() != cable.num_nodes()) {
    throw Error("virtual motion size does not match the cable");
  }
  const auto km = master_kinematics(pairing, cable, state);
  VirtualWork w;
  for (std::size_t i = 0; i < pairing.num_sections(); ++i) {
    const MasterPoint& m = pairing.masters[i];
    const auto [a, b] = cable.elements[m.element];
    const Vec3 du_m = (1.0 - m.s) * du[a] + m.s * du[b];
    const Vec3 dth_m = (1.0 - m.s) * dtheta[a] + m.s * dtheta[b];
    const Mat3 r = rotation::rotation_matrix(km[i].theta);
    for (Index j : pairing.section_nodes[i]) {
      const Vec3 du_s = du_m + dth_m.cross(r * pairing.slaves[j].offset);
      w.fluid += slave_forces[j].dot(du_s);
    }
  }
  const structure::DofVector fn =
      distribute_loads(aggregate_loads(slave_forces, pairing, cable, state), pairing, cable);
  for (std::size_t n = 0; n < cable.num_nodes(); ++n) {
    w.structure += fn.segment<3>(6 * n).dot(du[n]) + fn.segment<3>(6 * n + 3).dot(dtheta[n]);
  }
  return w;
}

TransferAudit audit_transfer(std::span<const Vec3> slave_forces, const Pairing& pairing, const CableModel& cable,
                             const CableState& state) {
  TransferAudit audit;
  for (const Vec3& f : slave_forces) audit.slave_force_sum += f;
  const structure::DofVector fn =
      distribute_loads(aggregate_loads(slave_forces, pairing, cable, state), pairing, cable);
  for (std::size_t n = 0; n < cable.num_nodes(); ++n) audit.nodal_force_sum += fn.segment<3>(6 * n);
  std::vector<Vec3> du(cable.num_nodes()), dth(cable.num_nodes());
  for (std::size_t n = 0; n < cable.num_nodes(); ++n) {
    const double x = static_cast<double>(n);
    du[n] = Vec3(std::sin(0.7 * x + 0.1), std::cos(1.3 * x), std::sin(2.1 * x + 0.5));
    dth[n] = Vec3(std::cos(0.4 * x + 0.2), std::sin(1.9 * x), std::cos(0.9 * x + 1.0));
  }
  const VirtualWork w = virtual_work_check(slave_forces, pairing, cable, state, du, dth);
  const double scale = std::max(std::abs(w.fluid), std::numeric_limits<double>::min());
  audit.work_mismatch = std::abs(w.fluid - w.structure) / scale;
  return audit;
}

void write_audit_header(std::ostream& out) {
  out << "time,sum_fS_x,sum_fS_y,sum_fS_z,sum_fN_x,sum_fN_y,sum_fN_z,work_mismatch\n";
}

void write_audit_row(std::ostream& out, double time, const TransferAudit& a) {
  const auto old = out.precision(17);
  out << time << ',' << a.slave_force_sum.x() << ',' << a.slave_force_sum.y() << ',' << a.slave_force_sum.z()
      << ',' << a.nodal_force_sum.x() << ',' << a.nodal_force_sum.y() << ',' << a.nodal_force_sum.z() << ','
      << a.work_mismatch << '\n';
  out.precision(old);
}

}  // namespace cablefsi::coupling
