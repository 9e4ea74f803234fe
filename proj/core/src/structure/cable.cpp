#include "cablefsi/structure/cable.hpp"

#include "cablefsi/log.hpp"
#include "cablefsi/rotation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/AutoDiff>

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

namespace cablefsi::structure {

using rotation::Mat3T;
using rotation::Vec3T;

SectionProperties circular_section(double youngs_modulus, double poisson_ratio, double diameter,
                                   double mass_per_length) {
  if (!(youngs_modulus > 0.0) || !(diameter > 0.0) || !(mass_per_length > 0.0) ||
      !(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
    throw ConfigError("invalid cable section constants");
  }
  const double pi = std::numbers::pi;
  const double area = pi * diameter * diameter / 4.0;
  const double inertia = pi * std::pow(diameter, 4) / 64.0;
  const double shear_modulus = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
  SectionProperties s;
  s.EA = youngs_modulus * area;
  s.EIy = youngs_modulus * inertia;
  s.EIz = youngs_modulus * inertia;
  s.GJ = shear_modulus * 2.0 * inertia;
  s.GAs = shear_modulus * area;
  s.mass_per_length = mass_per_length;
  s.rotary_inertia_per_length = mass_per_length * diameter * diameter / 8.0;
  return s;
}

namespace {

Vec3 perpendicular_to(const Vec3& t) {
  int smallest = 0;
  t.cwiseAbs().minCoeff(&smallest);
  const Vec3 axis = Vec3::Unit(smallest);
  return (axis - axis.dot(t) * t).normalized();
}

double estimate_critical_time_step(const CableModel& model);

}  // namespace

CableModel make_cable_model(std::vector<Vec3> nodes, const SectionProperties& section,
                            std::vector<NodeFixity> fixity, double rayleigh_alpha) {
  if (nodes.size() < 2) throw ConfigError("cable needs at least 2 nodes");
  if (fixity.size() != nodes.size()) throw ConfigError("cable fixity size does not match node count");
  if (!(section.mass_per_length > 0.0)) throw ConfigError("cable mass per length must be positive");
  if (!(section.rotary_inertia_per_length > 0.0))
    throw ConfigError("cable rotary inertia per length must be positive");
  if (!(section.EA > 0.0 && section.EIy > 0.0 && section.EIz > 0.0 && section.GJ > 0.0 &&
        section.GAs > 0.0)) {
    throw ConfigError("cable stiffness constants must be positive");
  }
  if (rayleigh_alpha < 0.0) throw ConfigError("rayleigh damping must be non-negative");

  CableModel m;
  m.nodes = std::move(nodes);
  m.section = section;
  m.fixity = std::move(fixity);
  m.rayleigh_alpha = rayleigh_alpha;
  const std::size_t n = m.nodes.size();
  m.nodal_mass.assign(n, 0.0);
  m.nodal_inertia.assign(n, 0.0);

  Vec3 normal = Vec3::Zero();
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const Vec3 d = m.nodes[e + 1] - m.nodes[e];
    const double len = d.norm();
    if (!(len > 0.0)) throw ConfigError("cable element " + std::to_string(e) + " has zero length");
    const Vec3 axis = d / len;
    // Parallel-transport the section normal so neighbouring frames agree.
    if (e == 0) {
      normal = perpendicular_to(axis);
    } else {
      normal = (normal - normal.dot(axis) * axis);
      if (normal.norm() < 1e-8) normal = perpendicular_to(axis);
      normal.normalize();
    }
    Mat3 frame;
    frame.col(0) = axis;
    frame.col(1) = normal;
    frame.col(2) = axis.cross(normal);
    m.elements.push_back({static_cast<Index>(e), static_cast<Index>(e + 1)});
    m.lengths.push_back(len);
    m.frames.push_back(frame);
    for (Index v : m.elements.back()) {
      m.nodal_mass[v] += 0.5 * section.mass_per_length * len;
      m.nodal_inertia[v] += 0.5 * section.rotary_inertia_per_length * len;
    }
  }
  m.critical_time_step = estimate_critical_time_step(m);
  return m;
}

CableModel make_straight_cable(const Vec3& a, const Vec3& b, int elements,
                               const SectionProperties& section, const NodeFixity& first,
                               const NodeFixity& last, double rayleigh_alpha) {
  if (elements < 1) throw ConfigError("cable needs at least one element");
  std::vector<Vec3> nodes;
  for (int i = 0; i <= elements; ++i) {
    const double s = static_cast<double>(i) / elements;
    nodes.push_back((1.0 - s) * a + s * b);
  }
  nodes.back() = b;
  std::vector<NodeFixity> fixity(nodes.size(), kFree);
  fixity.front() = first;
  fixity.back() = last;
  return make_cable_model(std::move(nodes), section, std::move(fixity), rayleigh_alpha);
}

CableState CableState::zero(std::size_t nodes) {
  CableState s;
  s.u.assign(nodes, Vec3::Zero());
  s.theta.assign(nodes, Vec3::Zero());
  s.velocity.assign(nodes, Vec3::Zero());
  s.omega.assign(nodes, Vec3::Zero());
  return s;
}

void apply_fixity(const CableModel& model, CableState& state) {
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (model.fixity[i][k]) {
        state.u[i][k] = 0.0;
        state.velocity[i][k] = 0.0;
      }
      if (model.fixity[i][3 + k]) {
        state.theta[i][k] = 0.0;
        state.omega[i][k] = 0.0;
      }
    }
  }
}

namespace {

using Grad12 = Eigen::Matrix<double, 12, 1>;
using AD = Eigen::AutoDiffScalar<Grad12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

struct ElementInput {
  double length = 0.0;
  Mat3 frame;
  const SectionProperties* section = nullptr;
};

// Strain energy of one corotated Timoshenko element, given current end
// positions and total nodal rotations.
template <typename T>
T element_energy(const ElementInput& in, const Vec3T<T>& xa, const Vec3T<T>& xb, const Mat3T<T>& ra,
                 const Mat3T<T>& rb) {
  using std::sqrt;
  const SectionProperties& s = *in.section;
  const Mat3T<T> e0 = in.frame.cast<T>();
  const Vec3T<T> d = xb - xa;
  const T ln = sqrt(d.dot(d));
  const Vec3T<T> e1 = d / ln;
  const Vec3T<T> q = T(0.5) * (ra * e0.col(1) + rb * e0.col(1));
  Vec3T<T> e3 = e1.cross(q);
  e3 = e3 / sqrt(e3.dot(e3));
  const Vec3T<T> e2 = e3.cross(e1);
  Mat3T<T> rr;
  rr.col(0) = e1;
  rr.col(1) = e2;
  rr.col(2) = e3;
  const Vec3T<T> ta = rotation::rotation_vector<T>(Mat3T<T>(rr.transpose() * ra * e0));
  const Vec3T<T> tb = rotation::rotation_vector<T>(Mat3T<T>(rr.transpose() * rb * e0));

  const double l0 = in.length;
  const T axial = ln - T(l0);
  const T twist = tb.x() - ta.x();
  T energy = T(0.5 * s.EA / l0) * axial * axial + T(0.5 * s.GJ / l0) * twist * twist;
  const auto bending = [&](double ei, const T& a, const T& b) -> T {
    const double phi = 12.0 * ei / (s.GAs * l0 * l0);
    const double c = ei / (l0 * (1.0 + phi));
    return T(0.5 * c) * (T(4.0 + phi) * (a * a + b * b) + T(2.0 * (2.0 - phi)) * a * b);
  };
  energy += bending(s.EIz, ta.z(), tb.z());
  energy += bending(s.EIy, ta.y(), tb.y());
  return energy;
}

void check_length(const CableModel& model, std::size_t e, const Vec3& xa, const Vec3& xb) {
  if ((xb - xa).norm() < 1e-6 * model.lengths[e]) {
    throw NumericalError("element inversion: cable element " + std::to_string(e) +
                         " collapsed below 1e-6 of its reference length");
  }
}

ElementInput element_input(const CableModel& model, std::size_t e) {
  return {model.lengths[e], model.frames[e], &model.section};
}

// Gradient of the element energy w.r.t. (ua, wa, ub, wb), w = spatial spin.
Grad12 element_forces(const ElementInput& in, const Vec3& xa, const Vec3& xb, const Mat3& ra,
                      const Mat3& rb) {
  Vec3T<AD> dxa, dxb, wa, wb;
  for (int k = 0; k < 3; ++k) {
    dxa[k] = AD(0.0, 12, k);
    wa[k] = AD(0.0, 12, 3 + k);
    dxb[k] = AD(0.0, 12, 6 + k);
    wb[k] = AD(0.0, 12, 9 + k);
  }
  const Vec3T<AD> pa = xa.cast<AD>() + dxa;
  const Vec3T<AD> pb = xb.cast<AD>() + dxb;
  const Mat3T<AD> id = Mat3T<AD>::Identity();
  const Mat3T<AD> qa = (id + rotation::skew<AD>(wa)) * ra.cast<AD>();
  const Mat3T<AD> qb = (id + rotation::skew<AD>(wb)) * rb.cast<AD>();
  const AD energy = element_energy<AD>(in, pa, pb, qa, qb);
  return energy.derivatives();
}

struct NodalConfig {
  std::vector<Vec3> x;
  std::vector<Mat3> r;
};

NodalConfig configuration(const CableModel& model, const std::vector<Vec3>& u,
                          const std::vector<Mat3>& r) {
  NodalConfig c;
  c.x.resize(model.num_nodes());
  for (std::size_t i = 0; i < model.num_nodes(); ++i) c.x[i] = model.nodes[i] + u[i];
  c.r = r;
  return c;
}

std::vector<Mat3> rotations_of(const CableState& state) {
  std::vector<Mat3> r(state.theta.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rotation::rotation_matrix(state.theta[i]);
  return r;
}

DofVector internal_forces(const CableModel& model, const NodalConfig& c) {
  DofVector f = DofVector::Zero(model.num_dofs());
  for (std::size_t e = 0; e < model.num_elements(); ++e) {
    const auto [a, b] = model.elements[e];
    check_length(model, e, c.x[a], c.x[b]);
    const Grad12 fe = element_forces(element_input(model, e), c.x[a], c.x[b], c.r[a], c.r[b]);
    f.segment<6>(6 * a) += fe.head<6>();
    f.segment<6>(6 * b) += fe.tail<6>();
  }
  return f;
}

Mat12 element_tangent(const CableModel& model, std::size_t e, const NodalConfig& c) {
  const auto [a, b] = model.elements[e];
  const ElementInput in = element_input(model, e);
  const double hu = 1e-6 * model.lengths[e];
  const double hr = 1e-6;
  Mat12 k;
  for (int j = 0; j < 12; ++j) {
    Grad12 f[2];
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;
      Vec3 xa = c.x[a], xb = c.x[b];
      Mat3 ra = c.r[a], rb = c.r[b];
      const int local = j % 3;
      switch (j / 3) {
        case 0: xa[local] += sign * hu; break;
        case 1: ra = rotation::rotation_matrix(sign * hr * Vec3::Unit(local)) * ra; break;
        case 2: xb[local] += sign * hu; break;
        default: rb = rotation::rotation_matrix(sign * hr * Vec3::Unit(local)) * rb; break;
      }
      f[side] = element_forces(in, xa, xb, ra, rb);
    }
    const double h = (j / 3) % 2 == 0 ? hu : hr;
    k.col(j) = (f[0] - f[1]) / (2.0 * h);
  }
  return k;
}

Eigen::SparseMatrix<double> tangent_of(const CableModel& model, const NodalConfig& c) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(144 * model.num_elements());
  for (std::size_t e = 0; e < model.num_elements(); ++e) {
    const Mat12 k = element_tangent(model, e, c);
    const auto [a, b] = model.elements[e];
    const Index base[2] = {6 * a, 6 * b};
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) trips.emplace_back(base[i / 6] + i % 6, base[j / 6] + j % 6, k(i, j));
  }
  Eigen::SparseMatrix<double> kt(model.num_dofs(), model.num_dofs());
  kt.setFromTriplets(trips.begin(), trips.end());
  return kt;
}

// Linear Timoshenko element in its local frame, DOFs (u, theta) per node.
Mat12 local_linear_stiffness(const SectionProperties& s, double l) {
  Mat12 k = Mat12::Zero();
  const auto add = [&k](int i, int j, double v) {
    k(i, j) += v;
    if (i != j) k(j, i) += v;
  };
  add(0, 0, s.EA / l);
  add(6, 6, s.EA / l);
  add(0, 6, -s.EA / l);
  add(3, 3, s.GJ / l);
  add(9, 9, s.GJ / l);
  add(3, 9, -s.GJ / l);

  // bending in the local x-y plane: v (1, 7), theta_z (5, 11)
  {
    const double phi = 12.0 * s.EIz / (s.GAs * l * l);
    const double c = s.EIz / (l * l * l * (1.0 + phi));
    add(1, 1, 12 * c);
    add(1, 5, 6 * l * c);
    add(1, 7, -12 * c);
    add(1, 11, 6 * l * c);
    add(5, 5, (4 + phi) * l * l * c);
    add(5, 7, -6 * l * c);
    add(5, 11, (2 - phi) * l * l * c);
    add(7, 7, 12 * c);
    add(7, 11, -6 * l * c);
    add(11, 11, (4 + phi) * l * l * c);
  }
  // bending in the local x-z plane: w (2, 8), theta_y (4, 10)
  {
    const double phi = 12.0 * s.EIy / (s.GAs * l * l);
    const double c = s.EIy / (l * l * l * (1.0 + phi));
    add(2, 2, 12 * c);
    add(2, 4, -6 * l * c);
    add(2, 8, -12 * c);
    add(2, 10, -6 * l * c);
    add(4, 4, (4 + phi) * l * l * c);
    add(4, 8, 6 * l * c);
    add(4, 10, (2 - phi) * l * l * c);
    add(8, 8, 12 * c);
    add(8, 10, 6 * l * c);
    add(10, 10, (4 + phi) * l * l * c);
  }
  return k;
}

std::atomic<bool> g_stability_warned{false};

double estimate_critical_time_step(const CableModel& model) {
  const Eigen::SparseMatrix<double> k = linear_stiffness(model);
  const DofVector mass = mass_diagonal(model);
  const Index n = model.num_dofs();
  DofVector scale(n);
  for (Index i = 0; i < n; ++i) scale[i] = model.is_fixed(i) ? 0.0 : 1.0 / std::sqrt(mass[i]);
  // Power iteration on M^-1/2 K M^-1/2 restricted to the free DOFs.
  DofVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = scale[i] > 0.0 ? 1.0 + 0.37 * std::sin(1.7 * i) : 0.0;
  if (x.norm() == 0.0) return std::numeric_limits<double>::infinity();
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    DofVector y = scale.cwiseProduct(k * scale.cwiseProduct(x));
    const double next = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
    if (it > 10 && std::abs(next - lambda) <= 1e-8 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  if (!(lambda > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 / std::sqrt(lambda);
}

void check_finite(const CableState& s) {
  for (std::size_t i = 0; i < s.num_nodes(); ++i) {
    if (!s.u[i].allFinite() || !s.theta[i].allFinite() || !s.velocity[i].allFinite() ||
        !s.omega[i].allFinite()) {
      throw NumericalError("cable integration diverged (non-finite state at node " +
                           std::to_string(i) + ")");
    }
  }
}

}  // namespace

DofVector assemble_internal_forces(const CableModel& model, const CableState& state) {
  return internal_forces(model, configuration(model, state.u, rotations_of(state)));
}

Eigen::SparseMatrix<double> tangent_stiffness(const CableModel& model, const CableState& state) {
  return tangent_of(model, configuration(model, state.u, rotations_of(state)));
}

Eigen::SparseMatrix<double> linear_stiffness(const CableModel& model) {
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t e = 0; e < model.num_elements(); ++e) {
    Mat12 t = Mat12::Zero();
    for (int b = 0; b < 4; ++b) t.block<3, 3>(3 * b, 3 * b) = model.frames[e].transpose();
    const Mat12 kg = t.transpose() * local_linear_stiffness(model.section, model.lengths[e]) * t;
    const auto [a, b] = model.elements[e];
    const Index base[2] = {6 * a, 6 * b};
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) trips.emplace_back(base[i / 6] + i % 6, base[j / 6] + j % 6, kg(i, j));
  }
  Eigen::SparseMatrix<double> k(model.num_dofs(), model.num_dofs());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

DofVector mass_diagonal(const CableModel& model) {
  DofVector m(model.num_dofs());
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    m.segment<3>(6 * i).setConstant(model.nodal_mass[i]);
    m.segment<3>(6 * i + 3).setConstant(model.nodal_inertia[i]);
  }
  return m;
}

double kinetic_energy(const CableModel& model, const CableState& state) {
  double t = 0.0;
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    t += 0.5 * model.nodal_mass[i] * state.velocity[i].squaredNorm();
    t += 0.5 * model.nodal_inertia[i] * state.omega[i].squaredNorm();
  }
  return t;
}

double strain_energy(const CableModel& model, const CableState& state) {
  double u = 0.0;
  for (std::size_t e = 0; e < model.num_elements(); ++e) {
    const auto [a, b] = model.elements[e];
    const Vec3 xa = model.nodes[a] + state.u[a];
    const Vec3 xb = model.nodes[b] + state.u[b];
    check_length(model, e, xa, xb);
    u += element_energy<double>(element_input(model, e), xa, xb,
                                rotation::rotation_matrix(state.theta[a]),
                                rotation::rotation_matrix(state.theta[b]));
  }
  return u;
}

Vec3 linear_momentum(const CableModel& model, const CableState& state) {
  Vec3 p = Vec3::Zero();
  for (std::size_t i = 0; i < model.num_nodes(); ++i) p += model.nodal_mass[i] * state.velocity[i];
  return p;
}

namespace {

void check_sizes(const CableModel& model, const CableState& state, const DofVector& f_ext) {
  if (state.num_nodes() != model.num_nodes() || state.theta.size() != model.num_nodes() ||
      state.velocity.size() != model.num_nodes() || state.omega.size() != model.num_nodes()) {
    throw StateError("cable state size does not match the model");
  }
  if (f_ext.size() != model.num_dofs()) throw StateError("external force size does not match the model");
}

// Accelerations from the net generalized force, zero on fixed DOFs.
void accelerations(const CableModel& model, const DofVector& net, std::vector<Vec3>& a,
                   std::vector<Vec3>& alpha) {
  const std::size_t n = model.num_nodes();
  a.resize(n);
  alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = net.segment<3>(6 * i) / model.nodal_mass[i];
    alpha[i] = net.segment<3>(6 * i + 3) / model.nodal_inertia[i];
    for (int k = 0; k < 3; ++k) {
      if (model.fixity[i][k]) a[i][k] = 0.0;
      if (model.fixity[i][3 + k]) alpha[i][k] = 0.0;
    }
  }
}

Vec3 advance_rotation(const Vec3& theta, const Vec3& increment) {
  const Mat3 r = rotation::rotation_matrix(increment) * rotation::rotation_matrix(theta);
  return rotation::unwrap(rotation::rotation_vector<double>(r), theta);
}

DofVector damping_force(const CableModel& model, const std::vector<Vec3>& v,
                        const std::vector<Vec3>& w) {
  DofVector f = DofVector::Zero(model.num_dofs());
  if (model.rayleigh_alpha == 0.0) return f;
  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    f.segment<3>(6 * i) = model.rayleigh_alpha * model.nodal_mass[i] * v[i];
    f.segment<3>(6 * i + 3) = model.rayleigh_alpha * model.nodal_inertia[i] * w[i];
  }
  return f;
}

}  // namespace

CableState step_central_difference(const CableModel& model, const CableState& state,
                                   const DofVector& f_ext, double dt) {
  check_sizes(model, state, f_ext);
  if (!(dt > 0.0)) throw StateError("time step must be positive");
  if (dt > model.critical_time_step && !g_stability_warned.exchange(true)) {
    logger()->warn("cable time step {:.3e} exceeds the explicit stability estimate {:.3e}", dt,
                   model.critical_time_step);
  }
  const std::size_t n = model.num_nodes();
  std::vector<Vec3> a, alpha;
  accelerations(model, f_ext - assemble_internal_forces(model, state) -
                           damping_force(model, state.velocity, state.omega),
                a, alpha);

  CableState next = state;
  for (std::size_t i = 0; i < n; ++i) {
    next.velocity[i] = state.velocity[i] + 0.5 * dt * a[i];
    next.omega[i] = state.omega[i] + 0.5 * dt * alpha[i];
    next.u[i] = state.u[i] + dt * next.velocity[i];
    next.theta[i] = advance_rotation(state.theta[i], dt * next.omega[i]);
  }
  apply_fixity(model, next);
  accelerations(model, f_ext - assemble_internal_forces(model, next) -
                           damping_force(model, next.velocity, next.omega),
                a, alpha);
  for (std::size_t i = 0; i < n; ++i) {
    next.velocity[i] += 0.5 * dt * a[i];
    next.omega[i] += 0.5 * dt * alpha[i];
  }
  apply_fixity(model, next);
  next.time = state.time + dt;
  check_finite(next);
  return next;
}

CableState step_midpoint(const CableModel& model, const CableState& state, const DofVector& f_ext,
                         double dt, const NewtonOptions& options) {
  check_sizes(model, state, f_ext);
  if (!(dt > 0.0)) throw StateError("time step must be positive");
  const std::size_t n = model.num_nodes();
  const Index ndof = model.num_dofs();
  const DofVector mass = mass_diagonal(model);

  DofVector y0(ndof);
  for (std::size_t i = 0; i < n; ++i) {
    y0.segment<3>(6 * i) = state.velocity[i];
    y0.segment<3>(6 * i + 3) = state.omega[i];
  }
  std::vector<Mat3> r0 = rotations_of(state);

  std::vector<Vec3> um(n);
  std::vector<Mat3> rm(n);
  std::vector<Vec3> vm(n), wm(n);
  const auto midpoint = [&](const DofVector& y) {
    for (std::size_t i = 0; i < n; ++i) {
      vm[i] = 0.5 * (y0.segment<3>(6 * i) + y.segment<3>(6 * i));
      wm[i] = 0.5 * (y0.segment<3>(6 * i + 3) + y.segment<3>(6 * i + 3));
      um[i] = state.u[i] + 0.5 * dt * vm[i];
      rm[i] = rotation::rotation_matrix(0.5 * dt * wm[i]) * r0[i];
    }
  };
  const auto residual = [&](const DofVector& y) {
    midpoint(y);
    const NodalConfig c = configuration(model, um, rm);
    DofVector r = mass.cwiseProduct(y - y0) / dt + internal_forces(model, c) - f_ext +
                  damping_force(model, vm, wm);
    for (Index d = 0; d < ndof; ++d)
      if (model.is_fixed(d)) r[d] = y[d];
    return r;
  };

  DofVector y = y0;
  for (Index d = 0; d < ndof; ++d)
    if (model.is_fixed(d)) y[d] = 0.0;
  const double scale = mass.cwiseProduct(y0).norm() / dt + f_ext.norm() +
                       assemble_internal_forces(model, state).norm();
  // Roundoff level of the assembled internal forces.
  const double floor = 32.0 * std::numeric_limits<double>::epsilon() * model.section.EA *
                       std::sqrt(static_cast<double>(n));
  DofVector r = residual(y);
  double rnorm = r.norm();
  int it = 0;
  while (rnorm > options.tolerance * scale + floor) {
    if (it == options.max_iterations) {
      throw NumericalError("midpoint Newton did not converge: residual norm " + std::to_string(rnorm));
    }
    ++it;
    Eigen::SparseMatrix<double> jac = tangent_of(model, configuration(model, um, rm));
    jac *= 0.25 * dt;
    std::vector<Eigen::Triplet<double>> diag;
    for (Index d = 0; d < ndof; ++d) {
      diag.emplace_back(d, d, mass[d] / dt + 0.5 * model.rayleigh_alpha * mass[d]);
    }
    Eigen::SparseMatrix<double> md(ndof, ndof);
    md.setFromTriplets(diag.begin(), diag.end());
    jac += md;
    // Fixed DOFs: identity rows and columns.
    for (int k = 0; k < jac.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator itr(jac, k); itr; ++itr)
        if (model.is_fixed(itr.row()) || model.is_fixed(itr.col()))
          itr.valueRef() = itr.row() == itr.col() ? 1.0 : 0.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw NumericalError("midpoint Newton: singular Jacobian");
    const DofVector dy = lu.solve(r);
    y -= dy;
    r = residual(y);
    rnorm = r.norm();
    if (!std::isfinite(rnorm)) throw NumericalError("cable integration diverged (midpoint Newton)");
  }

  midpoint(y);
  CableState next = state;
  for (std::size_t i = 0; i < n; ++i) {
    next.velocity[i] = y.segment<3>(6 * i);
    next.omega[i] = y.segment<3>(6 * i + 3);
    next.u[i] = state.u[i] + dt * vm[i];
    next.theta[i] = advance_rotation(state.theta[i], dt * wm[i]);
  }
  apply_fixity(model, next);
  next.time = state.time + dt;
  check_finite(next);
  return next;
}

PointKinematics interpolate_at_point(const CableModel& model, const CableState& state,
                                     Index element, double s) {
  if (element < 0 || element >= static_cast<Index>(model.num_elements())) {
    throw Error("cable element id " + std::to_string(element) + " out of range");
  }
  if (!(s >= 0.0 && s <= 1.0)) throw Error("parametric coordinate outside [0, 1]");
  const auto [a, b] = model.elements[element];
  const double wa = 1.0 - s, wb = s;
  return {wa * state.u[a] + wb * state.u[b], wa * state.theta[a] + wb * state.theta[b],
          wa * state.velocity[a] + wb * state.velocity[b], wa * state.omega[a] + wb * state.omega[b]};
}

std::vector<double> natural_frequencies(const CableModel& model, int count) {
  const Eigen::MatrixXd k = Eigen::MatrixXd(linear_stiffness(model));
  const DofVector mass = mass_diagonal(model);
  std::vector<Index> free;
  for (Index d = 0; d < model.num_dofs(); ++d) {
    if (model.is_fixed(d)) continue;
    if (!(mass[d] > 0.0)) throw NumericalError("singular mass matrix");
    free.push_back(d);
  }
  const auto nf = static_cast<Index>(free.size());
  Eigen::MatrixXd a(nf, nf);
  for (Index i = 0; i < nf; ++i)
    for (Index j = 0; j < nf; ++j)
      a(i, j) = k(free[i], free[j]) / std::sqrt(mass[free[i]] * mass[free[j]]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  std::vector<double> f;
  for (Index i = 0; i < std::min<Index>(count, nf); ++i) {
    f.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()[i])) / (2.0 * std::numbers::pi));
  }
  return f;
}

}  // namespace cablefsi::structure
