#pragma once

#include "cablefsi/fluid/fluid.hpp"

#include <array>
#include <optional>
#include <vector>

namespace cablefsi::fluid {

struct TractionOptions {
  int quadrature_points = 1;  // 1 (centroid) or 3 (edge-interior rule)
  bool shift = true;          // evaluate at x_G + h n_G
  bool viscous = true;        // include tau n
  int max_retries = 3;        // h halvings before falling back to x_G
};

struct TractionSample {
  Index triangle = 0;
  std::array<double, 3> bary{};  // hat-function values at the Gauss point
  double weight = 0.0;           // quadrature weight (area share)
  Vec3 point = Vec3::Zero();     // x_G
  Vec3 shifted = Vec3::Zero();   // point where the flow was evaluated
  Vec3 normal = Vec3::Zero();    // unshifted outward normal
  double h = 0.0;                // shift distance actually used (0 when unshifted)
  double pressure = 0.0;
  Mat3 stress = Mat3::Zero();    // viscous stress tau
  Vec3 traction = Vec3::Zero();  // -p n + tau n
};

/// Flow quantities reconstructed at a point of a host tet from its real
/// nodes: nodal values corrected by nodal gradients, weighted by the
/// renormalized barycentric coordinates of the real nodes.
struct PointFlow {
  double rho = 0.0;
  Vec3 v = Vec3::Zero();
  double p = 0.0;
  Mat3 velocity_gradient = Mat3::Zero();
};

std::optional<PointFlow> evaluate_in_tet(const FluidContext& ctx, const std::vector<Primitive5>& w,
                                         const std::vector<Gradient>& gradients, Index tet, const Vec3& x);

std::vector<TractionSample> sample_tractions(const FluidContext& ctx, const FluidState& state,
                                             const std::vector<Gradient>& gradients,
                                             const surface::EmbeddedSurface& surface,
                                             const TractionOptions& options = {});

/// f_S^j = sum_k weight_k traction_k phi_j(G_k).
std::vector<Vec3> integrate_slave_forces(const std::vector<TractionSample>& samples,
                                         const surface::EmbeddedSurface& surface);

/// Quadrature total of the traction integral.
Vec3 total_force(const std::vector<TractionSample>& samples);

}  // namespace cablefsi::fluid
