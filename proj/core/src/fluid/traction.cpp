#include "cablefsi/fluid/traction.hpp"

#include "cablefsi/log.hpp"

#include <cmath>

namespace cablefsi::fluid {

std::optional<PointFlow> evaluate_in_tet(const FluidContext& ctx, const std::vector<Primitive5>& w,
                                         const std::vector<Gradient>& grad, Index tet, const Vec3& x) {
  const auto& mesh = ctx.mesh();
  const auto lambda = ctx.locator().barycentric(tet, x);
  const auto& nodes = mesh.tets()[tet].v;
  double total = 0.0;
  Primitive5 value = Primitive5::Zero();
  Eigen::Matrix<double, 5, 3> g = Eigen::Matrix<double, 5, 3>::Zero();
  for (int k = 0; k < 4; ++k) {
    if (!ctx.is_real(nodes[k])) continue;
    // Points on a face of the tet may carry tiny negative roundoff.
    const double l = std::max(lambda[k], 0.0) + 1e-14;
    value += l * (w[nodes[k]] + grad[nodes[k]] * (x - mesh.nodes()[nodes[k]]));
    g += l * grad[nodes[k]];
    total += l;
  }
  if (total == 0.0) return std::nullopt;
  value /= total;
  g /= total;
  if (!(value[0] > 0.0) || !(value[4] > 0.0)) {
    // Gradient correction overshoot: use plain weighted nodal values.
    value.setZero();
    for (int k = 0; k < 4; ++k) {
      if (ctx.is_real(nodes[k])) value += (std::max(lambda[k], 0.0) + 1e-14) * w[nodes[k]];
    }
    value /= total;
  }
  PointFlow f;
  f.rho = value[0];
  f.v = value.segment<3>(1);
  f.p = value[4];
  f.velocity_gradient = g.block<3, 3>(1, 0);
  return f;
}

namespace {

struct GaussRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;  // fractions of the triangle area
};

GaussRule rule(int n) {
  if (n == 1) return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}, {1.0}};
  if (n == 3) {
    return {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}},
            {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  }
  throw ConfigError("quadrature_points must be 1 or 3");
}

bool has_real_node(const FluidContext& ctx, Index tet) {
  for (Index n : ctx.mesh().tets()[tet].v) {
    if (ctx.is_real(n)) return true;
  }
  return false;
}

}  // namespace

std::vector<TractionSample> sample_tractions(const FluidContext& ctx, const FluidState& state,
                                             const std::vector<Gradient>& grad,
                                             const surface::EmbeddedSurface& surface, const TractionOptions& opt) {
  const GaussRule g = rule(opt.quadrature_points);
  const auto w = primitives(ctx, state);
  const auto& gas = ctx.gas();
  std::vector<TractionSample> out;
  out.reserve(surface.num_triangles() * g.points.size());
  std::size_t unshifted = 0;
  for (std::size_t t = 0; t < surface.num_triangles(); ++t) {
    const auto& tri = surface.triangles()[t];
    const Vec3& n = surface.normals()[t];
    for (std::size_t q = 0; q < g.points.size(); ++q) {
      TractionSample s;
      s.triangle = static_cast<Index>(t);
      s.bary = g.points[q];
      s.weight = g.weights[q] * surface.areas()[t];
      s.normal = n;
      s.point = s.bary[0] * surface.positions()[tri[0]] + s.bary[1] * surface.positions()[tri[1]] +
                s.bary[2] * surface.positions()[tri[2]];
      const auto host = ctx.locator().locate(s.point);
      if (!host) throw GeometryError("surface Gauss point lies outside the fluid mesh");

      std::optional<PointFlow> flow;
      if (opt.shift) {
        double h = std::cbrt(ctx.mesh().tet_volume(*host));
        for (int attempt = 0; attempt <= opt.max_retries && !flow; ++attempt, h *= 0.5) {
          const Vec3 x = s.point + h * n;
          const auto cell = ctx.locator().locate(x);
          if (!cell || !has_real_node(ctx, *cell)) continue;
          flow = evaluate_in_tet(ctx, w, grad, *cell, x);
          if (flow) {
            s.shifted = x;
            s.h = h;
          }
        }
      }
      if (!flow) {
        if (opt.shift) ++unshifted;
        flow = evaluate_in_tet(ctx, w, grad, *host, s.point);
        s.shifted = s.point;
        s.h = 0.0;
      }
      if (!flow) {
        // Host cell without real nodes: no flow data on this side.
        flow = PointFlow{ctx.farfield().rho, Vec3::Zero(), ctx.farfield().p, Mat3::Zero()};
      }
      s.pressure = flow->p;
      if (opt.viscous) {
        const double mu = gas.viscosity(gas.temperature(flow->rho, flow->p));
        const Mat3& l = flow->velocity_gradient;
        s.stress = mu * (l + l.transpose() - (2.0 / 3.0) * l.trace() * Mat3::Identity());
      }
      s.traction = -s.pressure * n + s.stress * n;
      out.push_back(s);
    }
  }
  if (unshifted > 0) logger()->debug("{} Gauss points evaluated unshifted", unshifted);
  return out;
}

std::vector<Vec3> integrate_slave_forces(const std::vector<TractionSample>& samples,
                                         const surface::EmbeddedSurface& surface) {
  std::vector<Vec3> f(surface.num_nodes(), Vec3::Zero());
  for (const TractionSample& s : samples) {
    const auto& tri = surface.triangles()[s.triangle];
    for (int k = 0; k < 3; ++k) f[tri[k]] += s.weight * s.bary[k] * s.traction;
  }
  return f;
}

Vec3 total_force(const std::vector<TractionSample>& samples) {
  Vec3 sum = Vec3::Zero();
  for (const TractionSample& s : samples) sum += s.weight * s.traction;
  return sum;
}

}  // namespace cablefsi::fluid
