#include "cablefsi/fluid/fluid.hpp"

#include "cablefsi/log.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cablefsi::fluid {

namespace {

PrimitiveState unpack(const Primitive5& w) { return {w[0], w.segment<3>(1), w[4]}; }

bool admissible(const Primitive5& w) { return w.allFinite() && w[0] > 0.0 && w[4] > 0.0; }

Vec3 surface_velocity_at(const surface::EmbeddedSurface& s, Index triangle, const Vec3& x) {
  const auto& tri = s.triangles()[triangle];
  const Vec3& a = s.positions()[tri[0]];
  const Vec3& b = s.positions()[tri[1]];
  const Vec3& c = s.positions()[tri[2]];
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  const double la = (c - b).cross(x - b).dot(n) / n2;
  const double lb = (a - c).cross(x - c).dot(n) / n2;
  const double lc = 1.0 - la - lb;
  return la * s.velocity()[tri[0]] + lb * s.velocity()[tri[1]] + lc * s.velocity()[tri[2]];
}

struct Counters {
  std::size_t first_order_edges = 0;
  std::size_t first_order_interface = 0;
  std::size_t alpha_clamped = 0;
  std::size_t star_fallback = 0;
  std::size_t uncut_mixed = 0;
};

}  // namespace

double van_albada(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a * b * (a + b) / (a * a + b * b);
}

std::vector<Gradient> compute_gradients(const FluidContext& ctx, const FluidState& state) {
  const auto& mesh = ctx.mesh();
  const auto& x = mesh.nodes();
  const auto w = primitives(ctx, state);
  std::vector<Gradient> grad(mesh.num_nodes(), Gradient::Zero());
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    const auto n = static_cast<Index>(i);
    const Mat3& inv = ctx.lsq_inverse(n);
    if (inv.isZero(0.0)) continue;
    Eigen::Matrix<double, 3, 5> rhs = Eigen::Matrix<double, 3, 5>::Zero();
    for (Index e : mesh.node_edges(n)) {
      const auto& ed = mesh.edges()[e];
      const Index j = ed.a == n ? ed.b : ed.a;
      if (!ctx.is_real(j) || ctx.edge_cut(e)) continue;
      const Vec3 dx = x[j] - x[n];
      rhs.noalias() += (dx / dx.squaredNorm()) * (w[j] - w[n]).transpose();
    }
    grad[i] = (inv * rhs).transpose();
  }
  return grad;
}

std::vector<Vec3> speed_gradients(const FluidContext& ctx, const FluidState& state,
                                  const std::vector<Gradient>& grad) {
  const auto w = primitives(ctx, state);
  std::vector<Vec3> out(w.size(), Vec3::Zero());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!ctx.is_real(static_cast<Index>(i))) continue;
    const Vec3 v = w[i].segment<3>(1);
    const double s = v.norm();
    if (s == 0.0) continue;
    // d|v|/dx_b = v_a dv_a/dx_b / |v|
    out[i] = grad[i].block<3, 3>(1, 0).transpose() * v / s;
  }
  return out;
}

Conservative split_flux(const PrimitiveState& w, const Vec3& n, double sign, const GasModel& gas) {
  const double g = gas.gamma;
  const double c = gas.sound_speed(w.rho, w.p);
  const double vn = w.v.dot(n);
  const double h = c * c / (g - 1.0) + 0.5 * w.v.squaredNorm();
  const auto part = [sign](double l) { return sign > 0.0 ? std::max(l, 0.0) : std::min(l, 0.0); };
  const double l1 = part(vn - c), l2 = part(vn), l5 = part(vn + c);
  const double k = w.rho / (2.0 * g);
  Conservative f;
  f[0] = k * (2.0 * (g - 1.0) * l2 + l1 + l5);
  f.segment<3>(1) = k * (2.0 * (g - 1.0) * l2 * w.v + l1 * (w.v - c * n) + l5 * (w.v + c * n));
  f[4] = k * ((g - 1.0) * l2 * w.v.squaredNorm() + l1 * (h - c * vn) + l5 * (h + c * vn));
  return f;
}

Conservative interface_state(const PrimitiveState& w, const Vec3& n, const Vec3& wall_velocity, const GasModel& gas) {
  const double vn = w.v.dot(n);
  const double un = wall_velocity.dot(n);
  const riemann::HalfRiemannSolution r = riemann::solve_half_riemann(w.rho, vn, w.p, un, gas);
  const Vec3 v_star = un * n + (w.v - vn * n);
  return riemann::to_conservative({r.rho, v_star, r.p}, gas);
}

double mixed_cell_alpha(const Vec3& x_i, const Vec3& x_j, const Vec3& x_I, double alpha_min, bool* clamped) {
  const double len = (x_j - x_i).norm();
  double d = (x_I - x_i).norm();
  const bool clamp = d < alpha_min * len;
  if (clamp) d = alpha_min * len;
  if (clamped != nullptr) *clamped = clamp;
  return (d - 0.5 * len) / d;
}

std::vector<Conservative> convective_residual(const FluidContext& ctx, const FluidState& state,
                                              const std::vector<Gradient>& grad, FluxTotals* totals) {
  const auto& mesh = ctx.mesh();
  const auto& dual = ctx.dual();
  const auto& gas = ctx.gas();
  const auto& x = mesh.nodes();
  const bool second = ctx.options().second_order;
  const auto w = primitives(ctx, state);
  std::vector<Conservative> r(mesh.num_nodes(), Conservative::Zero());
  FluxTotals local;
  Counters count;

  // Mixed-cell flux for real node i on edge i-j crossing the surface at `hit`.
  const auto fiver = [&](Index i, Index j, const surface::Intersection& hit, const Vec3& area) -> Conservative {
    const double mag = area.norm();
    const Vec3 nu = area / mag;
    Primitive5 wi = w[i];
    if (second) {
      // The extrapolation to the wall has no far-side value to limit against;
      // bound it by the range of the node's real neighbourhood instead.
      Primitive5 lo = w[i], hi = w[i];
      for (Index e : mesh.node_edges(i)) {
        const auto& ed = mesh.edges()[e];
        const Index k = ed.a == i ? ed.b : ed.a;
        if (!ctx.is_real(k) || ctx.edge_cut(e)) continue;
        lo = lo.cwiseMin(w[k]);
        hi = hi.cwiseMax(w[k]);
      }
      const Primitive5 step = grad[i] * (hit.point - x[i]);
      Primitive5 rec;
      for (int k = 0; k < 5; ++k) {
        double phi = 1.0;
        if (step[k] > 0.0) phi = std::min(1.0, (hi[k] - w[i][k]) / step[k]);
        if (step[k] < 0.0) phi = std::min(1.0, (lo[k] - w[i][k]) / step[k]);
        rec[k] = w[i][k] + phi * step[k];
      }
      if (admissible(rec)) {
        wi = rec;
      } else {
        ++count.first_order_interface;
      }
    }
    Vec3 n = hit.normal;
    if (n.dot(x[i] - hit.point) < 0.0) n = -n;
    const Vec3 wall = surface_velocity_at(*ctx.interface().surface, hit.triangle, hit.point);
    const Conservative w_star = interface_state(unpack(wi), n, wall, gas);
    bool clamped = false;
    const double alpha = mixed_cell_alpha(x[i], x[j], hit.point, ctx.options().alpha_min, &clamped);
    if (clamped) ++count.alpha_clamped;
    Conservative w_ij = alpha * state.W[i] + (1.0 - alpha) * w_star;
    if (!riemann::is_admissible(w_ij, gas)) {
      w_ij = w_star;
      ++count.star_fallback;
    }
    return riemann::roe_flux(state.W[i], w_ij, nu, gas) * mag;
  };

  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Vec3& area = dual.facet[e];
    const double mag = area.norm();
    if (mag == 0.0) continue;
    const Index a = mesh.edges()[e].a, b = mesh.edges()[e].b;
    const bool ra = ctx.is_real(a), rb = ctx.is_real(b);
    const auto hits = ctx.interface().hits.hits(static_cast<Index>(e));
    if (hits.empty()) {
      if (ra && rb) {
        const Vec3 nu = area / mag;
        Primitive5 wl = w[a], wr = w[b];
        if (second) {
          const Vec3 d = x[b] - x[a];
          const Primitive5 delta = w[b] - w[a];
          const Primitive5 sa = 2.0 * grad[a] * d - delta;
          const Primitive5 sb = 2.0 * grad[b] * d - delta;
          Primitive5 l, rr;
          for (int k = 0; k < 5; ++k) {
            l[k] = w[a][k] + 0.5 * van_albada(sa[k], delta[k]);
            rr[k] = w[b][k] - 0.5 * van_albada(sb[k], delta[k]);
          }
          if (admissible(l) && admissible(rr)) {
            wl = l;
            wr = rr;
          } else {
            ++count.first_order_edges;
          }
        }
        const Conservative f = riemann::roe_flux(riemann::to_conservative(unpack(wl), gas),
                                                 riemann::to_conservative(unpack(wr), gas), nu, gas) * mag;
        r[a] += f;
        r[b] -= f;
      } else if (ra != rb) {
        // Occlusion and intersection disagree (degenerate grazing contact):
        // close the facet as a stationary slip wall.
        const Index i = ra ? a : b;
        const Vec3 out = ra ? area : Vec3(-area);
        Conservative f = Conservative::Zero();
        f.segment<3>(1) = w[i][4] * out;
        r[i] += f;
        local.interface += f;
        ++count.uncut_mixed;
      }
      continue;
    }
    if (ra) {
      const Conservative f = fiver(a, b, hits.front(), area);
      r[a] += f;
      local.interface += f;
    }
    if (rb) {
      const Conservative f = fiver(b, a, hits.back(), -area);
      r[b] += f;
      local.interface += f;
    }
  }

  for (const geometry::BoundaryFacet& bf : dual.boundary) {
    if (!ctx.is_real(bf.node)) continue;
    const double mag = bf.area.norm();
    Conservative f = Conservative::Zero();
    if (bf.tag == geometry::BoundaryTag::Slip) {
      f.segment<3>(1) = w[bf.node][4] * bf.area;
    } else {
      const Vec3 n = bf.area / mag;
      f = (split_flux(unpack(w[bf.node]), n, 1.0, gas) + split_flux(ctx.farfield(), n, -1.0, gas)) * mag;
    }
    r[bf.node] += f;
    local.boundary += f;
  }

  if (count.first_order_edges + count.first_order_interface > 0) {
    logger()->debug("MUSCL fell back to first order on {} edges and {} interface reconstructions",
                    count.first_order_edges, count.first_order_interface);
  }
  if (count.alpha_clamped > 0) {
    logger()->debug("mixed-cell reconstruction point clamped on {} edges", count.alpha_clamped);
  }
  if (count.star_fallback > 0) logger()->debug("{} mixed-cell states replaced by the interface state", count.star_fallback);
  if (count.uncut_mixed > 0) {
    logger()->warn("{} real-ghost edges without a recorded crossing closed as slip walls", count.uncut_mixed);
  }
  if (totals != nullptr) *totals = local;
  return r;
}

}  // namespace cablefsi::fluid
