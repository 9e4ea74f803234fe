#include "cablefsi/fluid/fluid.hpp"
#include "cablefsi/fluid/traction.hpp"
#include "cablefsi/geometry/refine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace cablefsi;
using namespace cablefsi::fluid;
using geometry::Box;
using geometry::Mesh;

namespace {

const GasModel kAir{};

PrimitiveState free_stream(double mach = 0.5) {
  PrimitiveState w{1.2, Vec3::Zero(), 1.0e5};
  const double c = kAir.sound_speed(w.rho, w.p);
  w.v = mach * c * Vec3(0.8, 0.6, 0.0);
  return w;
}

double max_deviation(const FluidContext& ctx, const FluidState& s, const Conservative& ref) {
  double dev = 0.0;
  for (std::size_t i = 0; i < s.W.size(); ++i) {
    if (!ctx.is_real(static_cast<Index>(i))) continue;
    dev = std::max(dev, ((s.W[i] - ref).array() / ref.array().abs().max(1.0)).abs().maxCoeff());
  }
  return dev;
}

Mesh randomly_refined_box(int n, unsigned seed, const geometry::BoxSideTags& tags = geometry::kAllFarfield) {
  Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {n, n, n}, tags);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, static_cast<Index>(m.num_edges()) - 1);
  std::vector<Index> marked;
  for (int i = 0; i < 10; ++i) marked.push_back(pick(rng));
  return geometry::refine_edges(m, marked).mesh;
}

// Closed hexagonal cable through the middle of the unit box along x.
surface::EmbeddedSurface box_cable(double diameter, int sides = 6) {
  std::vector<Vec3> c;
  for (int i = 0; i <= 8; ++i) c.emplace_back(0.15 + 0.7 * i / 8.0, 0.5, 0.5);
  return surface::generate_cable_surface(c, sides, diameter, true);
}

}  // namespace

TEST(Gradients, ConstantAndLinearFieldsAreReproduced) {
  const Mesh m = randomly_refined_box(3, 1);
  FluidContext ctx(m, kAir, free_stream());
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  for (const Gradient& g : compute_gradients(ctx, s)) EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-9);

  Gradient a;
  a << 0.1, -0.2, 0.05, 3.0, 1.0, -2.0, 0.5, 0.0, 4.0, -1.0, 2.0, 1.5, 100.0, -50.0, 25.0;
  Primitive5 base;
  base << 1.2, 10.0, -5.0, 2.0, 1.0e5;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const Primitive5 w = base + a * m.nodes()[i];
    s.W[i] = riemann::to_conservative({w[0], w.segment<3>(1), w[4]}, kAir);
  }
  const auto g = compute_gradients(ctx, s);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) EXPECT_LE((g[i] - a).cwiseAbs().maxCoeff(), 1e-8) << i;
}

TEST(Gradients, QuadraticFieldErrorShrinksWithSpacing) {
  double previous = 0.0;
  for (int n : {4, 8, 16}) {
    const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {n, n, n});
    FluidContext ctx(m, kAir, free_stream());
    FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
      const Vec3& x = m.nodes()[i];
      s.W[i] = riemann::to_conservative({1.0 + 0.3 * x.x() * x.y() + 0.2 * x.z() * x.z(), Vec3::Zero(), 1.0e5}, kAir);
    }
    const auto g = compute_gradients(ctx, s);
    double err = 0.0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
      const Vec3& x = m.nodes()[i];
      const Vec3 exact(0.3 * x.y(), 0.3 * x.x(), 0.4 * x.z());
      err = std::max(err, (Vec3(g[i].row(0).transpose()) - exact).norm());
    }
    if (previous > 0.0) EXPECT_LT(err, 0.6 * previous) << "n " << n;
    previous = err;
  }
}

TEST(Muscl, VanAlbadaKeepsEdgeValuesBounded) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double wi = u(rng), wj = u(rng), slope = 3.0 * u(rng);
    const double delta = wj - wi;
    const double left = wi + 0.5 * van_albada(slope, delta);
    EXPECT_GE(left, std::min(wi, wj) - 1e-14);
    EXPECT_LE(left, std::max(wi, wj) + 1e-14);
  }
  EXPECT_EQ(van_albada(1.0, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(van_albada(2.0, 2.0), 2.0);
}

TEST(Boundary, StegerWarmingSplitSumsToPhysicalFlux) {
  const PrimitiveState w = free_stream(0.7);
  for (const Vec3& n : {Vec3(1, 0, 0), Vec3(0.6, -0.8, 0), Vec3(0, 0, -1)}) {
    const Conservative sum = split_flux(w, n, 1.0, kAir) + split_flux(w, n, -1.0, kAir);
    const Conservative exact = riemann::physical_flux(riemann::to_conservative(w, kAir), n, kAir);
    EXPECT_LE((sum - exact).norm(), 1e-12 * exact.norm());
  }
}

TEST(FreeStream, ResidualVanishesOnRefinedMesh) {
  const Mesh m = randomly_refined_box(3, 7);
  FluidContext ctx(m, kAir, free_stream());
  const FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  const auto r = convective_residual(ctx, s, compute_gradients(ctx, s));
  const double scale = riemann::physical_flux(s.W[0], Vec3(1, 0, 0), kAir).norm();
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_LE(r[i].norm(), 1e-12 * scale) << "node " << i;
  }
}

TEST(FreeStream, ThousandStepsStayUniform) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {3, 3, 3});
  FluidContext ctx(m, kAir, free_stream());
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  const Conservative ref = s.W[0];
  const double dt = stable_time_step(ctx, s);
  for (int k = 0; k < 1000; ++k) advance_fluid(ctx, s, dt);
  EXPECT_LE(max_deviation(ctx, s, ref), 1e-12);
}

TEST(ClosedBox, MassIsConserved) {
  const Mesh m = randomly_refined_box(4, 3, geometry::kAllSlip);
  FluidContext ctx(m, kAir, free_stream());
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const double bump = std::exp(-20.0 * (m.nodes()[i] - Vec3(0.4, 0.5, 0.6)).squaredNorm());
    s.W[i] = riemann::to_conservative({1.2 * (1 + 0.2 * bump), Vec3(30.0, 0.0, -10.0) * bump, 1.0e5 * (1 + 0.3 * bump)}, kAir);
  }
  const Conservative before = total_conserved(ctx, s);
  const double dt = stable_time_step(ctx, s);
  for (int k = 0; k < 1000; ++k) {
    const StepReport rep = advance_fluid(ctx, s, dt);
    EXPECT_EQ(rep.flux.boundary[0], 0.0);
  }
  const Conservative after = total_conserved(ctx, s);
  EXPECT_LE(std::abs(after[0] - before[0]), 1e-12 * before[0]);
  EXPECT_LE(std::abs(after[4] - before[4]), 1e-12 * before[4]);
}

TEST(MixedCell, AlphaConventions) {
  const Vec3 xi(0, 0, 0), xj(1, 0, 0);
  EXPECT_NEAR(mixed_cell_alpha(xi, xj, Vec3(0.5, 0, 0), 0.1), 0.0, 1e-15);
  EXPECT_NEAR(mixed_cell_alpha(xi, xj, xj, 0.1), 0.5, 1e-15);
  // Between V_i and the midpoint the value is extrapolated (negative alpha).
  EXPECT_NEAR(mixed_cell_alpha(xi, xj, Vec3(0.25, 0, 0), 0.1), -1.0, 1e-15);
  bool clamped = false;
  EXPECT_NEAR(mixed_cell_alpha(xi, xj, Vec3(0.01, 0, 0), 0.1, &clamped), -4.0, 1e-12);
  EXPECT_TRUE(clamped);
}

TEST(MixedCell, StationaryWallHasZeroNormalVelocity) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
    const PrimitiveState w{1.0 + 0.5 * u(rng), 50.0 * Vec3(u(rng), u(rng), u(rng)), 1.0e5};
    const PrimitiveState star = riemann::to_primitive(interface_state(w, n, Vec3::Zero(), kAir), kAir);
    EXPECT_LE(std::abs(star.v.dot(n)), 1e-13 * w.v.norm());
    const Vec3 tangential = w.v - w.v.dot(n) * n;
    EXPECT_LE((star.v - tangential).norm(), 1e-12 * w.v.norm());
  }
}

TEST(MixedCell, InterfaceFluxBookkeepingInClosedBox) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {8, 8, 8}, geometry::kAllSlip);
  const auto surf = box_cable(0.3);
  FluidContext ctx(m, kAir, free_stream());
  ctx.options().viscous = false;
  ctx.set_surface(&surf);
  std::size_t ghosts = 0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) ghosts += ctx.is_real(static_cast<Index>(i)) ? 0 : 1;
  ASSERT_GT(ghosts, 0u);
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  const Conservative before = total_conserved(ctx, s);
  Conservative through = Conservative::Zero();
  const double dt = stable_time_step(ctx, s);
  for (int k = 0; k < 100; ++k) through += advance_fluid(ctx, s, dt).flux.interface;
  const Conservative after = total_conserved(ctx, s);
  EXPECT_GT(std::abs(through[0]), 0.0);
  EXPECT_LE(std::abs(after[0] - before[0] + through[0]), 1e-12 * before[0]);
  EXPECT_LE(std::abs(after[4] - before[4] + through[4]), 1e-12 * before[4]);
}

TEST(MixedCell, FluidAtRestAroundCableStaysAtRest) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6}, geometry::kAllSlip);
  const auto surf = box_cable(0.3);
  PrimitiveState rest{1.2, Vec3::Zero(), 1.0e5};
  FluidContext ctx(m, kAir, rest);
  ctx.set_surface(&surf);
  FluidState s = uniform_state(m.num_nodes(), rest, kAir);
  const Conservative ref = s.W[0];
  for (int k = 0; k < 50; ++k) advance_fluid(ctx, s, stable_time_step(ctx, s));
  EXPECT_LE(max_deviation(ctx, s, ref), 1e-12);
}

TEST(Ghosts, UniformFieldPopulatesUniformEntries) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const auto surf = box_cable(0.4);
  FluidContext ctx(m, kAir, free_stream());
  ctx.set_surface(&surf);
  const FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  const GhostPopulation pop = populate_ghosts_local(ctx, s);
  ASSERT_FALSE(pop.entries.empty());
  const PrimitiveState w = free_stream();
  const double t = kAir.temperature(w.rho, w.p);
  std::map<Index, std::set<Index>> cells_of_ghost;
  for (const GhostEntry& e : pop.entries) {
    EXPECT_LE((e.velocity - w.v).norm(), 1e-10 * w.v.norm());
    EXPECT_NEAR(e.temperature, t, 1e-10 * t);
    cells_of_ghost[e.node].insert(e.tet);
  }
  // One entry per mixed cell touching the ghost node.
  for (const auto& [node, cells] : cells_of_ghost) {
    std::size_t mixed = 0;
    for (Index tet : m.node_tets(node)) {
      bool real = false;
      for (Index v : m.tets()[tet].v) real = real || ctx.is_real(v);
      mixed += real ? 1 : 0;
    }
    EXPECT_EQ(cells.size(), mixed);
    EXPECT_EQ(pop.entries_of_node(node).size(), mixed);
  }
}

TEST(Ghosts, EntriesDependOnlyOnTheirCellsRealNodes) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const auto surf = box_cable(0.4);
  FluidContext ctx(m, kAir, free_stream());
  ctx.set_surface(&surf);
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  // Two different states above and below the cable axis.
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    const bool above = m.nodes()[i].z() > 0.5;
    s.W[i] = riemann::to_conservative({1.2, Vec3(above ? 100.0 : -40.0, 0.0, 0.0), above ? 1.0e5 : 0.8e5}, kAir);
  }
  const GhostPopulation base = populate_ghosts_local(ctx, s);
  std::set<Index> sources;
  for (const GhostEntry& e : base.entries) sources.insert(e.sources.begin(), e.sources.end());
  std::size_t touched = 0;
  for (Index src : sources) {
    FluidState p = s;
    p.W[src][1] += 5.0;  // perturb x momentum
    const GhostPopulation q = populate_ghosts_local(ctx, p);
    ASSERT_EQ(q.entries.size(), base.entries.size());
    for (std::size_t k = 0; k < base.entries.size(); ++k) {
      const bool listed = std::count(base.entries[k].sources.begin(), base.entries[k].sources.end(), src) > 0;
      const bool changed = q.entries[k].velocity != base.entries[k].velocity;
      // A linear extrapolation may give a listed source zero weight, never the reverse.
      if (changed) EXPECT_TRUE(listed) << "entry " << k << " source " << src;
      touched += changed ? 1 : 0;
    }
  }
  EXPECT_GT(touched, 0u);
}

TEST(Diffusive, UniformFlowHasNoViscousResidual) {
  const Mesh m = randomly_refined_box(3, 2);
  FluidContext ctx(m, kAir, free_stream());
  const FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  for (const Conservative& g : diffusive_residual(ctx, s, {})) EXPECT_LE(g.norm(), 1e-12);
}

TEST(Diffusive, CouetteProfileHasConstantStress) {
  const Mesh m = randomly_refined_box(4, 9);
  FluidContext ctx(m, kAir, free_stream());
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  const double a = 40.0, rho = 1.2, p = 1.0e5;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    s.W[i] = riemann::to_conservative({rho, Vec3(a * m.nodes()[i].y(), 0.0, 0.0), p}, kAir);
  }
  const auto g = diffusive_residual(ctx, s, {});
  const double mu = kAir.viscosity(kAir.temperature(rho, p));
  std::size_t interior = 0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    if (ctx.dual().boundary_closure[i].norm() > 0.0) continue;
    ++interior;
    const double vol = ctx.dual().volume[i];
    EXPECT_LE(g[i].segment<3>(1).norm(), 1e-12 * mu * a) << "node " << i;
    // Viscous heating mu a^2 integrated over the dual cell.
    EXPECT_NEAR(g[i][4], mu * a * a * vol, 1e-9 * mu * a * a * vol);
  }
  EXPECT_GT(interior, 0u);
}

TEST(Tractions, UniformPressureOnClosedSurface) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const auto surf = box_cable(0.3);
  PrimitiveState rest{1.2, Vec3::Zero(), 1.0e5};
  FluidContext ctx(m, kAir, rest);
  ctx.set_surface(&surf);
  const FluidState s = uniform_state(m.num_nodes(), rest, kAir);
  const auto grad = compute_gradients(ctx, s);
  for (int q : {1, 3}) {
    TractionOptions opt;
    opt.quadrature_points = q;
    const auto samples = sample_tractions(ctx, s, grad, surf, opt);
    ASSERT_EQ(samples.size(), surf.num_triangles() * q);
    for (const TractionSample& t : samples) {
      EXPECT_LE((t.traction + rest.p * t.normal).norm(), 1e-9 * rest.p);
      EXPECT_GT(t.h, 0.0);
    }
    const auto f = integrate_slave_forces(samples, surf);
    Vec3 sum = Vec3::Zero();
    for (const Vec3& v : f) sum += v;
    double area = 0.0;
    for (double ar : surf.areas()) area += ar;
    EXPECT_LE(sum.norm(), 1e-10 * rest.p * area);
    EXPECT_LE((sum - total_force(samples)).norm(), 1e-9 * rest.p * area);
  }
}

TEST(Tractions, OnePointRuleSplitsEvenly) {
  const std::vector<Vec3> nodes = {{0.4, 0.4, 0.5}, {0.6, 0.4, 0.5}, {0.4, 0.6, 0.5}};
  const surface::EmbeddedSurface tri(nodes, {{0, 1, 2}}, {{0, 1, 2}});
  TractionSample s;
  s.triangle = 0;
  s.bary = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  s.weight = tri.areas()[0];
  s.traction = Vec3(1.0, -2.0, 3.0);
  const auto f = integrate_slave_forces({s}, tri);
  for (const Vec3& v : f) EXPECT_LE((v - s.traction * tri.areas()[0] / 3.0).norm(), 1e-16);
}

TEST(Reinit, UncoveredNodesTakeNeighbourAverage) {
  const Mesh m = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {6, 6, 6});
  const auto surf = box_cable(0.4);
  FluidContext ctx(m, kAir, free_stream());
  ctx.set_surface(&surf);
  const auto covered = ctx.interface().status;
  FluidState s = uniform_state(m.num_nodes(), free_stream(), kAir);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    if (covered[i] == surface::NodeStatus::Ghost) s.W[i].setConstant(-1.0);
  }
  ctx.set_surface(nullptr);
  const std::size_t n = reinitialize_uncovered(ctx, s, covered);
  EXPECT_GT(n, 0u);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) EXPECT_LE((s.W[i] - s.W[0]).norm(), 1e-9 * s.W[0].norm());
}
