#include "cablefsi/fluid/fluid.hpp"
#include "cablefsi/geometry/refine.hpp"
#include "cablefsi/log.hpp"
#include "cablefsi/riemann/riemann.hpp"
#include "cablefsi/surface/embedded_surface.hpp"
#include "cablefsi/surface/intersect.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace cablefsi;

namespace {

surface::EmbeddedSurface test_cable(double diameter) {
  std::vector<Vec3> line;
  for (int i = 0; i <= 12; ++i) line.emplace_back(0.513, 0.521, 0.1 + 0.8 * i / 12.0);
  return surface::generate_cable_surface(line, 8, diameter, true);
}

void BM_RoeFlux(benchmark::State& state) {
  const riemann::GasModel gas;
  const auto l = riemann::to_conservative({1.2, Vec3(100.0, 5.0, -3.0), 1.0e5}, gas);
  const auto r = riemann::to_conservative({1.1, Vec3(90.0, -2.0, 1.0), 0.9e5}, gas);
  const Vec3 nu(0.3, -0.2, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(riemann::roe_flux(l, r, nu, gas));
}
BENCHMARK(BM_RoeFlux);

void BM_EdgeIntersections(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mesh = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {n, n, n});
  const auto surf = test_cable(0.1);
  const surface::SurfaceIndex index(surf);
  for (auto _ : state) benchmark::DoNotOptimize(surface::EdgeIntersections(mesh, index));
  state.counters["edges"] = static_cast<double>(mesh.num_edges());
}
BENCHMARK(BM_EdgeIntersections)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RefineEdges(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mesh = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {n, n, n});
  std::vector<Index> marked;
  for (std::size_t e = 0; e < mesh.num_edges(); e += 7) marked.push_back(static_cast<Index>(e));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::refine_edges(mesh, marked));
}
BENCHMARK(BM_RefineEdges)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// One second-order viscous residual about an embedded cable.
void BM_Residual(benchmark::State& state) {
  set_log_level(spdlog::level::err);
  const int n = static_cast<int>(state.range(0));
  const riemann::GasModel gas;
  const fluid::PrimitiveState w{1.2, Vec3(170.0, 0.0, 0.0), 1.0e5};
  const auto mesh = geometry::build_box_mesh({Vec3::Zero(), Vec3::Ones()}, {n, n, n});
  const auto surf = test_cable(0.15);
  fluid::FluidContext ctx(mesh, gas, w);
  ctx.set_surface(&surf);
  const auto s = fluid::uniform_state(mesh.num_nodes(), w, gas);
  for (auto _ : state) {
    const auto grad = fluid::compute_gradients(ctx, s);
    auto f = fluid::convective_residual(ctx, s, grad);
    const auto g = fluid::diffusive_residual(ctx, s, fluid::populate_ghosts_local(ctx, s));
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += g[i];
    benchmark::DoNotOptimize(f);
  }
  state.counters["nodes"] = static_cast<double>(mesh.num_nodes());
}
BENCHMARK(BM_Residual)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
