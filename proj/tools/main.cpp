#include "cablefsi/driver/audit.hpp"
#include "cablefsi/driver/simulation.hpp"
#include "cablefsi/geometry/mesh_io.hpp"
#include "cablefsi/geometry/refine.hpp"
#include "cablefsi/log.hpp"
#include "cablefsi/riemann/riemann.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

using namespace cablefsi;

namespace {

struct ShockCase {
  const char* name;
  riemann::State1D left;
  riemann::State1D right;
};

// Standard one-dimensional test problems.
const ShockCase kShockCases[] = {
    {"sod", {1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}},
    {"lax", {0.445, 0.698, 3.528}, {0.5, 0.0, 0.571}},
    {"double_rarefaction", {1.0, -2.0, 0.4}, {1.0, 2.0, 0.4}},
    {"strong_left_blast", {1.0, 0.0, 1000.0}, {1.0, 0.0, 0.01}},
    {"strong_right_blast", {1.0, 0.0, 0.01}, {1.0, 0.0, 100.0}},
    {"colliding_shocks", {5.99924, 19.5975, 460.894}, {5.99242, -6.19633, 46.0950}},
};

int shocktube(double gamma, const std::string& output, int profile_points) {
  riemann::GasModel gas;
  gas.gamma = gamma;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw Error("cannot write " + output);
  }
  std::ostream& out = output.empty() ? std::cout : file;
  out.precision(17);
  out << "case,rho_l,u_l,p_l,rho_r,u_r,p_r,p_star,u_star,rho_star_l,rho_star_r,iterations\n";
  for (const ShockCase& c : kShockCases) {
    const riemann::StarRegion s = riemann::solve_riemann(c.left, c.right, gas);
    out << c.name << ',' << c.left.rho << ',' << c.left.u << ',' << c.left.p << ',' << c.right.rho << ','
        << c.right.u << ',' << c.right.p << ',' << s.p << ',' << s.u << ',' << s.rho_left << ',' << s.rho_right << ','
        << s.iterations << '\n';
  }
  if (profile_points > 0) {
    // Sod profile at t = 0.2 on x in [0, 1], diaphragm at 0.5.
    const ShockCase& sod = kShockCases[0];
    const riemann::StarRegion s = riemann::solve_riemann(sod.left, sod.right, gas);
    out << "\nx,rho,u,p\n";
    for (int i = 0; i < profile_points; ++i) {
      const double x = (i + 0.5) / profile_points;
      const riemann::State1D w = riemann::sample_riemann(sod.left, sod.right, s, (x - 0.5) / 0.2, gas);
      out << x << ',' << w.rho << ',' << w.u << ',' << w.p << '\n';
    }
  }
  return 0;
}

void print_mesh_summary(const geometry::Mesh& m) {
  std::cout << "nodes " << m.num_nodes() << "\ntets " << m.num_tets() << "\nedges " << m.num_edges()
            << "\nboundary_faces " << m.boundary_faces().size() << "\nvolume " << m.total_volume()
            << "\nmin_dihedral_deg " << geometry::min_dihedral_angle(m) * 180.0 / M_PI << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cable fluid-structure interaction toolkit"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::string log_level = "warn";
  app.add_option("--seed", seed, "Seed for randomized inputs (overrides run.seed)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));

  std::string config_path, restart;
  auto* run = app.add_subcommand("run", "Coupled fluid-structure run");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--restart", restart, "Resume from a checkpoint")->check(CLI::ExistingFile);

  auto* cfd = app.add_subcommand("cfd", "Flow about the rigid cable only");
  cfd->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  cfd->add_option("--restart", restart, "Resume from a checkpoint")->check(CLI::ExistingFile);

  double gamma = 1.4;
  std::string table;
  int profile = 0;
  auto* shock = app.add_subcommand("shocktube", "Exact Riemann solutions of standard test problems as CSV");
  shock->add_option("--gamma", gamma, "Ratio of specific heats")->check(CLI::Range(1.0 + 1e-9, 10.0));
  shock->add_option("--output", table, "CSV file (default stdout)");
  shock->add_option("--profile", profile, "Also sample the Sod profile at t = 0.2 on this many points");

  auto* mesh = app.add_subcommand("mesh", "Generate, refine or inspect meshes");
  mesh->require_subcommand(1);
  std::vector<double> lo{0, 0, 0}, hi{1, 1, 1};
  std::vector<int> res{4, 4, 4};
  std::string mesh_out, mesh_in, vtk_out;
  auto* gen = mesh->add_subcommand("generate", "Structured box mesh");
  gen->add_option("--min", lo, "Box corner")->expected(3);
  gen->add_option("--max", hi, "Box corner")->expected(3);
  gen->add_option("--resolution", res, "Cells per direction")->expected(3);
  gen->add_option("--output", mesh_out, "Mesh file")->required();
  gen->add_option("--vtk", vtk_out, "Also write a VTK file");
  int passes = 1;
  double longer_than = 0.0;
  auto* ref = mesh->add_subcommand("refine", "Bisect edges longer than a length (all edges by default)");
  ref->add_option("input", mesh_in, "Mesh file")->required()->check(CLI::ExistingFile);
  ref->add_option("--passes", passes, "Refinement passes")->check(CLI::PositiveNumber);
  ref->add_option("--longer-than", longer_than, "Only mark edges longer than this");
  ref->add_option("--output", mesh_out, "Mesh file")->required();
  ref->add_option("--vtk", vtk_out, "Also write a VTK file");
  auto* inspect = mesh->add_subcommand("inspect", "Print mesh statistics");
  inspect->add_option("input", mesh_in, "Mesh file")->required()->check(CLI::ExistingFile);

  int trials = 100;
  auto* check = app.add_subcommand("check", "Conservation and property audit on a config");
  check->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  check->add_option("--trials", trials, "Random configurations per check")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  set_log_level(spdlog::level::from_str(log_level));

  try {
    if (*run || *cfd) {
      driver::RunConfig config = driver::load_config(config_path);
      if (seed) config.seed = *seed;
      if (*cfd) config.cable.fixed = true;
      driver::RunOptions options;
      options.restart = restart;
      const auto history = driver::run_staggered(config, options);
      std::cout << "completed " << history.rows.size() << " coupling steps; output in "
                << config.output.directory.string() << '\n';
      return 0;
    }
    if (*shock) return shocktube(gamma, table, profile);
    if (*gen) {
      const auto m = geometry::build_box_mesh({to_vec({lo[0], lo[1], lo[2]}), to_vec({hi[0], hi[1], hi[2]})},
                                              {res[0], res[1], res[2]});
      geometry::write_mesh(mesh_out, m);
      if (!vtk_out.empty()) vtk::write(vtk_out, geometry::to_vtk(m));
      print_mesh_summary(m);
      return 0;
    }
    if (*ref) {
      geometry::Mesh m = geometry::read_mesh(mesh_in);
      for (int p = 0; p < passes; ++p) {
        std::vector<Index> marked;
        for (std::size_t e = 0; e < m.num_edges(); ++e) {
          if (m.edge_length(static_cast<Index>(e)) > longer_than) marked.push_back(static_cast<Index>(e));
        }
        m = geometry::refine_edges(m, marked).mesh;
      }
      geometry::write_mesh(mesh_out, m);
      if (!vtk_out.empty()) vtk::write(vtk_out, geometry::to_vtk(m));
      print_mesh_summary(m);
      return 0;
    }
    if (*inspect) {
      print_mesh_summary(geometry::read_mesh(mesh_in));
      return 0;
    }
    if (*check) {
      const driver::RunConfig config = driver::load_config(config_path);
      const auto results = driver::run_audit(config, seed.value_or(config.seed), trials);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << r.value << " tol=" << r.tolerance
                  << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
