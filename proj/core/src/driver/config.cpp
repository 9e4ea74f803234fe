#include "cablefsi/driver/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cablefsi::driver {

namespace {

std::string key_error(const std::string& key, const std::string& what) {
  return "config key '" + key + "': " + what;
}

// Dotted path -> leaf node (scalars and sequences).
void flatten(const YAML::Node& node, const std::string& prefix, std::map<std::string, YAML::Node>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? k : prefix + "." + k, out);
    }
    return;
  }
  if (prefix.empty()) throw ConfigError("config must be a mapping of keys to values");
  out[prefix] = node;
}

template <typename T>
T as(const std::string& key, const YAML::Node& n) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key_error(key, "cannot parse value"));
  }
}

Vec3 as_vec3(const std::string& key, const YAML::Node& n) {
  const auto v = as<std::vector<double>>(key, n);
  if (v.size() != 3) throw ConfigError(key_error(key, "expected a list of 3 numbers"));
  return {v[0], v[1], v[2]};
}

Support as_support(const std::string& key, const YAML::Node& n) {
  const auto s = as<std::string>(key, n);
  if (s == "free") return Support::Free;
  if (s == "pinned") return Support::Pinned;
  if (s == "clamped") return Support::Clamped;
  throw ConfigError(key_error(key, "expected free, pinned or clamped"));
}

using Setter = std::function<void(RunConfig&, const std::string&, const YAML::Node&)>;

template <typename T>
Setter field(T RunConfig::*member) {
  return [member](RunConfig& c, const std::string& k, const YAML::Node& n) { c.*member = as<T>(k, n); };
}

#define CFG_SET(expr, type) [](RunConfig& c, const std::string& k, const YAML::Node& n) { expr = as<type>(k, n); }
#define CFG_VEC(expr) [](RunConfig& c, const std::string& k, const YAML::Node& n) { expr = as_vec3(k, n); }

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"gas.gamma", CFG_SET(c.gas.gamma, double)},
      {"gas.gas_constant", CFG_SET(c.gas.gas_constant, double)},
      {"gas.viscous", field(&RunConfig::viscous)},
      {"gas.sutherland_mu0", CFG_SET(c.gas.mu0, double)},
      {"gas.sutherland_t0", CFG_SET(c.gas.sutherland_t0, double)},
      {"gas.prandtl", CFG_SET(c.gas.prandtl, double)},

      {"farfield.density", CFG_SET(c.farfield.density, double)},
      {"farfield.pressure", CFG_SET(c.farfield.pressure, double)},
      {"farfield.mach", CFG_SET(c.farfield.mach, double)},
      {"farfield.direction", CFG_VEC(c.farfield.direction)},

      {"fluid.cfl", CFG_SET(c.fluid.cfl, double)},
      {"fluid.second_order", CFG_SET(c.fluid.second_order, bool)},
      {"fluid.isothermal_wall", CFG_SET(c.fluid.isothermal_wall, bool)},
      {"fluid.wall_temperature", CFG_SET(c.fluid.wall_temperature, double)},
      {"fluid.alpha_min", CFG_SET(c.fluid.alpha_min, double)},
      {"fluid.max_step_halvings", CFG_SET(c.fluid.max_step_halvings, int)},

      {"traction.quadrature_points", CFG_SET(c.traction.quadrature_points, int)},
      {"traction.shift", CFG_SET(c.traction.shift, bool)},
      {"traction.max_retries", CFG_SET(c.traction.max_retries, int)},

      {"mesh.file", [](RunConfig& c, const std::string& k, const YAML::Node& n) { c.mesh.file = as<std::string>(k, n); }},
      {"mesh.box_min", CFG_VEC(c.mesh.box.lo)},
      {"mesh.box_max", CFG_VEC(c.mesh.box.hi)},
      {"mesh.resolution",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) {
         const auto r = as<std::vector<int>>(k, n);
         if (r.size() != 3) throw ConfigError(key_error(k, "expected a list of 3 integers"));
         c.mesh.resolution = {r[0], r[1], r[2]};
       }},
      {"mesh.sides",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) {
         const auto s = as<std::vector<std::string>>(k, n);
         if (s.size() != 6) throw ConfigError(key_error(k, "expected 6 tags (x-, x+, y-, y+, z-, z+)"));
         for (int i = 0; i < 6; ++i) {
           try {
             c.mesh.sides[i] = geometry::boundary_tag_from_string(s[i]);
           } catch (const ConfigError& e) {
             throw ConfigError(key_error(k, e.what()));
           }
         }
       }},

      {"cable.start", CFG_VEC(c.cable.start)},
      {"cable.end", CFG_VEC(c.cable.end)},
      {"cable.elements", CFG_SET(c.cable.elements, int)},
      {"cable.diameter", CFG_SET(c.cable.diameter, double)},
      {"cable.youngs_modulus", CFG_SET(c.cable.youngs_modulus, double)},
      {"cable.poisson_ratio", CFG_SET(c.cable.poisson_ratio, double)},
      {"cable.density", CFG_SET(c.cable.density, double)},
      {"cable.start_support",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) { c.cable.start_support = as_support(k, n); }},
      {"cable.end_support",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) { c.cable.end_support = as_support(k, n); }},
      {"cable.rayleigh_alpha", CFG_SET(c.cable.rayleigh_alpha, double)},
      {"cable.fixed", CFG_SET(c.cable.fixed, bool)},
      {"cable.initial_velocity", CFG_VEC(c.cable.initial_velocity)},

      {"surface.sides", CFG_SET(c.surface.sides, int)},
      {"surface.sections_per_element", CFG_SET(c.surface.sections_per_element, int)},
      {"surface.caps", CFG_SET(c.surface.caps, bool)},

      {"coupling.dt", CFG_SET(c.coupling.dt, double)},
      {"coupling.steps", CFG_SET(c.coupling.steps, int)},
      {"coupling.steady_steps", CFG_SET(c.coupling.steady_steps, int)},
      {"coupling.integrator",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) {
         const auto s = as<std::string>(k, n);
         if (s == "midpoint") {
           c.coupling.integrator = Integrator::Midpoint;
         } else if (s == "central_difference") {
           c.coupling.integrator = Integrator::CentralDifference;
         } else {
           throw ConfigError(key_error(k, "expected midpoint or central_difference"));
         }
       }},
      {"coupling.max_subcycles", CFG_SET(c.coupling.max_subcycles, int)},
      {"coupling.zero_loads", CFG_SET(c.coupling.zero_loads, bool)},

      {"amr.doubly_intersected", CFG_SET(c.amr.criteria.doubly_intersected, bool)},
      {"amr.min_edge_length", CFG_SET(c.amr.criteria.min_edge_length, double)},
      {"amr.distance", CFG_SET(c.amr.criteria.distance, bool)},
      {"amr.distance_band", CFG_SET(c.amr.criteria.distance_band, double)},
      {"amr.near_wall_size", CFG_SET(c.amr.criteria.near_wall_size, double)},
      {"amr.hessian", CFG_SET(c.amr.criteria.hessian, bool)},
      {"amr.hessian_threshold", CFG_SET(c.amr.criteria.hessian_threshold, double)},
      {"amr.feature_size", CFG_SET(c.amr.criteria.feature_size, double)},
      {"amr.initial_cycles", CFG_SET(c.amr.initial_cycles, int)},
      {"amr.period", CFG_SET(c.amr.period, int)},
      {"amr.node_budget", CFG_SET(c.amr.node_budget, std::size_t)},

      {"output.directory",
       [](RunConfig& c, const std::string& k, const YAML::Node& n) { c.output.directory = as<std::string>(k, n); }},
      {"output.history_every", CFG_SET(c.output.history_every, int)},
      {"output.forces_every", CFG_SET(c.output.forces_every, int)},
      {"output.vtk_every", CFG_SET(c.output.vtk_every, int)},
      {"output.checkpoint_every", CFG_SET(c.output.checkpoint_every, int)},
      {"output.audit", CFG_SET(c.output.audit, bool)},
      {"output.probe_nodes", CFG_SET(c.output.probe_nodes, std::vector<int>)},

      {"run.seed", CFG_SET(c.seed, std::uint64_t)},
      {"run.perturbation", CFG_SET(c.perturbation, double)},
  };
  return table;
}

#undef CFG_SET
#undef CFG_VEC

// Physics parameters have no defaults.
const std::vector<std::string> kRequired = {
    "gas.gamma",          "gas.gas_constant",   "gas.viscous",       "farfield.density",
    "farfield.pressure",  "farfield.mach",      "farfield.direction", "cable.start",
    "cable.end",          "cable.elements",     "cable.diameter",    "cable.youngs_modulus",
    "cable.poisson_ratio", "cable.density",     "cable.start_support", "cable.end_support",
    "coupling.dt",        "coupling.steps",
};

const std::vector<std::string> kRequiredViscous = {"gas.sutherland_mu0", "gas.sutherland_t0", "gas.prandtl"};

}  // namespace

fluid::PrimitiveState RunConfig::farfield_state() const {
  fluid::PrimitiveState w;
  w.rho = farfield.density;
  w.p = farfield.pressure;
  w.v = farfield.mach * gas.sound_speed(w.rho, w.p) * farfield.direction.normalized();
  return w;
}

void RunConfig::validate() const {
  const auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key_error(key, what));
  };
  require(gas.gamma > 1.0, "gas.gamma", "must exceed 1");
  require(gas.gas_constant > 0.0, "gas.gas_constant", "must be positive");
  if (viscous) {
    require(gas.mu0 > 0.0, "gas.sutherland_mu0", "must be positive");
    require(gas.sutherland_t0 > 0.0, "gas.sutherland_t0", "must be positive");
    require(gas.prandtl > 0.0, "gas.prandtl", "must be positive");
  }
  require(farfield.density > 0.0, "farfield.density", "must be positive");
  require(farfield.pressure > 0.0, "farfield.pressure", "must be positive");
  require(farfield.mach >= 0.0, "farfield.mach", "must be non-negative");
  require(farfield.direction.norm() > 0.0, "farfield.direction", "must be non-zero");
  require(fluid.cfl > 0.0 && fluid.cfl <= 1.0, "fluid.cfl", "must be in (0, 1]");
  require(fluid.alpha_min > 0.0 && fluid.alpha_min < 0.5, "fluid.alpha_min", "must be in (0, 0.5)");
  require(fluid.wall_temperature > 0.0, "fluid.wall_temperature", "must be positive");
  require(fluid.max_step_halvings >= 0, "fluid.max_step_halvings", "must be non-negative");
  require(traction.quadrature_points == 1 || traction.quadrature_points == 3, "traction.quadrature_points",
          "must be 1 or 3");
  require(traction.max_retries >= 0, "traction.max_retries", "must be non-negative");
  if (mesh.file.empty()) {
    require((mesh.box.hi - mesh.box.lo).minCoeff() > 0.0, "mesh.box_max", "must exceed mesh.box_min");
    require(mesh.resolution[0] > 0 && mesh.resolution[1] > 0 && mesh.resolution[2] > 0, "mesh.resolution",
            "must be positive");
  }
  require((cable.end - cable.start).norm() > 0.0, "cable.end", "must differ from cable.start");
  require(cable.elements >= 1, "cable.elements", "must be at least 1");
  require(cable.diameter > 0.0, "cable.diameter", "must be positive");
  require(cable.youngs_modulus > 0.0, "cable.youngs_modulus", "must be positive");
  require(cable.poisson_ratio > -1.0 && cable.poisson_ratio < 0.5, "cable.poisson_ratio", "must be in (-1, 0.5)");
  require(cable.density > 0.0, "cable.density", "must be positive");
  require(cable.rayleigh_alpha >= 0.0, "cable.rayleigh_alpha", "must be non-negative");
  require(surface.sides >= 3, "surface.sides", "must be at least 3");
  require(surface.sections_per_element >= 1, "surface.sections_per_element", "must be at least 1");
  require(coupling.dt > 0.0, "coupling.dt", "must be positive");
  require(coupling.steps >= 0, "coupling.steps", "must be non-negative");
  require(coupling.steady_steps >= 0, "coupling.steady_steps", "must be non-negative");
  require(coupling.max_subcycles >= 1, "coupling.max_subcycles", "must be at least 1");
  require(amr.initial_cycles >= 0, "amr.initial_cycles", "must be non-negative");
  require(amr.period >= 0, "amr.period", "must be non-negative");
  require(amr.node_budget > 0, "amr.node_budget", "must be positive");
  try {
    amr.criteria.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config key ") + e.what());
  }
  require(output.history_every >= 1, "output.history_every", "must be at least 1");
  require(output.forces_every >= 0, "output.forces_every", "must be non-negative");
  require(output.vtk_every >= 0, "output.vtk_every", "must be non-negative");
  require(output.checkpoint_every >= 0, "output.checkpoint_every", "must be non-negative");
  for (int p : output.probe_nodes) {
    require(p >= 0 && p <= cable.elements, "output.probe_nodes", "node id out of range");
  }
  require(perturbation >= 0.0, "run.perturbation", "must be non-negative");
}

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  std::map<std::string, YAML::Node> leaves;
  if (!root.IsNull()) flatten(root, "", leaves);

  RunConfig c;
  const auto& table = setters();
  for (const auto& [key, node] : leaves) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(c, key, node);
  }
  for (const auto& key : kRequired) {
    if (!leaves.count(key)) throw ConfigError("missing required config key '" + key + "'");
  }
  if (c.viscous) {
    for (const auto& key : kRequiredViscous) {
      if (!leaves.count(key)) throw ConfigError("missing required config key '" + key + "'");
    }
  }
  if (c.mesh.file.empty()) {
    for (const char* key : {"mesh.box_min", "mesh.box_max", "mesh.resolution"}) {
      if (!leaves.count(key)) throw ConfigError(std::string("missing required config key '") + key + "'");
    }
  }
  c.fluid.viscous = c.viscous;
  c.traction.viscous = c.viscous;
  c.validate();
  c.farfield.direction.normalize();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig c = parse_config(text.str());
  // Relative mesh files resolve against the config's directory.
  if (!c.mesh.file.empty() && c.mesh.file.is_relative()) c.mesh.file = path.parent_path() / c.mesh.file;
  return c;
}

}  // namespace cablefsi::driver
