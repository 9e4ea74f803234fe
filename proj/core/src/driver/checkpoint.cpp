// Checkpoint format: one JSON document,
//
//   { "format": "cablefsi-checkpoint", "version": 1,
//     "step", "time",
//     "mesh":  { "nodes": [x y z ...], "tets": [v0 v1 v2 v3 tag ...], "faces": [f0 f1 f2 tag ...] },
//     "flow":  [W0 ... W4 per node],
//     "cable": { "u", "theta", "velocity", "omega": [x y z per node], "time" },
//     "mass":  { "initial", "boundary", "interface", "status", "amr" },
//     "history": { "probe_nodes": [...], "rows": [ {...}, ... ] } }
//
// Doubles are written with round-trip precision, so a restart reproduces the
// interrupted run bit for bit.

#include "cablefsi/driver/simulation.hpp"

#include "cablefsi/log.hpp"

#include <json.hpp>

#include <fstream>

namespace cablefsi::driver {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "cablefsi-checkpoint";
constexpr int kVersion = 1;

json flat(const std::vector<Vec3>& v) {
  json a = json::array();
  for (const Vec3& x : v) a.insert(a.end(), {x.x(), x.y(), x.z()});
  return a;
}

std::vector<Vec3> unflat(const json& a, std::size_t expected, const char* what) {
  if (a.size() != 3 * expected) throw ConfigError(std::string("checkpoint field '") + what + "' has the wrong size");
  std::vector<Vec3> v(expected);
  for (std::size_t i = 0; i < expected; ++i) v[i] = Vec3(a[3 * i], a[3 * i + 1], a[3 * i + 2]);
  return v;
}

json vec(const Vec3& x) { return {x.x(), x.y(), x.z()}; }
Vec3 vec(const json& a) { return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}; }

json row_to_json(const HistoryRow& r) {
  json probes = json::array();
  for (const Vec3& u : r.probe_displacement) probes.push_back(vec(u));
  return {{"step", r.step},
          {"time", r.time},
          {"phase", r.phase},
          {"force", vec(r.force)},
          {"drag", r.drag},
          {"lift", r.lift},
          {"probes", probes},
          {"fluid_mass", r.fluid_mass},
          {"mass_residual", r.mass_residual},
          {"interface_mass_flux", r.interface_mass_flux},
          {"boundary_mass_flux", r.boundary_mass_flux},
          {"sum_fS", vec(r.transfer.slave_force_sum)},
          {"sum_fN", vec(r.transfer.nodal_force_sum)},
          {"work_mismatch", r.transfer.work_mismatch},
          {"nodes", r.nodes},
          {"tets", r.tets},
          {"ghost_nodes", r.ghost_nodes},
          {"subcycles", r.subcycles},
          {"halvings", r.halvings}};
}

HistoryRow row_from_json(const json& j) {
  HistoryRow r;
  r.step = j.at("step");
  r.time = j.at("time");
  r.phase = j.at("phase");
  r.force = vec(j.at("force"));
  r.drag = j.at("drag");
  r.lift = j.at("lift");
  for (const auto& u : j.at("probes")) r.probe_displacement.push_back(vec(u));
  r.fluid_mass = j.at("fluid_mass");
  r.mass_residual = j.at("mass_residual");
  r.interface_mass_flux = j.at("interface_mass_flux");
  r.boundary_mass_flux = j.at("boundary_mass_flux");
  r.transfer.slave_force_sum = vec(j.at("sum_fS"));
  r.transfer.nodal_force_sum = vec(j.at("sum_fN"));
  r.transfer.work_mismatch = j.at("work_mismatch");
  r.nodes = j.at("nodes");
  r.tets = j.at("tets");
  r.ghost_nodes = j.at("ghost_nodes");
  r.subcycles = j.at("subcycles");
  r.halvings = j.at("halvings");
  return r;
}

}  // namespace

void Simulation::save_checkpoint(const std::filesystem::path& path) const {
  json mesh;
  mesh["nodes"] = flat(mesh_->nodes());
  json tets = json::array();
  for (const auto& t : mesh_->tets()) tets.insert(tets.end(), {t.v[0], t.v[1], t.v[2], t.v[3], t.tag});
  mesh["tets"] = tets;
  json faces = json::array();
  for (const auto& f : mesh_->boundary_faces()) {
    faces.insert(faces.end(), {f.v[0], f.v[1], f.v[2], static_cast<int>(f.tag)});
  }
  mesh["faces"] = faces;

  json flow = json::array();
  for (const auto& W : flow_.W) {
    for (int k = 0; k < 5; ++k) flow.push_back(W[k]);
  }
  json cable = {{"u", flat(cable_state_.u)},
                {"theta", flat(cable_state_.theta)},
                {"velocity", flat(cable_state_.velocity)},
                {"omega", flat(cable_state_.omega)},
                {"time", cable_state_.time}};
  json rows = json::array();
  for (const HistoryRow& r : history_.rows) rows.push_back(row_to_json(r));

  json doc = {{"format", kFormat},
              {"version", kVersion},
              {"step", step_},
              {"time", time_},
              {"mesh", mesh},
              {"flow", flow},
              {"cable", cable},
              {"mass",
               {{"initial", mass_.initial},
                {"boundary", mass_.boundary},
                {"interface", mass_.interface},
                {"status", mass_.status},
                {"amr", mass_.amr}}},
              {"history", {{"probe_nodes", history_.probe_nodes}, {"rows", rows}}}};

  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    out << doc.dump();
  }
  std::filesystem::rename(tmp, path);
}

Simulation Simulation::from_checkpoint(RunConfig config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (doc.value("format", "") != kFormat || doc.value("version", 0) != kVersion) {
    throw ConfigError("unsupported checkpoint format in " + path.string());
  }

  Simulation sim;
  sim.config_ = std::move(config);
  sim.config_.validate();
  sim.build_structure();
  try {
    const json& m = doc.at("mesh");
    const std::size_t nn = m.at("nodes").size() / 3;
    std::vector<Vec3> nodes = unflat(m.at("nodes"), nn, "mesh.nodes");
    std::vector<geometry::Tet> tets;
    const json& t = m.at("tets");
    for (std::size_t k = 0; k + 4 < t.size(); k += 5) {
      tets.push_back({{t[k].get<Index>(), t[k + 1].get<Index>(), t[k + 2].get<Index>(), t[k + 3].get<Index>()},
                      t[k + 4].get<int>()});
    }
    std::vector<geometry::BoundaryFace> faces;
    const json& f = m.at("faces");
    for (std::size_t k = 0; k + 3 < f.size(); k += 4) {
      faces.push_back({{f[k].get<Index>(), f[k + 1].get<Index>(), f[k + 2].get<Index>()},
                       static_cast<geometry::BoundaryTag>(f[k + 3].get<int>())});
    }

    const json& c = doc.at("cable");
    const std::size_t cn = sim.cable_.num_nodes();
    sim.cable_state_.u = unflat(c.at("u"), cn, "cable.u");
    sim.cable_state_.theta = unflat(c.at("theta"), cn, "cable.theta");
    sim.cable_state_.velocity = unflat(c.at("velocity"), cn, "cable.velocity");
    sim.cable_state_.omega = unflat(c.at("omega"), cn, "cable.omega");
    sim.cable_state_.time = c.at("time");
    coupling::update_surface_motion(sim.pairing_, sim.cable_, sim.cable_state_, *sim.surface_);
    sim.rebuild_fluid(std::make_unique<geometry::Mesh>(std::move(nodes), std::move(tets), faces));

    const json& w = doc.at("flow");
    if (w.size() != 5 * nn) throw ConfigError("checkpoint flow field has the wrong size");
    sim.flow_.W.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      for (int k = 0; k < 5; ++k) sim.flow_.W[i][k] = w[5 * i + k];
    }
    sim.step_ = doc.at("step");
    sim.time_ = doc.at("time");
    sim.flow_.time = sim.time_;
    const json& mass = doc.at("mass");
    sim.mass_ = {mass.at("initial"), mass.at("boundary"), mass.at("interface"), mass.at("status"), mass.at("amr")};
    const json& h = doc.at("history");
    sim.history_.probe_nodes = h.at("probe_nodes").get<std::vector<int>>();
    for (const auto& r : h.at("rows")) sim.history_.rows.push_back(row_from_json(r));
  } catch (const json::exception& e) {
    throw ConfigError("incomplete checkpoint " + path.string() + ": " + e.what());
  }
  sim.compute_loads();
  logger()->info("restarted from {} at step {}", path.string(), sim.step_);
  return sim;
}

}  // namespace cablefsi::driver
