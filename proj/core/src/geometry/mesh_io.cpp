#include "cablefsi/geometry/mesh_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace cablefsi::geometry {

namespace {

std::string next_data_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return line;
  }
  throw GeometryError(std::string("mesh file truncated while reading ") + what);
}

std::size_t read_count(std::istream& in, const char* what) {
  std::istringstream ss(next_data_line(in, what));
  long long n = -1;
  if (!(ss >> n) || n < 0) throw GeometryError(std::string("invalid ") + what + " count");
  return static_cast<std::size_t>(n);
}

// Longest edge (ties broken by node ids) becomes the refinement edge v0-v3.
Tet longest_edge_order(const std::vector<Vec3>& x, std::array<Index, 4> v) {
  std::sort(v.begin(), v.end());
  double best = -1.0;
  int bi = 0, bj = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const double len = (x[v[j]] - x[v[i]]).squaredNorm();
      if (len > best) {
        best = len;
        bi = i;
        bj = j;
      }
    }
  Tet t;
  t.v[0] = v[bi];
  t.v[3] = v[bj];
  int k = 1;
  for (int i = 0; i < 4; ++i)
    if (i != bi && i != bj) t.v[k++] = v[i];
  t.tag = 3;
  return t;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  const auto n_nodes = read_count(in, "node");
  std::vector<Vec3> nodes(n_nodes);
  for (auto& p : nodes) {
    std::istringstream ss(next_data_line(in, "nodes"));
    if (!(ss >> p.x() >> p.y() >> p.z())) throw GeometryError("malformed node line");
  }
  const auto n_tets = read_count(in, "element");
  std::vector<Tet> tets(n_tets);
  for (auto& t : tets) {
    std::istringstream ss(next_data_line(in, "elements"));
    std::array<Index, 4> v{};
    if (!(ss >> v[0] >> v[1] >> v[2] >> v[3])) throw GeometryError("malformed element line");
    for (Index id : v) {
      if (id < 0 || id >= static_cast<Index>(n_nodes))
        throw GeometryError("element references missing node " + std::to_string(id));
    }
    int tag = 0;
    if (ss >> tag) {
      t.v = v;
      t.tag = tag;
    } else {
      t = longest_edge_order(nodes, v);
    }
  }

  std::vector<BoundaryFace> faces;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream count_ss(line);
    long long n = -1;
    if (!(count_ss >> n) || n < 0) throw GeometryError("invalid boundary face count");
    faces.resize(static_cast<std::size_t>(n));
    for (auto& f : faces) {
      std::istringstream ss(next_data_line(in, "boundary faces"));
      std::string tag;
      if (!(ss >> f.v[0] >> f.v[1] >> f.v[2] >> tag)) throw GeometryError("malformed face line");
      try {
        f.tag = boundary_tag_from_string(tag);
      } catch (const ConfigError& e) {
        throw GeometryError(e.what());
      }
    }
    break;
  }
  return Mesh(std::move(nodes), std::move(tets), faces);
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("cannot open mesh file '" + path.string() + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out.precision(17);
  out << mesh.num_nodes() << '\n';
  for (const auto& p : mesh.nodes()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  out << mesh.num_tets() << '\n';
  for (const auto& t : mesh.tets())
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.v[3] << ' ' << t.tag << '\n';
  out << mesh.boundary_faces().size() << '\n';
  for (const auto& f : mesh.boundary_faces())
    out << f.v[0] << ' ' << f.v[1] << ' ' << f.v[2] << ' ' << to_string(f.tag) << '\n';
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_mesh(out, mesh);
}

vtk::UnstructuredGrid to_vtk(const Mesh& mesh) {
  vtk::UnstructuredGrid grid;
  grid.points = mesh.nodes();
  grid.cell_type = vtk::CellType::Tetra;
  grid.cells.reserve(mesh.num_tets());
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const auto o = mesh.oriented(static_cast<Index>(t));
    grid.cells.emplace_back(o.begin(), o.end());
  }
  return grid;
}

}  // namespace cablefsi::geometry
