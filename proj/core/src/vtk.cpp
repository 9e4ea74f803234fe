#include "cablefsi/vtk.hpp"

#include <fstream>

namespace cablefsi::vtk {

void write(const std::filesystem::path& path, const UnstructuredGrid& grid,
           const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.precision(12);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << grid.points.size() << " double\n";
  for (const auto& p : grid.points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';

  std::size_t total = 0;
  for (const auto& c : grid.cells) total += c.size() + 1;
  out << "CELLS " << grid.cells.size() << ' ' << total << '\n';
  for (const auto& c : grid.cells) {
    out << c.size();
    for (Index v : c) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << grid.cells.size() << '\n';
  for (std::size_t i = 0; i < grid.cells.size(); ++i) out << static_cast<int>(grid.cell_type) << '\n';

  if (grid.scalars.empty() && grid.vectors.empty()) return;
  out << "POINT_DATA " << grid.points.size() << '\n';
  for (const auto& f : grid.scalars) {
    out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : f.values) out << v << '\n';
  }
  for (const auto& f : grid.vectors) {
    out << "VECTORS " << f.name << " double\n";
    for (const auto& v : f.values) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
}

}  // namespace cablefsi::vtk
