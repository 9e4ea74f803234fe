#pragma once

#include "cablefsi/geometry/mesh.hpp"
#include "cablefsi/vtk.hpp"

#include <filesystem>
#include <iosfwd>

namespace cablefsi::geometry {

/// ASCII mesh format:
///
///   <node count>
///   x y z                      (one line per node)
///   <element count>
///   n0 n1 n2 n3                (0-based node ids)
///   [<boundary face count>
///    f0 f1 f2 tag]             (tag: inflow | outflow | slip | farfield)
///
/// Elements are given bisection order with the longest edge as refinement edge.
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::filesystem::path& path);

/// Writes the same format; element node order is the bisection order.
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

/// VTK grid of the mesh with no point data attached.
vtk::UnstructuredGrid to_vtk(const Mesh& mesh);

}  // namespace cablefsi::geometry
