#pragma once

#include "cablefsi/common.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cablefsi::vtk {

enum class CellType : int { Triangle = 5, Tetra = 10 };

struct ScalarField {
  std::string name;
  std::vector<double> values;
};

struct VectorField {
  std::string name;
  std::vector<Vec3> values;
};

/// Legacy ASCII VTK unstructured grid with homogeneous cells and point data.
struct UnstructuredGrid {
  std::vector<Vec3> points;
  std::vector<std::vector<Index>> cells;
  CellType cell_type = CellType::Tetra;
  std::vector<ScalarField> scalars;
  std::vector<VectorField> vectors;
};

void write(const std::filesystem::path& path, const UnstructuredGrid& grid,
           const std::string& title = "cablefsi");

}  // namespace cablefsi::vtk
