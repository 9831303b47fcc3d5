/// @file mesh_io.hpp
/// Mesh serialization: a JSON interchange format (documented in
/// docs/formats.md) and legacy-ASCII VTK export for visualization.
#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "fvrom/mesh.hpp"

namespace fvrom {

nlohmann::json mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& j);

void write_mesh_json(const std::string& path, const Mesh& mesh);
Mesh read_mesh_json(const std::string& path);

/// Writes a legacy-ASCII VTK POLYDATA file with the mesh cells as polygons.
/// Scalar cell fields are written as CELL_DATA scalars, vector cell fields as
/// CELL_DATA vectors, and point displacement fields as POINT_DATA vectors.
void write_vtk(const std::string& path, const Mesh& mesh,
               const std::map<std::string, CellField>& cell_fields = {},
               const std::map<std::string, PointField>& point_fields = {});

}  // namespace fvrom
