#include "fvrom/mesh_io.hpp"

#include <fstream>
#include <stdexcept>

namespace fvrom {

nlohmann::json mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  auto& points = j["points"] = nlohmann::json::array();
  for (const Vec2& p : mesh.points()) points.push_back({p.x(), p.y()});
  j["cells"] = mesh.cells();
  auto& faces = j["faces"] = nlohmann::json::array();
  for (const Face& f : mesh.faces()) {
    nlohmann::json jf;
    jf["points"] = {f.pts[0], f.pts[1]};
    jf["owner"] = f.owner;
    if (f.is_boundary()) {
      jf["neighbour"] = nullptr;
      jf["patch"] = f.patch;
    } else {
      jf["neighbour"] = f.neighbour;
      jf["patch"] = nullptr;
    }
    faces.push_back(std::move(jf));
  }
  j["patches"] = mesh.patch_names();
  return j;
}

Mesh mesh_from_json(const nlohmann::json& j) {
  for (const char* key : {"points", "cells", "faces", "patches"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("mesh_from_json: missing '") + key + "' array");

  std::vector<Vec2> points;
  for (const auto& jp : j.at("points")) {
    if (!jp.is_array() || jp.size() != 2)
      throw std::invalid_argument("mesh_from_json: each point must be [x, y]");
    points.emplace_back(jp[0].get<double>(), jp[1].get<double>());
  }
  std::vector<std::vector<int>> cells = j.at("cells").get<std::vector<std::vector<int>>>();
  std::vector<std::string> patch_names = j.at("patches").get<std::vector<std::string>>();

  std::vector<Face> faces;
  for (const auto& jf : j.at("faces")) {
    Face f;
    const auto& pts = jf.at("points");
    f.pts = {pts.at(0).get<int>(), pts.at(1).get<int>()};
    f.owner = jf.at("owner").get<int>();
    if (jf.contains("neighbour") && !jf.at("neighbour").is_null())
      f.neighbour = jf.at("neighbour").get<int>();
    if (jf.contains("patch") && !jf.at("patch").is_null())
      f.patch = jf.at("patch").get<int>();
    faces.push_back(f);
  }
  return Mesh(std::move(points), std::move(cells), std::move(faces), std::move(patch_names));
}

void write_mesh_json(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_json: cannot open " + path);
  out << mesh_to_json(mesh).dump(1) << "\n";
}

Mesh read_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mesh_json: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return mesh_from_json(j);
}

namespace {

void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  os << buf;
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh,
               const std::map<std::string, CellField>& cell_fields,
               const std::map<std::string, PointField>& point_fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);

  out << "# vtk DataFile Version 3.0\n";
  out << "fvrom mesh\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << mesh.n_points() << " double\n";
  for (const Vec2& p : mesh.points()) {
    write_double(out, p.x());
    out << ' ';
    write_double(out, p.y());
    out << " 0\n";
  }

  std::size_t list_len = 0;
  for (const auto& cell : mesh.cells()) list_len += cell.size() + 1;
  out << "POLYGONS " << mesh.n_cells() << ' ' << list_len << "\n";
  for (const auto& cell : mesh.cells()) {
    out << cell.size();
    for (int p : cell) out << ' ' << p;
    out << "\n";
  }

  if (!cell_fields.empty()) {
    out << "CELL_DATA " << mesh.n_cells() << "\n";
    for (const auto& [name, field] : cell_fields) {
      if (field.n_cells() != mesh.n_cells())
        throw std::invalid_argument("write_vtk: cell field '" + name + "' has wrong size");
      if (field.components == 1) {
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (int c = 0; c < mesh.n_cells(); ++c) {
          write_double(out, field.at(c));
          out << "\n";
        }
      } else if (field.components == 2) {
        out << "VECTORS " << name << " double\n";
        for (int c = 0; c < mesh.n_cells(); ++c) {
          write_double(out, field.at(c, 0));
          out << ' ';
          write_double(out, field.at(c, 1));
          out << " 0\n";
        }
      } else {
        throw std::invalid_argument("write_vtk: unsupported component count for '" + name + "'");
      }
    }
  }

  if (!point_fields.empty()) {
    out << "POINT_DATA " << mesh.n_points() << "\n";
    for (const auto& [name, field] : point_fields) {
      if (static_cast<int>(field.size()) != mesh.n_points())
        throw std::invalid_argument("write_vtk: point field '" + name + "' has wrong size");
      out << "VECTORS " << name << " double\n";
      for (const Vec2& v : field) {
        write_double(out, v.x());
        out << ' ';
        write_double(out, v.y());
        out << " 0\n";
      }
    }
  }
}

}  // namespace fvrom
