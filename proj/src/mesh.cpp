#include "fvrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fvrom {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string face_label(int f, const Face& face) {
  std::ostringstream os;
  os << "face " << f << " (points " << face.pts[0] << "," << face.pts[1]
     << ", owner " << face.owner << ")";
  return os.str();
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> points, std::vector<std::vector<int>> cells,
           std::vector<Face> faces, std::vector<std::string> patch_names)
    : points_(std::move(points)),
      cells_(std::move(cells)),
      faces_(std::move(faces)),
      patch_names_(std::move(patch_names)) {
  build_adjacency();
  compute_geometry();
}

void Mesh::build_adjacency() {
  const int nc = n_cells();
  const int nf = n_faces();
  const int np = n_points();

  cell_faces_.assign(nc, {});
  patch_faces_.assign(patch_names_.size(), {});
  for (int f = 0; f < nf; ++f) {
    const Face& face = faces_[f];
    if (face.owner < 0 || face.owner >= nc)
      throw std::runtime_error("mesh: " + face_label(f, face) + " has invalid owner");
    cell_faces_[face.owner].push_back(f);
    if (face.is_boundary()) {
      if (face.patch < 0 || face.patch >= static_cast<int>(patch_names_.size()))
        throw std::runtime_error("mesh: boundary " + face_label(f, face) + " has no patch");
      patch_faces_[face.patch].push_back(f);
    } else {
      if (face.neighbour >= nc)
        throw std::runtime_error("mesh: " + face_label(f, face) + " has invalid neighbour");
      if (face.patch >= 0)
        throw std::runtime_error("mesh: interior " + face_label(f, face) + " assigned to a patch");
      cell_faces_[face.neighbour].push_back(f);
    }
  }
  for (auto& cf : cell_faces_) std::sort(cf.begin(), cf.end());

  point_cells_.assign(np, {});
  for (int c = 0; c < nc; ++c)
    for (int p : cells_[c]) {
      if (p < 0 || p >= np) throw std::runtime_error("mesh: cell references invalid point");
      point_cells_[p].push_back(c);
    }
  for (auto& pc : point_cells_) {
    std::sort(pc.begin(), pc.end());
    pc.erase(std::unique(pc.begin(), pc.end()), pc.end());
  }

  point_patches_.assign(np, {});
  for (int f = 0; f < nf; ++f) {
    const Face& face = faces_[f];
    if (!face.is_boundary()) continue;
    for (int p : face.pts) point_patches_[p].push_back(face.patch);
  }
  for (auto& pp : point_patches_) {
    std::sort(pp.begin(), pp.end());
    pp.erase(std::unique(pp.begin(), pp.end()), pp.end());
  }
}

void Mesh::compute_geometry() {
  const int nc = n_cells();
  const int nf = n_faces();

  cell_volume_.assign(nc, 0.0);
  cell_centroid_.assign(nc, Vec2::Zero());
  std::vector<Vec2> loop;
  for (int c = 0; c < nc; ++c) {
    loop.clear();
    for (int p : cells_[c]) loop.push_back(points_[p]);
    cell_volume_[c] = polygon_signed_area(loop);
    cell_centroid_[c] = polygon_centroid(loop);
  }
  cell_volume_eigen_ = Eigen::Map<const Eigen::VectorXd>(cell_volume_.data(), nc);

  face_centroid_.assign(nf, Vec2::Zero());
  face_area_.assign(nf, Vec2::Zero());
  owner_to_neighbour_.assign(nf, Vec2::Zero());
  for (int f = 0; f < nf; ++f) {
    const Face& face = faces_[f];
    const Vec2& a = points_[face.pts[0]];
    const Vec2& b = points_[face.pts[1]];
    face_centroid_[f] = 0.5 * (a + b);
    face_area_[f] = rotate_cw(b - a);
    if (!face.is_boundary())
      owner_to_neighbour_[f] = cell_centroid_[face.neighbour] - cell_centroid_[face.owner];
  }
}

int Mesh::patch_index(const std::string& name) const {
  for (int p = 0; p < n_patches(); ++p)
    if (patch_names_[p] == name) return p;
  throw std::out_of_range("mesh: unknown patch '" + name + "'");
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (double vi : cell_volume_) v += vi;
  return v;
}

double Mesh::min_cell_size() const {
  double h = std::numeric_limits<double>::max();
  for (double v : cell_volume_) h = std::min(h, std::sqrt(std::abs(v)));
  return h;
}

double Mesh::face_nonorthogonality(int f) const {
  const Face& face = faces_[f];
  if (face.is_boundary())
    throw std::invalid_argument("face_nonorthogonality: " + face_label(f, face) + " is a boundary face");
  const Vec2& s = face_area_[f];
  const Vec2& d = owner_to_neighbour_[f];
  const double denom = s.norm() * d.norm();
  if (denom <= 0.0)
    throw std::runtime_error("face_nonorthogonality: degenerate geometry at " + face_label(f, face));
  double c = s.dot(d) / denom;
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

QualityReport Mesh::quality() const {
  QualityReport rep;
  rep.min_volume = std::numeric_limits<double>::max();
  double sum_angle = 0.0;
  int n_interior = 0;
  for (int f = 0; f < n_faces(); ++f) {
    if (faces_[f].is_boundary()) continue;
    const double a = face_nonorthogonality(f);
    rep.max_nonorthogonality = std::max(rep.max_nonorthogonality, a);
    sum_angle += a;
    ++n_interior;
  }
  rep.avg_nonorthogonality = n_interior > 0 ? sum_angle / n_interior : 0.0;
  for (double v : cell_volume_) {
    rep.min_volume = std::min(rep.min_volume, v);
    if (v <= 0.0) ++rep.negative_volume_cells;
  }
  if (n_cells() == 0) rep.min_volume = 0.0;
  return rep;
}

Mesh Mesh::displace(const PointField& displacement) const {
  if (static_cast<int>(displacement.size()) != n_points())
    throw std::invalid_argument("displace: displacement has wrong point count");
  std::vector<Vec2> moved = points_;
  for (int p = 0; p < n_points(); ++p) moved[p] += displacement[p];
  return Mesh(std::move(moved), cells_, faces_, patch_names_);
}

void Mesh::validate() const {
  const int nc = n_cells();
  const int nf = n_faces();

  // Every cell must reference at least 3 points, every face exactly 2 distinct.
  for (int c = 0; c < nc; ++c)
    if (cells_[c].size() < 3) throw std::runtime_error("mesh: cell with fewer than 3 points");
  for (int f = 0; f < nf; ++f)
    if (faces_[f].pts[0] == faces_[f].pts[1])
      throw std::runtime_error("mesh: degenerate " + face_label(f, faces_[f]));

  // Discrete Gauss identity: outward face area vectors of each cell sum to 0.
  std::vector<Vec2> closure(nc, Vec2::Zero());
  std::vector<double> perimeter(nc, 0.0);
  for (int f = 0; f < nf; ++f) {
    const Face& face = faces_[f];
    closure[face.owner] += face_area_[f];
    perimeter[face.owner] += face_area_[f].norm();
    if (!face.is_boundary()) {
      closure[face.neighbour] -= face_area_[f];
      perimeter[face.neighbour] += face_area_[f].norm();
    }
  }
  for (int c = 0; c < nc; ++c) {
    const double scale = std::max(perimeter[c], 1e-30);
    if (closure[c].norm() > 1e-12 * scale) {
      std::ostringstream os;
      os << "mesh: face closure violated at cell " << c << " (|sum S_f| = "
         << closure[c].norm() << ", perimeter = " << perimeter[c] << ")";
      throw std::runtime_error(os.str());
    }
  }

  // Each cell edge must appear in exactly one face, with consistent owner side.
  std::map<std::pair<int, int>, int> edge_count;
  for (int c = 0; c < nc; ++c) {
    const auto& pts = cells_[c];
    const int n = static_cast<int>(pts.size());
    for (int k = 0; k < n; ++k) {
      int a = pts[k], b = pts[(k + 1) % n];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (int f = 0; f < nf; ++f) {
    const Face& face = faces_[f];
    auto key = std::make_pair(std::min(face.pts[0], face.pts[1]),
                              std::max(face.pts[0], face.pts[1]));
    auto it = edge_count.find(key);
    const int expected = face.is_boundary() ? 1 : 2;
    if (it == edge_count.end() || it->second != expected)
      throw std::runtime_error("mesh: " + face_label(f, face) +
                               " does not match cell edge usage");
  }
  if (static_cast<int>(edge_count.size()) != nf)
    throw std::runtime_error("mesh: cell edges and faces disagree in count");
}

// ---------------------------------------------------------------------------
// Block mesh generation
// ---------------------------------------------------------------------------

namespace {

/// Identity of a generated point: a corner vertex, a point on a shared block
/// edge (canonical corner pair + step), or a block-interior point.
struct PointKey {
  enum class Kind { corner, edge, interior } kind;
  int a = 0, b = 0, c = 0, d = 0;

  bool operator<(const PointKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
  }
};

struct PointTable {
  std::map<PointKey, int> index;
  std::vector<Vec2> coords;

  int intern(const PointKey& key, const Vec2& xy) {
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(coords.size()));
    if (inserted) coords.push_back(xy);
    return it->second;
  }
};

/// Canonical point on the edge between corner vertices u and w at step m of n:
/// generated from the lower corner id so both adjacent blocks produce the
/// bit-identical key and coordinate.
std::pair<PointKey, Vec2> edge_point(const std::vector<Vec2>& verts, int u, int w,
                                     int m, int n) {
  PointKey key;
  key.kind = PointKey::Kind::edge;
  if (u > w) {
    std::swap(u, w);
    m = n - m;
  }
  key.a = u;
  key.b = w;
  key.c = m;
  key.d = n;
  const double t = static_cast<double>(m) / static_cast<double>(n);
  return {key, verts[u] + t * (verts[w] - verts[u])};
}

}  // namespace

Mesh build_block_mesh(const BlockMeshSpec& spec) {
  const int n_blocks = static_cast<int>(spec.blocks.size());
  if (n_blocks == 0) throw std::invalid_argument("build_block_mesh: no blocks");

  for (int bi = 0; bi < n_blocks; ++bi) {
    const auto& blk = spec.blocks[bi];
    if (blk.nx < 1 || blk.ny < 1)
      throw std::invalid_argument("build_block_mesh: block " + std::to_string(bi) +
                                  " has non-positive subdivision");
    std::vector<Vec2> loop;
    for (int k = 0; k < 4; ++k) {
      const int v = blk.corners[k];
      if (v < 0 || v >= static_cast<int>(spec.vertices.size()))
        throw std::invalid_argument("build_block_mesh: block " + std::to_string(bi) +
                                    " references invalid vertex");
      loop.push_back(spec.vertices[v]);
    }
    for (int k = 0; k < 4; ++k)
      for (int l = k + 1; l < 4; ++l)
        if (blk.corners[k] == blk.corners[l])
          throw std::invalid_argument("build_block_mesh: block " + std::to_string(bi) +
                                      " has repeated corners (degenerate)");
    if (polygon_signed_area(loop) <= 0.0)
      throw std::invalid_argument("build_block_mesh: block " + std::to_string(bi) +
                                  " is not counter-clockwise or has zero area");
  }

  // Conformity: a shared corner-pair edge must be subdivided identically.
  std::map<std::pair<int, int>, int> edge_subdiv;
  auto check_edge = [&](int u, int w, int n, int bi) {
    auto key = std::make_pair(std::min(u, w), std::max(u, w));
    auto [it, inserted] = edge_subdiv.try_emplace(key, n);
    if (!inserted && it->second != n)
      throw std::invalid_argument(
          "build_block_mesh: non-conforming shared edge between vertices " +
          std::to_string(u) + " and " + std::to_string(w) + " at block " +
          std::to_string(bi));
  };
  for (int bi = 0; bi < n_blocks; ++bi) {
    const auto& blk = spec.blocks[bi];
    check_edge(blk.corners[0], blk.corners[1], blk.nx, bi);
    check_edge(blk.corners[1], blk.corners[2], blk.ny, bi);
    check_edge(blk.corners[2], blk.corners[3], blk.nx, bi);
    check_edge(blk.corners[3], blk.corners[0], blk.ny, bi);
  }

  PointTable table;
  std::vector<std::vector<std::vector<int>>> block_pid(n_blocks);

  for (int bi = 0; bi < n_blocks; ++bi) {
    const auto& blk = spec.blocks[bi];
    const int nx = blk.nx, ny = blk.ny;
    const Vec2 c0 = spec.vertices[blk.corners[0]];
    const Vec2 c1 = spec.vertices[blk.corners[1]];
    const Vec2 c2 = spec.vertices[blk.corners[2]];
    const Vec2 c3 = spec.vertices[blk.corners[3]];

    auto& pid = block_pid[bi];
    pid.assign(nx + 1, std::vector<int>(ny + 1, -1));

    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= ny; ++j) {
        PointKey key;
        Vec2 xy;
        const bool south = (j == 0), north = (j == ny), west = (i == 0), east = (i == nx);
        if ((south || north) && (west || east)) {
          key.kind = PointKey::Kind::corner;
          key.a = blk.corners[south ? (west ? 0 : 1) : (east ? 2 : 3)];
          xy = spec.vertices[key.a];
        } else if (south) {
          std::tie(key, xy) = edge_point(spec.vertices, blk.corners[0], blk.corners[1], i, nx);
        } else if (north) {
          std::tie(key, xy) = edge_point(spec.vertices, blk.corners[3], blk.corners[2], i, nx);
        } else if (west) {
          std::tie(key, xy) = edge_point(spec.vertices, blk.corners[0], blk.corners[3], j, ny);
        } else if (east) {
          std::tie(key, xy) = edge_point(spec.vertices, blk.corners[1], blk.corners[2], j, ny);
        } else {
          key.kind = PointKey::Kind::interior;
          key.a = bi;
          key.b = i;
          key.c = j;
          const double u = static_cast<double>(i) / nx;
          const double v = static_cast<double>(j) / ny;
          xy = (1 - u) * (1 - v) * c0 + u * (1 - v) * c1 + u * v * c2 + (1 - u) * v * c3;
        }
        pid[i][j] = table.intern(key, xy);
      }
    }
  }

  // Cells, block by block, row-major.
  std::vector<std::vector<int>> cells;
  for (int bi = 0; bi < n_blocks; ++bi) {
    const auto& blk = spec.blocks[bi];
    const auto& pid = block_pid[bi];
    for (int j = 0; j < blk.ny; ++j)
      for (int i = 0; i < blk.nx; ++i)
        cells.push_back({pid[i][j], pid[i + 1][j], pid[i + 1][j + 1], pid[i][j + 1]});
  }

  // Record which (block, side) produced each boundary-candidate edge.
  std::map<std::pair<int, int>, std::pair<int, int>> edge_side;  // point pair -> (block, side)
  auto sorted_pair = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (int bi = 0; bi < n_blocks; ++bi) {
    const auto& blk = spec.blocks[bi];
    const auto& pid = block_pid[bi];
    for (int i = 0; i < blk.nx; ++i) {
      edge_side[sorted_pair(pid[i][0], pid[i + 1][0])] = {bi, 0};
      edge_side[sorted_pair(pid[i][blk.ny], pid[i + 1][blk.ny])] = {bi, 2};
    }
    for (int j = 0; j < blk.ny; ++j) {
      edge_side[sorted_pair(pid[blk.nx][j], pid[blk.nx][j + 1])] = {bi, 1};
      edge_side[sorted_pair(pid[0][j], pid[0][j + 1])] = {bi, 3};
    }
  }

  // Side -> patch map from the spec.
  std::map<std::pair<int, int>, int> side_patch;
  std::vector<std::string> patch_names;
  for (const auto& ps : spec.patches) {
    patch_names.push_back(ps.name);
    const int pidx = static_cast<int>(patch_names.size()) - 1;
    for (auto [blk, side] : ps.sides) {
      if (blk < 0 || blk >= n_blocks || side < 0 || side > 3)
        throw std::invalid_argument("build_block_mesh: patch '" + ps.name +
                                    "' references invalid block side");
      if (!side_patch.emplace(std::make_pair(blk, side), pidx).second)
        throw std::invalid_argument("build_block_mesh: block side assigned to two patches");
    }
  }

  // Faces from cell edges; owner = first traversing cell.
  std::vector<Face> faces;
  std::map<std::pair<int, int>, int> face_of_edge;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    const auto& pts = cells[c];
    for (int k = 0; k < 4; ++k) {
      const int a = pts[k], b = pts[(k + 1) % 4];
      auto key = sorted_pair(a, b);
      auto it = face_of_edge.find(key);
      if (it == face_of_edge.end()) {
        Face face;
        face.pts = {a, b};
        face.owner = c;
        face_of_edge.emplace(key, static_cast<int>(faces.size()));
        faces.push_back(face);
      } else {
        Face& face = faces[it->second];
        if (face.neighbour >= 0)
          throw std::invalid_argument("build_block_mesh: edge shared by three cells");
        face.neighbour = c;
      }
    }
  }

  // Boundary faces get their patch; every boundary side must be covered.
  for (auto& [key, fidx] : face_of_edge) {
    Face& face = faces[fidx];
    if (face.neighbour >= 0) continue;
    auto side_it = edge_side.find(key);
    if (side_it == edge_side.end())
      throw std::invalid_argument("build_block_mesh: boundary edge outside any block side");
    auto patch_it = side_patch.find(side_it->second);
    if (patch_it == side_patch.end())
      throw std::invalid_argument(
          "build_block_mesh: boundary side of block " + std::to_string(side_it->second.first) +
          " (side " + std::to_string(side_it->second.second) + ") not covered by any patch");
    face.patch = patch_it->second;
  }

  // Listed sides must actually be boundaries (not interior interfaces).
  for (const auto& [side, pidx] : side_patch) {
    (void)pidx;
    const auto& blk = spec.blocks[side.first];
    const auto& pid = block_pid[side.first];
    int a = -1, b = -1;
    switch (side.second) {
      case 0: a = pid[0][0]; b = pid[1][0]; break;
      case 1: a = pid[blk.nx][0]; b = pid[blk.nx][1]; break;
      case 2: a = pid[0][blk.ny]; b = pid[1][blk.ny]; break;
      default: a = pid[0][0]; b = pid[0][1]; break;
    }
    const int fidx = face_of_edge.at(sorted_pair(a, b));
    if (faces[fidx].neighbour >= 0)
      throw std::invalid_argument("build_block_mesh: patch assigned to an interior block interface");
  }

  Mesh mesh(std::move(table.coords), std::move(cells), std::move(faces), std::move(patch_names));
  for (int c = 0; c < mesh.n_cells(); ++c)
    if (mesh.cell_volume(c) <= 0.0)
      throw std::invalid_argument("build_block_mesh: generated cell " + std::to_string(c) +
                                  " has non-positive volume");
  mesh.validate();
  return mesh;
}

BlockMeshSpec rectangle_spec(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  BlockMeshSpec spec;
  spec.vertices = {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y()),
                   Vec2(lo.x(), hi.y())};
  spec.blocks.push_back({{0, 1, 2, 3}, nx, ny});
  spec.patches = {{"bottom", {{0, 0}}},
                  {"right", {{0, 1}}},
                  {"top", {{0, 2}}},
                  {"left", {{0, 3}}}};
  return spec;
}

BlockMeshSpec ring_spec(const std::array<Vec2, 4>& outer_corners,
                        const std::array<Vec2, 4>& inner_corners,
                        const std::array<int, 4>& n_tangential, int n_radial,
                        const std::array<std::string, 4>& outer_patches,
                        const std::array<std::string, 4>& inner_patches) {
  BlockMeshSpec spec;
  for (const Vec2& v : outer_corners) spec.vertices.push_back(v);
  for (const Vec2& v : inner_corners) spec.vertices.push_back(v);
  // Block k: outer corner k -> k+1, back along inner corners k+1 -> k.
  for (int k = 0; k < 4; ++k) {
    const int kn = (k + 1) % 4;
    spec.blocks.push_back({{k, kn, 4 + kn, 4 + k}, n_tangential[k], n_radial});
  }
  std::map<std::string, std::vector<std::pair<int, int>>> by_name;
  std::vector<std::string> order;
  auto add = [&](const std::string& name, int blk, int side) {
    if (!by_name.count(name)) order.push_back(name);
    by_name[name].push_back({blk, side});
  };
  for (int k = 0; k < 4; ++k) add(outer_patches[k], k, 0);
  for (int k = 0; k < 4; ++k) add(inner_patches[k], k, 2);
  for (const auto& name : order) spec.patches.push_back({name, by_name[name]});
  return spec;
}

BlockMeshSpec square_with_hole_spec(const Vec2& outer_lo, const Vec2& outer_hi,
                                    const Vec2& hole_lo, const Vec2& hole_hi,
                                    int n_tangential, int n_radial) {
  if (!(hole_lo.x() > outer_lo.x() && hole_lo.y() > outer_lo.y() &&
        hole_hi.x() < outer_hi.x() && hole_hi.y() < outer_hi.y() &&
        hole_lo.x() < hole_hi.x() && hole_lo.y() < hole_hi.y()))
    throw std::invalid_argument("square_with_hole_spec: hole must lie strictly inside the square");

  // 3x3 grid of axis-aligned blocks with the center removed: every cell is a
  // rectangle, so the undeformed mesh is exactly orthogonal.
  const std::array<double, 4> xs = {outer_lo.x(), hole_lo.x(), hole_hi.x(), outer_hi.x()};
  const std::array<double, 4> ys = {outer_lo.y(), hole_lo.y(), hole_hi.y(), outer_hi.y()};
  const std::array<int, 3> div = {n_radial, n_tangential, n_radial};

  BlockMeshSpec spec;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) spec.vertices.push_back(Vec2(xs[i], ys[j]));
  const auto v = [](int i, int j) { return j * 4 + i; };

  std::map<std::pair<int, int>, int> block_id;  // (i, j) cell of the 3x3 grid
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      if (i == 1 && j == 1) continue;
      block_id[{i, j}] = static_cast<int>(spec.blocks.size());
      spec.blocks.push_back(
          {{v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)}, div[i], div[j]});
    }

  spec.patches = {
      {"outer_bottom", {{block_id[{0, 0}], 0}, {block_id[{1, 0}], 0}, {block_id[{2, 0}], 0}}},
      {"outer_right", {{block_id[{2, 0}], 1}, {block_id[{2, 1}], 1}, {block_id[{2, 2}], 1}}},
      {"outer_top", {{block_id[{0, 2}], 2}, {block_id[{1, 2}], 2}, {block_id[{2, 2}], 2}}},
      {"outer_left", {{block_id[{0, 0}], 3}, {block_id[{0, 1}], 3}, {block_id[{0, 2}], 3}}},
      {"inner_bottom", {{block_id[{1, 0}], 2}}},
      {"inner_right", {{block_id[{2, 1}], 3}}},
      {"inner_top", {{block_id[{1, 2}], 0}}},
      {"inner_left", {{block_id[{0, 1}], 1}}},
  };
  return spec;
}

BlockMeshSpec channel_with_obstacle_spec(const Vec2& lo, const Vec2& hi,
                                         const std::array<Vec2, 4>& obstacle_corners,
                                         int n_tangential_x, int n_tangential_y,
                                         int n_radial) {
  const std::array<Vec2, 4> outer = {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()),
                                     Vec2(hi.x(), hi.y()), Vec2(lo.x(), hi.y())};
  return ring_spec(outer, obstacle_corners,
                   {n_tangential_x, n_tangential_y, n_tangential_x, n_tangential_y},
                   n_radial, {"bottom", "outlet", "top", "inlet"},
                   {"obstacle", "obstacle", "obstacle", "obstacle"});
}

}  // namespace fvrom
