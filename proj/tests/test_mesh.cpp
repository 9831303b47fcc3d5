#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fvrom/mesh.hpp"
#include "fvrom/mesh_io.hpp"

using namespace fvrom;

namespace {

Mesh unit_square_mesh(int n) {
  return build_block_mesh(rectangle_spec(Vec2(0, 0), Vec2(1, 1), n, n));
}

}  // namespace

TEST_CASE("rectangle block mesh: counts, volumes, closure") {
  const int n = 10;
  Mesh mesh = unit_square_mesh(n);

  CHECK(mesh.n_cells() == n * n);
  CHECK(mesh.n_points() == (n + 1) * (n + 1));
  // nx*(ny+1) horizontal + ny*(nx+1) vertical edges
  CHECK(mesh.n_faces() == 2 * n * (n + 1));
  CHECK(mesh.n_patches() == 4);

  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(mesh.cell_volume(c) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(mesh.total_volume() == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_NOTHROW(mesh.validate());

  // Owner index below neighbour index (cells traversed in order).
  for (const Face& f : mesh.faces())
    if (!f.is_boundary()) CHECK(f.owner < f.neighbour);

  // Each patch of the unit square carries n boundary faces.
  for (int p = 0; p < mesh.n_patches(); ++p) CHECK(mesh.patch_faces(p).size() == n);
}

TEST_CASE("uniform Cartesian mesh is orthogonal; sheared mesh hits 45 degrees") {
  Mesh mesh = unit_square_mesh(8);
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (!mesh.face(f).is_boundary())
      CHECK(mesh.face_nonorthogonality(f) == doctest::Approx(0.0).epsilon(1e-10));

  // Shear x' = x + y turns every interior face angle into exactly 45 degrees.
  PointField shear(mesh.n_points());
  for (int p = 0; p < mesh.n_points(); ++p) shear[p] = Vec2(mesh.point(p).y(), 0.0);
  Mesh sheared = mesh.displace(shear);
  for (int f = 0; f < sheared.n_faces(); ++f)
    if (!sheared.face(f).is_boundary())
      CHECK(sheared.face_nonorthogonality(f) == doctest::Approx(45.0).epsilon(1e-10));

  QualityReport q = sheared.quality();
  CHECK(q.max_nonorthogonality == doctest::Approx(45.0).epsilon(1e-10));
  CHECK(q.avg_nonorthogonality == doctest::Approx(45.0).epsilon(1e-10));
  CHECK(q.negative_volume_cells == 0);
  // Shear preserves area.
  CHECK(q.min_volume == doctest::Approx(1.0 / 64).epsilon(1e-10));

  CHECK_THROWS_AS((void)mesh.face_nonorthogonality(mesh.patch_faces(0)[0]),
                  std::invalid_argument);
}

TEST_CASE("quality equals naive recomputation") {
  Mesh mesh = build_block_mesh(square_with_hole_spec(Vec2(-1, -1), Vec2(1, 1),
                                                     Vec2(-0.5, -0.5), Vec2(0.5, 0.5), 7, 5));
  QualityReport q = mesh.quality();

  double max_a = 0.0, sum_a = 0.0;
  int n_int = 0;
  double min_v = 1e300;
  int neg = 0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.face(f).is_boundary()) continue;
    const Vec2 s = mesh.face_area(f);
    const Vec2 d = mesh.owner_to_neighbour(f);
    const double ang = std::acos(std::clamp(s.dot(d) / (s.norm() * d.norm()), -1.0, 1.0)) *
                       180.0 / 3.14159265358979323846;
    max_a = std::max(max_a, ang);
    sum_a += ang;
    ++n_int;
  }
  for (int c = 0; c < mesh.n_cells(); ++c) {
    min_v = std::min(min_v, mesh.cell_volume(c));
    if (mesh.cell_volume(c) <= 0) ++neg;
  }
  CHECK(q.max_nonorthogonality == doctest::Approx(max_a).epsilon(1e-14));
  CHECK(q.avg_nonorthogonality == doctest::Approx(sum_a / n_int).epsilon(1e-14));
  CHECK(q.min_volume == doctest::Approx(min_v).epsilon(1e-14));
  CHECK(q.negative_volume_cells == neg);
}

TEST_CASE("square-with-hole benchmark mesh") {
  const int nt = 25, nr = 25;
  Mesh mesh = build_block_mesh(square_with_hole_spec(Vec2(-1, -1), Vec2(1, 1),
                                                     Vec2(-0.5, -0.5), Vec2(0.5, 0.5), nt, nr));
  // 4 corner blocks of nr*nr cells + 4 side blocks of nt*nr cells.
  CHECK(mesh.n_cells() == 4 * nr * nr + 4 * nt * nr);
  // Undeformed: every cell is an axis-aligned rectangle, so face normals and
  // owner->neighbour vectors are parallel up to arccos rounding noise.
  CHECK(mesh.quality().max_nonorthogonality <= 1e-5);
  CHECK_NOTHROW(mesh.validate());
  // Domain area by the shoelace formula: outer square minus hole.
  CHECK(mesh.total_volume() == doctest::Approx(4.0 - 1.0).epsilon(1e-10));

  for (const char* name : {"outer_bottom", "outer_right", "outer_top", "outer_left",
                           "inner_bottom", "inner_right", "inner_top", "inner_left"})
    CHECK_NOTHROW((void)mesh.patch_index(name));
  CHECK_THROWS_AS((void)mesh.patch_index("nope"), std::out_of_range);

  for (const char* name : {"inner_bottom", "inner_right", "inner_top", "inner_left"})
    CHECK(mesh.patch_faces(mesh.patch_index(name)).size() == nt);

  // Hole-corner points sit on exactly two inner patches.
  int corner_points = 0;
  for (int p = 0; p < mesh.n_points(); ++p)
    if (mesh.point_patches(p).size() == 2) ++corner_points;
  CHECK(corner_points == 8);  // 4 outer + 4 inner corners
}

TEST_CASE("channel with obstacle mesh") {
  const std::array<Vec2, 4> obstacle = {Vec2(1.65, 1.15), Vec2(2.35, 1.15),
                                        Vec2(2.35, 1.85), Vec2(1.65, 1.85)};
  Mesh mesh = build_block_mesh(
      channel_with_obstacle_spec(Vec2(0, 0), Vec2(6, 3), obstacle, 24, 12, 10));
  CHECK(mesh.n_cells() == 2 * (24 + 12) * 10);
  CHECK_NOTHROW(mesh.validate());
  CHECK(mesh.total_volume() == doctest::Approx(18.0 - 0.49).epsilon(1e-10));
  for (const char* name : {"inlet", "outlet", "top", "bottom", "obstacle"})
    CHECK_NOTHROW((void)mesh.patch_index(name));
  CHECK(mesh.patch_faces(mesh.patch_index("obstacle")).size() == 2 * (24 + 12));
}

TEST_CASE("displace: identity, translation, inversion detection") {
  Mesh mesh = unit_square_mesh(5);

  PointField zero(mesh.n_points(), Vec2::Zero());
  Mesh same = mesh.displace(zero);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CHECK(same.cell_volume(c) == mesh.cell_volume(c));
    CHECK((same.cell_centroid(c) - mesh.cell_centroid(c)).norm() == 0.0);
  }

  PointField shift(mesh.n_points(), Vec2(0.3, -0.2));
  Mesh moved = mesh.displace(shift);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CHECK(moved.cell_volume(c) == doctest::Approx(mesh.cell_volume(c)).epsilon(1e-13));
    CHECK((moved.cell_centroid(c) - mesh.cell_centroid(c) - Vec2(0.3, -0.2)).norm() <= 1e-13);
  }
  CHECK_NOTHROW(moved.validate());

  // Collapse an interior point far across its cells: inverted cells appear,
  // displace and quality still work.
  PointField bad(mesh.n_points(), Vec2::Zero());
  int interior_point = -1;
  for (int p = 0; p < mesh.n_points(); ++p)
    if (mesh.point_patches(p).empty()) { interior_point = p; break; }
  REQUIRE(interior_point >= 0);
  bad[interior_point] = Vec2(0.5, 0.5);
  Mesh broken = mesh.displace(bad);
  CHECK(broken.quality().negative_volume_cells > 0);
  CHECK(broken.quality().min_volume < 0.0);

  PointField wrong_size(3, Vec2::Zero());
  CHECK_THROWS_AS((void)mesh.displace(wrong_size), std::invalid_argument);
}

TEST_CASE("isometry leaves volumes and angles unchanged") {
  Mesh mesh = build_block_mesh(square_with_hole_spec(Vec2(-1, -1), Vec2(1, 1),
                                                     Vec2(-0.5, -0.5), Vec2(0.5, 0.5), 6, 4));
  const double a = 0.7;
  const Eigen::Rotation2D<double> rot(a);
  PointField disp(mesh.n_points());
  for (int p = 0; p < mesh.n_points(); ++p)
    disp[p] = rot * mesh.point(p) + Vec2(2.0, -1.0) - mesh.point(p);
  Mesh moved = mesh.displace(disp);
  for (int c = 0; c < mesh.n_cells(); ++c)
    CHECK(moved.cell_volume(c) == doctest::Approx(mesh.cell_volume(c)).epsilon(1e-12));
  // arccos is ill-conditioned near zero angle: sqrt(machine-eps) noise in the
  // angle itself, so compare with an absolute tolerance.
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (!mesh.face(f).is_boundary())
      CHECK(std::abs(moved.face_nonorthogonality(f) - mesh.face_nonorthogonality(f)) <= 1e-5);
}

TEST_CASE("block mesh construction errors") {
  // Non-conforming shared edge.
  {
    BlockMeshSpec spec;
    spec.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1), Vec2(0, 1)};
    spec.blocks.push_back({{0, 1, 4, 5}, 2, 3});
    spec.blocks.push_back({{1, 2, 3, 4}, 2, 4});  // shared edge 1-4 subdivided 3 vs 4
    spec.patches = {{"all", {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}}}};
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
  // Degenerate block: repeated corner.
  {
    BlockMeshSpec spec;
    spec.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)};
    spec.blocks.push_back({{0, 1, 2, 2}, 2, 2});
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
  // Clockwise block.
  {
    BlockMeshSpec spec;
    spec.vertices = {Vec2(0, 0), Vec2(0, 1), Vec2(1, 1), Vec2(1, 0)};
    spec.blocks.push_back({{0, 1, 2, 3}, 2, 2});
    spec.patches = {{"all", {{0, 0}, {0, 1}, {0, 2}, {0, 3}}}};
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
  // Uncovered boundary side.
  {
    BlockMeshSpec spec = rectangle_spec(Vec2(0, 0), Vec2(1, 1), 3, 3);
    spec.patches.pop_back();
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
  // Doubly covered side.
  {
    BlockMeshSpec spec = rectangle_spec(Vec2(0, 0), Vec2(1, 1), 3, 3);
    spec.patches.push_back({"dup", {{0, 0}}});
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
  // Zero subdivision.
  {
    BlockMeshSpec spec = rectangle_spec(Vec2(0, 0), Vec2(1, 1), 0, 3);
    CHECK_THROWS_AS((void)build_block_mesh(spec), std::invalid_argument);
  }
}

TEST_CASE("conforming multi-block interface merges points exactly") {
  // Two blocks meeting along a shared edge whose subdivided points must be
  // generated once: total point count proves the merge.
  BlockMeshSpec spec;
  spec.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0.3), Vec2(2, 1), Vec2(1, 1.2), Vec2(0, 1)};
  spec.blocks.push_back({{0, 1, 4, 5}, 2, 3});
  spec.blocks.push_back({{1, 2, 3, 4}, 2, 3});
  spec.patches = {{"rim", {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}}}};
  Mesh mesh = build_block_mesh(spec);
  CHECK(mesh.n_cells() == 12);
  CHECK(mesh.n_points() == 2 * (3 * 4) - 4);  // shared column counted once
  CHECK_NOTHROW(mesh.validate());
  // The interface faces are interior.
  int interior = 0;
  for (const Face& f : mesh.faces())
    if (!f.is_boundary()) ++interior;
  CHECK(interior == 2 * (1 * 3 + 2 * 2) + 3);
}

TEST_CASE("mesh JSON round trip preserves everything bit-for-bit") {
  Mesh mesh = build_block_mesh(square_with_hole_spec(Vec2(-1, -1), Vec2(1, 1),
                                                     Vec2(-0.5, -0.5), Vec2(0.5, 0.5), 5, 4));
  // Non-trivial coordinates so serialization precision actually matters.
  PointField wiggle(mesh.n_points());
  for (int p = 0; p < mesh.n_points(); ++p)
    wiggle[p] = 1e-3 * Vec2(std::sin(7.0 * p + 0.1), std::cos(3.0 * p - 0.4));
  mesh = mesh.displace(wiggle);

  const std::string path = "roundtrip_mesh.json";
  write_mesh_json(path, mesh);
  Mesh back = read_mesh_json(path);
  std::filesystem::remove(path);

  REQUIRE(back.n_points() == mesh.n_points());
  REQUIRE(back.n_cells() == mesh.n_cells());
  REQUIRE(back.n_faces() == mesh.n_faces());
  for (int p = 0; p < mesh.n_points(); ++p) {
    CHECK(back.point(p).x() == mesh.point(p).x());
    CHECK(back.point(p).y() == mesh.point(p).y());
  }
  CHECK(back.cells() == mesh.cells());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    CHECK(back.face(f).pts == mesh.face(f).pts);
    CHECK(back.face(f).owner == mesh.face(f).owner);
    CHECK(back.face(f).neighbour == mesh.face(f).neighbour);
    CHECK(back.face(f).patch == mesh.face(f).patch);
  }
  CHECK(back.patch_names() == mesh.patch_names());

  nlohmann::json bad = mesh_to_json(mesh);
  bad.erase("faces");
  CHECK_THROWS_AS((void)mesh_from_json(bad), std::invalid_argument);
}

TEST_CASE("VTK export writes polydata with fields") {
  Mesh mesh = unit_square_mesh(3);
  CellField scalar(mesh.n_cells(), 1);
  for (int c = 0; c < mesh.n_cells(); ++c) scalar.at(c) = c;
  CellField vec(mesh.n_cells(), 2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    vec.at(c, 0) = 1.0;
    vec.at(c, 1) = -1.0;
  }
  PointField disp(mesh.n_points(), Vec2(0.1, 0.2));

  const std::string path = "export_test.vtk";
  write_vtk(path, mesh, {{"theta", scalar}, {"velocity", vec}}, {{"displacement", disp}});
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::filesystem::remove(path);
  CHECK(text.find("DATASET POLYDATA") != std::string::npos);
  CHECK(text.find("POLYGONS 9") != std::string::npos);
  CHECK(text.find("SCALARS theta double 1") != std::string::npos);
  CHECK(text.find("VECTORS velocity double") != std::string::npos);
  CHECK(text.find("POINT_DATA 16") != std::string::npos);
  CHECK(text.find("VECTORS displacement double") != std::string::npos);
}
