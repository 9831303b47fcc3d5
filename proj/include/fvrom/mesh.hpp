/// @file mesh.hpp
/// Block-structured polygonal finite-volume meshes: topology, geometry,
/// quality metrics and point-wise displacement.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "fvrom/field.hpp"
#include "fvrom/geometry.hpp"

namespace fvrom {

/// One straight mesh face (an edge in 2-D). `pts` is oriented so that
/// rotating pts[0]->pts[1] by -90 degrees gives the normal pointing out of
/// the owner cell. Interior faces have neighbour >= 0 and patch == -1;
/// boundary faces have neighbour == -1 and a valid patch index.
struct Face {
  std::array<int, 2> pts{-1, -1};
  int owner = -1;
  int neighbour = -1;
  int patch = -1;

  bool is_boundary() const { return neighbour < 0; }
};

/// Aggregate mesh-quality numbers. Angles are in degrees.
struct QualityReport {
  double max_nonorthogonality = 0.0;
  double avg_nonorthogonality = 0.0;
  double min_volume = 0.0;
  int negative_volume_cells = 0;
};

/// Immutable cell-centred FV mesh. Construction computes all derived
/// geometry (centroids, volumes, face area vectors, adjacency); displace()
/// produces a new mesh with the same topology and moved points.
class Mesh {
 public:
  Mesh(std::vector<Vec2> points, std::vector<std::vector<int>> cells,
       std::vector<Face> faces, std::vector<std::string> patch_names);

  int n_points() const { return static_cast<int>(points_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }
  int n_patches() const { return static_cast<int>(patch_names_.size()); }

  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& point(int p) const { return points_[p]; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<int>& cell_points(int c) const { return cells_[c]; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }
  const std::vector<std::string>& patch_names() const { return patch_names_; }
  const std::string& patch_name(int p) const { return patch_names_[p]; }
  /// Index of a patch by name; throws std::out_of_range for unknown names.
  int patch_index(const std::string& name) const;
  /// Face indices of one patch, ascending.
  const std::vector<int>& patch_faces(int p) const { return patch_faces_[p]; }

  double cell_volume(int c) const { return cell_volume_[c]; }
  const Eigen::VectorXd& cell_volumes() const { return cell_volume_eigen_; }
  const Vec2& cell_centroid(int c) const { return cell_centroid_[c]; }
  /// Face area vector S_f: outward from the owner cell, |S_f| = edge length.
  const Vec2& face_area(int f) const { return face_area_[f]; }
  const Vec2& face_centroid(int f) const { return face_centroid_[f]; }
  /// Owner-to-neighbour centroid vector d_f (interior faces only).
  const Vec2& owner_to_neighbour(int f) const { return owner_to_neighbour_[f]; }
  /// Owner-centroid-to-face-centroid vector (any face).
  Vec2 owner_to_face(int f) const { return face_centroid_[f] - cell_centroid_[faces_[f].owner]; }

  /// Faces of one cell, ascending face index.
  const std::vector<int>& cell_faces(int c) const { return cell_faces_[c]; }
  /// Cells sharing one point, ascending cell index.
  const std::vector<int>& point_cells(int p) const { return point_cells_[p]; }
  /// Patches a point lies on (empty for interior points), ascending.
  const std::vector<int>& point_patches(int p) const { return point_patches_[p]; }

  double total_volume() const;
  /// Smallest cell length scale, min_i sqrt(|V_i|); used to clamp distance
  /// weights in mesh motion.
  double min_cell_size() const;

  /// Angle in degrees between the face area vector and the owner-to-neighbour
  /// centroid vector. Throws std::invalid_argument for boundary faces.
  double face_nonorthogonality(int f) const;

  QualityReport quality() const;

  /// New mesh with points moved by `displacement` (same topology). Works for
  /// displacements that invert cells; quality() then reports negative volumes.
  Mesh displace(const PointField& displacement) const;

  /// Checks structural and geometric invariants (face closure via the
  /// discrete Gauss identity, owner/neighbour consistency, patch coverage).
  /// Throws std::runtime_error naming the first violated invariant.
  void validate() const;

 private:
  void compute_geometry();
  void build_adjacency();

  std::vector<Vec2> points_;
  std::vector<std::vector<int>> cells_;
  std::vector<Face> faces_;
  std::vector<std::string> patch_names_;

  std::vector<std::vector<int>> patch_faces_;
  std::vector<std::vector<int>> cell_faces_;
  std::vector<std::vector<int>> point_cells_;
  std::vector<std::vector<int>> point_patches_;
  std::vector<double> cell_volume_;
  Eigen::VectorXd cell_volume_eigen_;
  std::vector<Vec2> cell_centroid_;
  std::vector<Vec2> face_centroid_;
  std::vector<Vec2> face_area_;
  std::vector<Vec2> owner_to_neighbour_;
};

/// Declarative description of a conforming multi-block quad mesh. Blocks are
/// bilinear patches over four corner vertices listed CCW; sides are numbered
/// 0 = corners[0]->[1], 1 = [1]->[2], 2 = [2]->[3], 3 = [3]->[0]. Subdivision
/// counts are nx along sides 0/2 and ny along sides 1/3. Shared sides of
/// adjacent blocks must use matching subdivision counts.
struct BlockMeshSpec {
  struct Block {
    std::array<int, 4> corners{};
    int nx = 1;
    int ny = 1;
  };
  struct PatchSpec {
    std::string name;
    std::vector<std::pair<int, int>> sides;  // (block index, side 0..3)
  };

  std::vector<Vec2> vertices;
  std::vector<Block> blocks;
  std::vector<PatchSpec> patches;
};

/// Builds the mesh described by `spec`. Shared block edges are merged
/// exactly (no coordinate tolerances): points on a shared edge are generated
/// once from a direction-canonical interpolation between the shared corner
/// vertices. Throws std::invalid_argument on degenerate blocks,
/// non-conforming shared edges, inverted cells, or patch assignments that
/// leave boundary sides uncovered / doubly covered.
Mesh build_block_mesh(const BlockMeshSpec& spec);

/// Axis-aligned rectangle [lo, hi] with nx-by-ny cells and patches
/// left/right/bottom/top.
BlockMeshSpec rectangle_spec(const Vec2& lo, const Vec2& hi, int nx, int ny);

/// Four-block ring between an outer CCW quad and an inner CCW quad (a hole).
/// Block k spans outer corner k -> k+1 and inner corner k+1 -> k with
/// n_tangential cells along the boundary edges and n_radial across the gap.
/// outer_patches / inner_patches name the four outer/inner sides in corner
/// order (side k joins corner k to corner k+1); repeated names merge sides
/// into one patch.
BlockMeshSpec ring_spec(const std::array<Vec2, 4>& outer_corners,
                        const std::array<Vec2, 4>& inner_corners,
                        const std::array<int, 4>& n_tangential, int n_radial,
                        const std::array<std::string, 4>& outer_patches,
                        const std::array<std::string, 4>& inner_patches);

/// Square annulus used by the heat-transfer benchmark: outer square
/// [outer_lo, outer_hi], square hole [hole_lo, hole_hi], patches
/// outer_{bottom,right,top,left} and inner_{bottom,right,top,left}.
/// Built from 8 axis-aligned rectangular blocks (a 3x3 grid with the center
/// removed), so every undeformed cell is an axis-aligned rectangle and the
/// undeformed mesh has zero nonorthogonality. `n_tangential` subdivides the
/// segments aligned with the hole edges, `n_radial` the gap between hole and
/// outer boundary; the cell count is 4*n_radial^2 + 4*n_tangential*n_radial.
BlockMeshSpec square_with_hole_spec(const Vec2& outer_lo, const Vec2& outer_hi,
                                    const Vec2& hole_lo, const Vec2& hole_hi,
                                    int n_tangential, int n_radial);

/// Channel with an interior quadrilateral obstacle, patches inlet (left),
/// outlet (right), bottom, top, obstacle (all four interior sides).
/// n_tangential_x applies to the bottom/top blocks, n_tangential_y to the
/// inlet/outlet-side blocks.
BlockMeshSpec channel_with_obstacle_spec(const Vec2& lo, const Vec2& hi,
                                         const std::array<Vec2, 4>& obstacle_corners,
                                         int n_tangential_x, int n_tangential_y,
                                         int n_radial);

}  // namespace fvrom
