/// @file motion.hpp
/// Mesh motion: interior-point displacements from prescribed boundary
/// displacements, via Laplacian smoothing with distance-weighted diffusivity
/// or radial-basis-function interpolation, plus a projection-based reduced
/// model of the Laplacian motion problem.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fvrom/field.hpp"
#include "fvrom/mesh.hpp"

namespace fvrom {

/// (point position, parameter vector) -> displacement.
using DisplacementFn = std::function<Vec2(const Vec2&, const Eigen::VectorXd&)>;

/// Prescribed boundary displacement per patch name. Listed patches move;
/// every other patch is held fixed (zero displacement).
struct BoundaryMotion {
  std::map<std::string, DisplacementFn> patches;

  /// Rigid translation of the listed patches by (mu[0], mu[1]).
  static BoundaryMotion translation(const std::vector<std::string>& patch_names);
  /// Rigid rotation of the listed patches about `center` by mu[0] degrees.
  static BoundaryMotion rotation(const std::vector<std::string>& patch_names, const Vec2& center);
};

/// Displacement prescribed at one mesh point: the average over the point's
/// moving patches, zero when all its patches are fixed, nullopt for interior
/// points.
std::optional<Vec2> prescribed_point_displacement(const Mesh& mesh, const BoundaryMotion& bm,
                                                  const Eigen::VectorXd& mu, int point);

/// Motion diffusivity 1/max(r, 0.01 h_min)^2 per cell, with r the centroid
/// distance to the nearest moving-boundary face centroid.
Eigen::VectorXd motion_diffusivity(const Mesh& mesh, const BoundaryMotion& bm);

/// Laplacian smoothing: solves div(gamma grad s) = 0 per displacement
/// component with Dirichlet data on every patch (moving patches take the
/// prescribed displacement, the rest zero), then interpolates the
/// cell-centered solution to points by inverse-distance weighting; boundary
/// points take the exact prescribed displacement.
PointField laplacian_motion(const Mesh& mesh, const BoundaryMotion& bm,
                            const Eigen::VectorXd& mu);

/// Gaussian-kernel interpolant with a linear polynomial tail:
/// s(x) = sum_i beta_i exp(-(|x - x_i| / radius)^2) + delta_0 + delta_1 x + delta_2 y
/// per displacement component, subject to sum_i beta_i (1, x_i, y_i) = 0.
struct RbfInterpolant {
  std::vector<Vec2> centers;
  double radius = 0.0;
  Eigen::MatrixXd beta;   // n_centers x 2
  Eigen::MatrixXd delta;  // 3 x 2, rows weight (1, x, y)

  Vec2 evaluate(const Vec2& x) const;
};

/// Reusable factorization of the control-point kernel system at fixed centers
/// and radius: the rank-truncated SVD factors of the symmetric block system
/// [[M, P], [P^T, 0]]. Fitting new boundary values against a stored
/// factorization costs O(n_centers^2) instead of a fresh O(n_centers^3)
/// decomposition, which keeps repeated fits (one per reduced query) cheap.
/// The factors are kept separate rather than multiplied into a pseudo-inverse
/// matrix: applying them in sequence projects the data before the inverted
/// singular values enter, which preserves accuracy on the near-singular
/// kernel systems of closely spaced centers.
struct RbfFactorization {
  std::vector<Vec2> centers;
  double radius = 0.0;
  Eigen::MatrixXd ut;             // rank x (n_centers + 3), left factor
  Eigen::VectorXd inverted_sing;  // rank inverted singular values
  Eigen::MatrixXd v;              // (n_centers + 3) x rank, right factor

  int n_centers() const { return static_cast<int>(centers.size()); }
};

/// Builds the kernel system and its rank-truncated decomposition: the
/// Gaussian kernel matrix is numerically singular for closely spaced centers,
/// where an LU factorization loses the interpolation property while the
/// truncated solve retains it for consistent data.
RbfFactorization factor_rbf(const std::vector<Vec2>& centers, double radius);

/// Interpolant through `values` (n_centers x 2) via a stored factorization.
RbfInterpolant apply_rbf(const RbfFactorization& fact, const Eigen::MatrixXd& values);

/// One-shot convenience: factor_rbf followed by apply_rbf.
RbfInterpolant fit_rbf(const std::vector<Vec2>& centers, const Eigen::MatrixXd& values,
                       double radius);

/// Deterministic arc-length-uniform subsampling of the boundary points of the
/// named patches: each connected point chain contributes
/// ceil(chain points / ratio) points (all of them when the ratio is 1).
/// Returns sorted unique point indices.
std::vector<int> select_control_points(const Mesh& mesh, const std::vector<std::string>& patches,
                                       double coarsen_ratio);

/// Evaluates the interpolant at every interior point; boundary points take
/// the exact prescribed displacement.
PointField rbf_motion(const Mesh& mesh, const RbfInterpolant& interp, const BoundaryMotion& bm,
                      const Eigen::VectorXd& mu);

enum class MotionStrategy { laplacian, rbf };

struct MotionOptions {
  MotionStrategy strategy = MotionStrategy::rbf;
  double rbf_radius = 0.6;
  double coarsen_ratio = 2.0;
};

/// Strategy dispatch. The RBF branch fits control points selected from every
/// boundary patch (fixed patches contribute zero-displacement centers, which
/// anchors the far field).
PointField solve_motion(const Mesh& mesh, const BoundaryMotion& bm, const Eigen::VectorXd& mu,
                        const MotionOptions& opts = {});

/// Fits the interpolant over given control point indices with their boundary
/// values at mu (prescribed on moving patches, zero on static ones). This is
/// the exact fit solve_motion performs internally, exposed so reduced
/// pipelines can reuse stored control points and evaluate the displacement at
/// selected points only.
RbfInterpolant fit_control_rbf(const Mesh& mesh, const BoundaryMotion& bm,
                               const Eigen::VectorXd& mu, const std::vector<int>& controls,
                               double radius);

/// Same fit against a precomputed factorization of the control-point system.
RbfInterpolant fit_control_rbf(const Mesh& mesh, const BoundaryMotion& bm,
                               const Eigen::VectorXd& mu, const std::vector<int>& controls,
                               const RbfFactorization& fact);

/// Reduced Laplacian-motion model: displacement modes from training
/// snapshots, the motion operator projected once, and interpolation data for
/// the boundary-driven right-hand side so the online solve is independent of
/// the mesh size (reconstruction aside).
struct MotionRom {
  Eigen::MatrixXd modes;  // (2 n_cells) x n_modes, stacked [s_x; s_y]
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd reduced_operator;  // modes^T blkdiag(A, A) modes
  std::vector<int> magic_rows;       // stacked right-hand-side rows
  Eigen::MatrixXd rhs_blocks;        // maps sampled rhs rows to reduced rhs
  double rhs_condition = 0.0;
  Eigen::VectorXd rhs_eigenvalues;
  Eigen::VectorXd gamma;  // diffusivity on the training mesh
  int cell_count = 0;

  int n_modes() const { return static_cast<int>(modes.cols()); }
};

MotionRom train_motion_rom(const Mesh& mesh, const BoundaryMotion& bm,
                           const std::vector<Eigen::VectorXd>& samples, int n_modes, int n_deim);

/// Reduced coefficients at mu: samples the right-hand side at the magic rows
/// only and solves the n_modes x n_modes system.
Eigen::VectorXd motion_rom_coefficients(const MotionRom& rom, const Mesh& mesh,
                                        const BoundaryMotion& bm, const Eigen::VectorXd& mu);

/// Displacement of one point reconstructed from reduced coefficients; cost is
/// proportional to the point's cell degree times n_modes.
Vec2 motion_rom_point(const MotionRom& rom, const Mesh& mesh, const BoundaryMotion& bm,
                      const Eigen::VectorXd& mu, const Eigen::VectorXd& coef, int point);

/// Full reconstructed displacement field.
PointField solve_motion_rom(const MotionRom& rom, const Mesh& mesh, const BoundaryMotion& bm,
                            const Eigen::VectorXd& mu);

}  // namespace fvrom
