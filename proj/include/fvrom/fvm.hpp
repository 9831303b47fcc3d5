/// @file fvm.hpp
/// Cell-centred finite-volume discretization of parametrized diffusion
/// problems: full-mesh assembly, direct solves with optional deferred
/// non-orthogonal correction, and stencil-local evaluation of single operator
/// or source entries whose cost is independent of the mesh size.
#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fvrom/field.hpp"
#include "fvrom/mesh.hpp"

namespace fvrom {

/// Face-gradient discretization of the diffusive flux. `uncorrected` uses the
/// orthogonal surface-normal gradient |S|/|d|; `corrected` splits S into an
/// over-relaxed implicit part |S|^2/(S.d) along d plus an explicit deferred
/// term k.grad(theta) with k = S - (|S|^2/(S.d)) d, limited so the explicit
/// face contribution never exceeds the implicit one in magnitude.
enum class Scheme { uncorrected, corrected };

/// (position, parameter) -> value.
using ScalarFn = std::function<double(const Vec2&, const Eigen::VectorXd&)>;

struct BoundaryCondition {
  enum class Kind { dirichlet, neumann };
  Kind kind = Kind::dirichlet;
  ScalarFn value;  // Dirichlet value, or outward normal gradient for Neumann

  static BoundaryCondition dirichlet_value(double v);
  static BoundaryCondition dirichlet_fn(ScalarFn fn);
  static BoundaryCondition neumann_value(double v);
  static BoundaryCondition neumann_fn(ScalarFn fn);
};

/// Boundary condition per patch name. Every mesh patch must be covered.
struct BoundarySpec {
  std::map<std::string, BoundaryCondition> patches;
  const BoundaryCondition& at(const std::string& patch) const;
};

/// Diffusion coefficient: constant, or one value per cell (interpolated to
/// faces with the centroid-based face weight; boundary faces take the owner
/// value).
struct DiffusionCoefficient {
  double constant = 1.0;
  const Eigen::VectorXd* cellwise = nullptr;  // not owned; overrides constant
};

/// Describes -div(alpha grad theta) = source with the given boundary
/// conditions. `source` may be empty (zero source).
struct PoissonProblem {
  DiffusionCoefficient alpha;
  BoundarySpec bc;
  ScalarFn source;
};

struct AssembledSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd source;
  Scheme scheme = Scheme::uncorrected;
  Eigen::VectorXd mu;
};

/// Geometry accessor used by the stencil-local evaluators: the default
/// implementation reads the (already displaced) mesh, the displaced variant
/// recomputes geometry lazily from a point-wise displacement without touching
/// the rest of the mesh.
class GeometryView {
 public:
  explicit GeometryView(const Mesh& base) : base_(&base) {}
  virtual ~GeometryView() = default;

  const Mesh& topology() const { return *base_; }
  virtual double cell_volume(int c) const { return base_->cell_volume(c); }
  virtual Vec2 cell_centroid(int c) const { return base_->cell_centroid(c); }
  virtual Vec2 face_area(int f) const { return base_->face_area(f); }
  virtual Vec2 face_centroid(int f) const { return base_->face_centroid(f); }

 protected:
  const Mesh* base_;
};

/// Geometry of a displaced mesh evaluated only where asked: points move by
/// `displacement(point)`, cell and face geometry are recomputed on demand and
/// cached. Tracks how many distinct points/cells were touched so tests can
/// assert mesh-size independence of the online evaluation cost.
class DisplacedStencilGeometry final : public GeometryView {
 public:
  DisplacedStencilGeometry(const Mesh& base, std::function<Vec2(int)> displacement);

  double cell_volume(int c) const override;
  Vec2 cell_centroid(int c) const override;
  Vec2 face_area(int f) const override;
  Vec2 face_centroid(int f) const override;

  std::size_t points_touched() const { return point_pos_.size(); }
  std::size_t cells_touched() const { return cell_geo_.size(); }

 private:
  const Vec2& point(int p) const;
  const std::pair<double, Vec2>& cell(int c) const;

  std::function<Vec2(int)> disp_;
  mutable std::unordered_map<int, Vec2> point_pos_;
  mutable std::unordered_map<int, std::pair<double, Vec2>> cell_geo_;
};

/// Full-mesh assembly. For the corrected scheme the deferred explicit term is
/// evaluated at `theta_prev` (zero field when null) and folded into the
/// source, so repeated calls with updated iterates realize a Picard loop.
/// Increments the instrumented full-assembly counter.
AssembledSystem assemble_poisson(const Mesh& mesh, const PoissonProblem& problem,
                                 const Eigen::VectorXd& mu, Scheme scheme,
                                 const Eigen::VectorXd* theta_prev = nullptr);

struct FomOptions {
  int max_outer = 200;      // Picard iterations for the corrected scheme
  double tol = 1e-11;       // relative update threshold
  double relaxation = 0.8;  // damping of the deferred-correction update;
                            // same fixed point, contracts on rough meshes
};

struct FomResult {
  CellField theta;
  int outer_iterations = 1;
  double final_update = 0.0;
};

/// Direct solve (sparse Cholesky). The corrected scheme iterates the deferred
/// correction with the matrix factorized once; raises numerical_error with the
/// iteration count and last update when the loop does not converge.
FomResult solve_fom(const Mesh& mesh, const PoissonProblem& problem,
                    const Eigen::VectorXd& mu, Scheme scheme, const FomOptions& opts = {});

/// Single operator entry A(row, col) evaluated from the geometry of cell
/// `row`'s faces alone. Returns 0 for cells that share no face.
double poisson_operator_entry(const GeometryView& geo, const PoissonProblem& problem,
                              const Eigen::VectorXd& mu, Scheme scheme, int row, int col);

/// Single source entry b(row). `theta_prev(cell)` supplies the previous
/// iterate for the corrected scheme's deferred term (pass {} for the zero
/// field); it is consulted only for cells within two layers of `row`.
double poisson_source_entry(const GeometryView& geo, const PoissonProblem& problem,
                            const Eigen::VectorXd& mu, Scheme scheme, int row,
                            const std::function<double(int)>& theta_prev = {});

/// Green-Gauss cell gradient of a scalar field; boundary face values follow
/// the boundary conditions (Dirichlet value, or one-sided Neumann
/// extrapolation theta_c + g |x_f - x_c|).
Vec2 cell_gradient(const GeometryView& geo, const PoissonProblem& problem,
                   const Eigen::VectorXd& mu, int cell,
                   const std::function<double(int)>& theta);

/// Cells within `layers` face-adjacency hops of `cell` (the cell itself
/// first, then breadth-first discovery order, deterministic).
std::vector<int> extract_stencil(const Mesh& mesh, int cell, int layers);

/// Monotone counter of full-mesh assemblies performed by this process; lets
/// tests prove that reduced online solves never assemble at full size.
std::uint64_t full_assembly_count();

namespace detail {

/// Interpolation weight toward the owner cell for face values:
/// w = (x_j - x_f).(x_j - x_i) / |x_j - x_i|^2, clamped to [0, 1].
inline double face_weight(const Vec2& xi, const Vec2& xj, const Vec2& xf) {
  const Vec2 d = xj - xi;
  const double denom = d.squaredNorm();
  if (denom <= 0.0) return 0.5;
  const double w = (xj - xf).dot(d) / denom;
  return std::clamp(w, 0.0, 1.0);
}

inline double interior_coef(double alpha_f, const Vec2& S, const Vec2& d, Scheme scheme) {
  if (scheme == Scheme::uncorrected) return alpha_f * S.norm() / d.norm();
  return alpha_f * S.squaredNorm() / S.dot(d);
}

inline double boundary_coef(double alpha_f, const Vec2& S, const Vec2& db) {
  return alpha_f * S.norm() / db.norm();
}

/// Deferred non-orthogonal face correction, limited so its magnitude never
/// exceeds the implicit orthogonal contribution of the same face.
inline double limited_correction(double alpha_f, const Vec2& S, const Vec2& d, double sd,
                                 const Vec2& grad_face, double theta_i, double theta_j) {
  const Vec2 k = S - (S.squaredNorm() / sd) * d;
  double corr = alpha_f * k.dot(grad_face);
  const double bound = std::abs(alpha_f * (S.squaredNorm() / sd) * (theta_j - theta_i));
  if (std::abs(corr) > bound) corr = std::copysign(bound, corr);
  return corr;
}

/// Bumps the counter behind full_assembly_count(); every full-mesh assembly
/// routine calls this once.
void note_full_assembly();

}  // namespace detail

}  // namespace fvrom
