/// @file ns.hpp
/// Steady incompressible Navier-Stokes on collocated cell-centred FV meshes:
/// momentum assembly with upwind convection and optional non-orthogonal
/// diffusion correction, SIMPLE pressure-velocity coupling with momentum
/// interpolation for the face fluxes, and the channel-with-obstacle flow
/// benchmark.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fvrom/fvm.hpp"
#include "fvrom/mesh.hpp"
#include "fvrom/motion.hpp"

namespace fvrom {

/// Velocity/pressure treatment of one patch. `inlet` prescribes the velocity
/// (uniform, or position-dependent via `profile`) and extrapolates pressure
/// (zero normal gradient); `wall` is the no-slip special case; `outlet`
/// extrapolates velocity and fixes pressure to zero.
struct FlowBc {
  enum class Kind { inlet, wall, outlet };
  Kind kind = Kind::wall;
  Vec2 velocity = Vec2::Zero();                 // fixed-velocity kinds only
  std::function<Vec2(const Vec2&)> profile;     // overrides `velocity` when set

  static FlowBc inlet(const Vec2& u);
  static FlowBc inlet_profile(std::function<Vec2(const Vec2&)> fn);
  static FlowBc wall();
  static FlowBc outlet();

  Vec2 velocity_at(const Vec2& x) const { return profile ? profile(x) : velocity; }
};

/// Convective face value: first-order upwind, or second-order upwind (the
/// upwind-cell value plus its reconstructed gradient, applied as a deferred
/// correction on top of the implicit first-order coefficients).
enum class Convection { upwind, second_order_upwind };

/// Boundary conditions plus the discretization choices of the flow solver.
/// `scheme` selects the diffusion face-gradient treatment exactly as in the
/// scalar solver; the pressure equation follows the same choice.
struct FlowProblem {
  std::map<std::string, FlowBc> patches;
  Scheme scheme = Scheme::corrected;
  Convection convection = Convection::upwind;

  const FlowBc& at(const std::string& patch) const;
};

/// Solver controls for simple_solve; `nu` and the relaxation factors are
/// copied into the FlowState it evolves.
struct FlowOptions {
  double nu = 3e-3;      // kinematic viscosity
  double alpha_u = 0.7;  // implicit momentum under-relaxation in (0, 1]
  double alpha_p = 0.3;  // explicit pressure under-relaxation in (0, 1]
  double tol = 1e-6;     // on max(momentum, pressure) normalized residual
  int max_iter = 2000;
};

/// Velocity, kinematic pressure, the owner-outward face mass fluxes kept
/// consistent with them, and the physical/relaxation constants they were
/// computed with. At convergence the per-cell flux sums vanish to the
/// continuity tolerance.
struct FlowState {
  CellField u;  // 2 components
  CellField p;
  Eigen::VectorXd flux;
  double nu = 3e-3;
  double alpha_u = 0.7;
  double alpha_p = 0.3;
};

/// The SIMPLE operators of one outer iteration. The momentum matrix a_u is
/// shared by both velocity components and carries the implicit relaxation;
/// d_u is its (strictly positive) diagonal. b_u excludes the pressure
/// gradient, which enters the momentum solve separately so the pressure
/// stage can reuse the same source. h combines the source with the
/// off-diagonal product, h = b_u - (a_u - diag(d_u)) u, evaluated at the
/// tentative velocity; the pressure system a_p, b_p discretizes
/// div((V/d_u) grad p) = div of the tentative fluxes psi (momentum-
/// interpolated S . (h/d_u), prescribed values on fixed-velocity faces).
struct SimpleOperators {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_u;
  Eigen::VectorXd d_u;
  Eigen::MatrixXd b_u;  // n_cells x 2
  Eigen::MatrixXd h;    // n_cells x 2
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_p;
  Eigen::VectorXd b_p;
  Eigen::VectorXd psi;     // tentative face fluxes entering b_p
  Eigen::VectorXd p_coef;  // per-face pressure coefficient of a_p (0 on fixed-velocity faces)
  Eigen::VectorXd p_corr;  // per-face deferred non-orthogonal pressure term
};

/// Assembles the linearized momentum operator about state (momentum part of
/// SimpleOperators: a_u, d_u, b_u). Convection uses state.flux (first-order
/// upwind implicitly; the second-order variant adds an explicit
/// upwind-gradient correction), diffusion follows problem.scheme with its
/// deferred non-orthogonal correction evaluated at state.u, and the diagonal
/// is implicitly under-relaxed with state.alpha_u against state.u. Throws
/// numerical_error on a non-positive relaxed diagonal.
SimpleOperators assemble_momentum(const Mesh& mesh, const FlowProblem& problem,
                                  const FlowState& state);

/// Fills the pressure half of ops (h, a_p, b_p, psi) about the tentative
/// velocity u_star; state supplies the previous pressure for the deferred
/// non-orthogonal correction. When the mesh has no outlet face, the first
/// cell is pinned to p = 0 as the pressure reference.
void assemble_pressure(const Mesh& mesh, const FlowProblem& problem, const FlowState& state,
                       const Eigen::MatrixXd& u_star, SimpleOperators& ops);

/// Face fluxes consistent with the solved pressure: psi_f minus the pressure
/// face term of a_p. The per-cell sums of the result equal the residual of
/// the pressure solve, so they vanish to solver precision.
Eigen::VectorXd correct_fluxes(const Mesh& mesh, const FlowProblem& problem,
                               const SimpleOperators& ops, const Eigen::VectorXd& p);

/// Per-cell sum of outward face fluxes (the discrete continuity defect).
Eigen::VectorXd continuity_defect(const Mesh& mesh, const Eigen::VectorXd& flux);

/// Green-Gauss cell gradient of the pressure under the flow boundary
/// conditions (outlet zero value, zero normal gradient elsewhere).
Eigen::MatrixXd pressure_gradient(const Mesh& mesh, const FlowProblem& problem,
                                  const Eigen::VectorXd& p);

struct FlowResult {
  FlowState state;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // max(r_u, r_p) per iteration
};

/// SIMPLE fixed-point loop: momentum predictor with the current pressure,
/// pressure solve from the divergence of the momentum-interpolated tentative
/// fluxes, conservative flux correction, explicit pressure relaxation with
/// alpha_p, velocity update. Starts from the first inlet velocity everywhere
/// (or `initial` when given). Throws numerical_error when the residual grows
/// over 50 consecutive iterations or max_iter is exhausted, with the
/// residual history attached to the message.
FlowResult simple_solve(const Mesh& mesh, const FlowProblem& problem,
                        const FlowOptions& opts = {}, const FlowState* initial = nullptr);

/// The incompressible-flow benchmark: channel [0, 3] x [0, 1.5] with a square
/// obstacle of side 0.08 centred at (1, 0.75), rotated about its centre by
/// mu[0] degrees (angle-of-attack analogue). Inlet 1 m/s on the left,
/// no-slip top/bottom walls and obstacle, outlet on the right; defaults give
/// 2970 cells. At nu = 3e-3 the obstacle Reynolds number stays below the
/// vortex-shedding threshold over the full +-10 degree rotation range, so
/// simple_solve reaches a steady state at every sample.
struct ChannelBenchmark {
  Mesh mesh;
  BoundaryMotion motion;
  FlowProblem problem;
};

ChannelBenchmark channel_benchmark(int n_tangential_x = 30, int n_tangential_y = 15,
                                   int n_radial = 33);

}  // namespace fvrom
