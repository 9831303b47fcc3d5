#include "fvrom/fvm.hpp"

#include <Eigen/SparseCholesky>
#include <atomic>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "fvrom/errors.hpp"

namespace fvrom {

namespace {

std::atomic<std::uint64_t> g_full_assembly_count{0};

/// Boundary conditions resolved to patch indices; validates exact coverage.
std::vector<const BoundaryCondition*> resolve_bc(const Mesh& mesh, const BoundarySpec& bc) {
  std::vector<const BoundaryCondition*> table(mesh.n_patches(), nullptr);
  for (int p = 0; p < mesh.n_patches(); ++p) {
    auto it = bc.patches.find(mesh.patch_name(p));
    if (it == bc.patches.end())
      throw usage_error("boundary spec: no condition for patch '" + mesh.patch_name(p) + "'");
    table[p] = &it->second;
  }
  for (const auto& [name, cond] : bc.patches) {
    (void)cond;
    bool found = false;
    for (int p = 0; p < mesh.n_patches(); ++p)
      if (mesh.patch_name(p) == name) found = true;
    if (!found)
      throw usage_error("boundary spec: condition for unknown patch '" + name + "'");
  }
  return table;
}

double face_alpha_interior(const DiffusionCoefficient& alpha, int i, int j, double w) {
  if (alpha.cellwise == nullptr) return alpha.constant;
  return w * (*alpha.cellwise)[i] + (1.0 - w) * (*alpha.cellwise)[j];
}

double face_alpha_boundary(const DiffusionCoefficient& alpha, int owner) {
  if (alpha.cellwise == nullptr) return alpha.constant;
  return (*alpha.cellwise)[owner];
}

[[noreturn]] void throw_non_positive_sd(int f, const Vec2& S, const Vec2& d) {
  std::ostringstream os;
  os << "assembly: face " << f << " has S.d = " << S.dot(d)
     << " <= 0 (severely non-orthogonal or inverted geometry)";
  throw numerical_error(os.str());
}

double theta_or_zero(const std::function<double(int)>& theta, int c) {
  return theta ? theta(c) : 0.0;
}

}  // namespace

namespace detail {
void note_full_assembly() { ++g_full_assembly_count; }
}  // namespace detail

BoundaryCondition BoundaryCondition::dirichlet_value(double v) {
  return {Kind::dirichlet, [v](const Vec2&, const Eigen::VectorXd&) { return v; }};
}
BoundaryCondition BoundaryCondition::dirichlet_fn(ScalarFn fn) {
  return {Kind::dirichlet, std::move(fn)};
}
BoundaryCondition BoundaryCondition::neumann_value(double v) {
  return {Kind::neumann, [v](const Vec2&, const Eigen::VectorXd&) { return v; }};
}
BoundaryCondition BoundaryCondition::neumann_fn(ScalarFn fn) {
  return {Kind::neumann, std::move(fn)};
}

const BoundaryCondition& BoundarySpec::at(const std::string& patch) const {
  auto it = patches.find(patch);
  if (it == patches.end())
    throw usage_error("boundary spec: no condition for patch '" + patch + "'");
  return it->second;
}

DisplacedStencilGeometry::DisplacedStencilGeometry(const Mesh& base,
                                                   std::function<Vec2(int)> displacement)
    : GeometryView(base), disp_(std::move(displacement)) {}

const Vec2& DisplacedStencilGeometry::point(int p) const {
  auto it = point_pos_.find(p);
  if (it == point_pos_.end())
    it = point_pos_.emplace(p, Vec2(base_->point(p) + disp_(p))).first;
  return it->second;
}

const std::pair<double, Vec2>& DisplacedStencilGeometry::cell(int c) const {
  auto it = cell_geo_.find(c);
  if (it == cell_geo_.end()) {
    std::vector<Vec2> loop;
    loop.reserve(base_->cell_points(c).size());
    for (int p : base_->cell_points(c)) loop.push_back(point(p));
    it = cell_geo_.emplace(c, std::make_pair(polygon_signed_area(loop), polygon_centroid(loop)))
             .first;
  }
  return it->second;
}

double DisplacedStencilGeometry::cell_volume(int c) const { return cell(c).first; }
Vec2 DisplacedStencilGeometry::cell_centroid(int c) const { return cell(c).second; }

Vec2 DisplacedStencilGeometry::face_area(int f) const {
  const Face& face = base_->face(f);
  return rotate_cw(point(face.pts[1]) - point(face.pts[0]));
}

Vec2 DisplacedStencilGeometry::face_centroid(int f) const {
  const Face& face = base_->face(f);
  return 0.5 * (point(face.pts[0]) + point(face.pts[1]));
}

Vec2 cell_gradient(const GeometryView& geo, const PoissonProblem& problem,
                   const Eigen::VectorXd& mu, int c,
                   const std::function<double(int)>& theta) {
  const Mesh& topo = geo.topology();
  const auto bc_table = resolve_bc(topo, problem.bc);
  Vec2 acc = Vec2::Zero();
  for (int f : topo.cell_faces(c)) {
    const Face& face = topo.face(f);
    const Vec2 S = geo.face_area(f);
    double theta_f;
    double sign = 1.0;
    if (!face.is_boundary()) {
      const int i = face.owner, j = face.neighbour;
      const double w =
          detail::face_weight(geo.cell_centroid(i), geo.cell_centroid(j), geo.face_centroid(f));
      theta_f = w * theta_or_zero(theta, i) + (1.0 - w) * theta_or_zero(theta, j);
      if (face.owner != c) sign = -1.0;
    } else {
      const BoundaryCondition& cond = *bc_table[face.patch];
      const Vec2 xf = geo.face_centroid(f);
      if (cond.kind == BoundaryCondition::Kind::dirichlet) {
        theta_f = cond.value(xf, mu);
      } else {
        theta_f = theta_or_zero(theta, c) +
                  cond.value(xf, mu) * (xf - geo.cell_centroid(c)).norm();
      }
    }
    acc += (sign * theta_f) * S;
  }
  return acc / geo.cell_volume(c);
}

AssembledSystem assemble_poisson(const Mesh& mesh, const PoissonProblem& problem,
                                 const Eigen::VectorXd& mu, Scheme scheme,
                                 const Eigen::VectorXd* theta_prev) {
  detail::note_full_assembly();
  const auto bc_table = resolve_bc(mesh, problem.bc);
  const int nc = mesh.n_cells();
  if (theta_prev != nullptr && theta_prev->size() != nc)
    throw usage_error("assemble_poisson: theta_prev has wrong size");

  std::function<double(int)> theta_at;
  if (theta_prev != nullptr) theta_at = [theta_prev](int c) { return (*theta_prev)[c]; };

  GeometryView geo(mesh);
  std::vector<Vec2> grad;
  if (scheme == Scheme::corrected) {
    grad.resize(nc);
    for (int c = 0; c < nc; ++c) grad[c] = cell_gradient(geo, problem, mu, c, theta_at);
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5) * nc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc);

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Vec2 S = mesh.face_area(f);
    if (!face.is_boundary()) {
      const int i = face.owner, j = face.neighbour;
      const Vec2 d = mesh.owner_to_neighbour(f);
      const double sd = S.dot(d);
      if (sd <= 0.0) throw_non_positive_sd(f, S, d);
      const double w =
          detail::face_weight(mesh.cell_centroid(i), mesh.cell_centroid(j), mesh.face_centroid(f));
      const double alpha_f = face_alpha_interior(problem.alpha, i, j, w);
      const double coef = detail::interior_coef(alpha_f, S, d, scheme);
      trip.emplace_back(i, i, coef);
      trip.emplace_back(i, j, -coef);
      trip.emplace_back(j, j, coef);
      trip.emplace_back(j, i, -coef);
      if (scheme == Scheme::corrected) {
        const Vec2 grad_face = w * grad[i] + (1.0 - w) * grad[j];
        const double corr = detail::limited_correction(alpha_f, S, d, sd, grad_face,
                                               theta_or_zero(theta_at, i),
                                               theta_or_zero(theta_at, j));
        rhs[i] += corr;
        rhs[j] -= corr;
      }
    } else {
      const int i = face.owner;
      const BoundaryCondition& cond = *bc_table[face.patch];
      const Vec2 xf = mesh.face_centroid(f);
      const double alpha_b = face_alpha_boundary(problem.alpha, i);
      if (cond.kind == BoundaryCondition::Kind::dirichlet) {
        const Vec2 db = xf - mesh.cell_centroid(i);
        const double coef = detail::boundary_coef(alpha_b, S, db);
        trip.emplace_back(i, i, coef);
        rhs[i] += coef * cond.value(xf, mu);
      } else {
        rhs[i] += alpha_b * S.norm() * cond.value(xf, mu);
      }
    }
  }

  if (problem.source)
    for (int c = 0; c < nc; ++c) rhs[c] += problem.source(mesh.cell_centroid(c), mu) * mesh.cell_volume(c);

  AssembledSystem sys;
  sys.matrix.resize(nc, nc);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  sys.source = std::move(rhs);
  sys.scheme = scheme;
  sys.mu = mu;
  return sys;
}

FomResult solve_fom(const Mesh& mesh, const PoissonProblem& problem,
                    const Eigen::VectorXd& mu, Scheme scheme, const FomOptions& opts) {
  // Orthogonal-part solve; also the initial iterate for the corrected scheme.
  AssembledSystem sys = assemble_poisson(mesh, problem, mu, Scheme::uncorrected);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  {
    Eigen::SparseMatrix<double> a_col = sys.matrix;
    ldlt.compute(a_col);
  }
  if (ldlt.info() != Eigen::Success)
    throw numerical_error("solve_fom: sparse Cholesky factorization failed");
  Eigen::VectorXd theta = ldlt.solve(sys.source);

  if (scheme == Scheme::uncorrected) {
    FomResult res;
    res.theta = CellField(std::move(theta), 1);
    res.outer_iterations = 1;
    return res;
  }

  AssembledSystem csys = assemble_poisson(mesh, problem, mu, Scheme::corrected, &theta);
  {
    Eigen::SparseMatrix<double> a_col = csys.matrix;
    ldlt.compute(a_col);
  }
  if (ldlt.info() != Eigen::Success)
    throw numerical_error("solve_fom: corrected-scheme factorization failed");

  double update = 0.0;
  for (int it = 1; it <= opts.max_outer; ++it) {
    Eigen::VectorXd theta_new =
        (1.0 - opts.relaxation) * theta + opts.relaxation * ldlt.solve(csys.source).eval();
    update = (theta_new - theta).norm() / std::max(theta_new.norm(), 1e-300);
    theta = std::move(theta_new);
    if (update <= opts.tol) {
      FomResult res;
      res.theta = CellField(std::move(theta), 1);
      res.outer_iterations = it;
      res.final_update = update;
      return res;
    }
    csys = assemble_poisson(mesh, problem, mu, Scheme::corrected, &theta);
  }
  std::ostringstream os;
  os << "solve_fom: deferred-correction loop did not converge after " << opts.max_outer
     << " iterations (last relative update = " << update << ")";
  throw numerical_error(os.str());
}

double poisson_operator_entry(const GeometryView& geo, const PoissonProblem& problem,
                              const Eigen::VectorXd& mu, Scheme scheme, int row, int col) {
  (void)mu;  // operator entries depend on geometry only, not boundary values
  const Mesh& topo = geo.topology();
  if (row < 0 || row >= topo.n_cells() || col < 0 || col >= topo.n_cells())
    throw usage_error("poisson_operator_entry: cell index out of range");
  const auto bc_table = resolve_bc(topo, problem.bc);

  double acc = 0.0;
  for (int f : topo.cell_faces(row)) {
    const Face& face = topo.face(f);
    if (!face.is_boundary()) {
      const int i = face.owner, j = face.neighbour;
      const int other = (i == row) ? j : i;
      const Vec2 S = geo.face_area(f);
      const Vec2 d = geo.cell_centroid(j) - geo.cell_centroid(i);
      const double sd = S.dot(d);
      if (sd <= 0.0) throw_non_positive_sd(f, S, d);
      const double w =
          detail::face_weight(geo.cell_centroid(i), geo.cell_centroid(j), geo.face_centroid(f));
      const double alpha_f = face_alpha_interior(problem.alpha, i, j, w);
      const double coef = detail::interior_coef(alpha_f, S, d, scheme);
      if (col == row)
        acc += coef;
      else if (col == other)
        acc -= coef;
    } else if (col == row) {
      const BoundaryCondition& cond = *bc_table[face.patch];
      if (cond.kind == BoundaryCondition::Kind::dirichlet) {
        const Vec2 S = geo.face_area(f);
        const Vec2 db = geo.face_centroid(f) - geo.cell_centroid(row);
        acc += detail::boundary_coef(face_alpha_boundary(problem.alpha, row), S, db);
      }
    }
  }
  return acc;
}

double poisson_source_entry(const GeometryView& geo, const PoissonProblem& problem,
                            const Eigen::VectorXd& mu, Scheme scheme, int row,
                            const std::function<double(int)>& theta_prev) {
  const Mesh& topo = geo.topology();
  if (row < 0 || row >= topo.n_cells())
    throw usage_error("poisson_source_entry: cell index out of range");
  const auto bc_table = resolve_bc(topo, problem.bc);

  double acc = 0.0;
  for (int f : topo.cell_faces(row)) {
    const Face& face = topo.face(f);
    if (face.is_boundary()) {
      const BoundaryCondition& cond = *bc_table[face.patch];
      const Vec2 S = geo.face_area(f);
      const Vec2 xf = geo.face_centroid(f);
      const double alpha_b = face_alpha_boundary(problem.alpha, row);
      if (cond.kind == BoundaryCondition::Kind::dirichlet) {
        const Vec2 db = xf - geo.cell_centroid(row);
        acc += detail::boundary_coef(alpha_b, S, db) * cond.value(xf, mu);
      } else {
        acc += alpha_b * S.norm() * cond.value(xf, mu);
      }
    } else if (scheme == Scheme::corrected) {
      const int i = face.owner, j = face.neighbour;
      const Vec2 S = geo.face_area(f);
      const Vec2 d = geo.cell_centroid(j) - geo.cell_centroid(i);
      const double sd = S.dot(d);
      if (sd <= 0.0) throw_non_positive_sd(f, S, d);
      const double w =
          detail::face_weight(geo.cell_centroid(i), geo.cell_centroid(j), geo.face_centroid(f));
      const double alpha_f = face_alpha_interior(problem.alpha, i, j, w);
      const Vec2 grad_face = w * cell_gradient(geo, problem, mu, i, theta_prev) +
                             (1.0 - w) * cell_gradient(geo, problem, mu, j, theta_prev);
      const double corr = detail::limited_correction(alpha_f, S, d, sd, grad_face,
                                             theta_or_zero(theta_prev, i),
                                             theta_or_zero(theta_prev, j));
      acc += (row == i) ? corr : -corr;
    }
  }
  if (problem.source) acc += problem.source(geo.cell_centroid(row), mu) * geo.cell_volume(row);
  return acc;
}

std::vector<int> extract_stencil(const Mesh& mesh, int cell, int layers) {
  if (cell < 0 || cell >= mesh.n_cells())
    throw usage_error("extract_stencil: cell index out of range");
  if (layers < 0) throw usage_error("extract_stencil: negative layer count");

  std::vector<int> order{cell};
  std::unordered_set<int> seen{cell};
  std::size_t level_begin = 0;
  for (int layer = 0; layer < layers; ++layer) {
    const std::size_t level_end = order.size();
    for (std::size_t k = level_begin; k < level_end; ++k) {
      for (int f : mesh.cell_faces(order[k])) {
        const Face& face = mesh.face(f);
        if (face.is_boundary()) continue;
        const int other = (face.owner == order[k]) ? face.neighbour : face.owner;
        if (seen.insert(other).second) order.push_back(other);
      }
    }
    level_begin = level_end;
  }
  return order;
}

std::uint64_t full_assembly_count() { return g_full_assembly_count.load(); }

}  // namespace fvrom
