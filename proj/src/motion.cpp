#include "fvrom/motion.hpp"

#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fvrom/deim.hpp"
#include "fvrom/errors.hpp"
#include "fvrom/fvm.hpp"
#include "fvrom/reduction.hpp"

namespace fvrom {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Moving patch indices of the mesh; throws for names absent from the mesh.
std::vector<int> moving_patch_indices(const Mesh& mesh, const BoundaryMotion& bm) {
  std::vector<int> out;
  for (const auto& [name, fn] : bm.patches) {
    (void)fn;
    try {
      out.push_back(mesh.patch_index(name));
    } catch (const std::out_of_range&) {
      throw usage_error("boundary motion names unknown patch '" + name + "'");
    }
  }
  return out;
}

/// Dirichlet boundary conditions of one displacement component: prescribed
/// motion on moving patches, zero elsewhere.
BoundarySpec motion_bc(const Mesh& mesh, const BoundaryMotion& bm, int component) {
  BoundarySpec bc;
  for (const std::string& name : mesh.patch_names()) {
    auto it = bm.patches.find(name);
    if (it == bm.patches.end()) {
      bc.patches.emplace(name, BoundaryCondition::dirichlet_value(0.0));
    } else {
      const DisplacementFn fn = it->second;
      bc.patches.emplace(name, BoundaryCondition::dirichlet_fn(
                                   [fn, component](const Vec2& x, const Eigen::VectorXd& mu) {
                                     return fn(x, mu)[component];
                                   }));
    }
  }
  return bc;
}

/// Inverse-distance transfer of cell values to one point.
Vec2 transfer_to_point(const Mesh& mesh, int point, const std::function<Vec2(int)>& cell_value) {
  const Vec2& x = mesh.point(point);
  Vec2 acc = Vec2::Zero();
  double wsum = 0.0;
  for (int c : mesh.point_cells(point)) {
    const double dist = (mesh.cell_centroid(c) - x).norm();
    if (dist < 1e-14) return cell_value(c);
    const double w = 1.0 / dist;
    acc += w * cell_value(c);
    wsum += w;
  }
  if (wsum == 0.0) throw numerical_error("point without adjacent cells in cell-to-point transfer");
  return acc / wsum;
}

}  // namespace

BoundaryMotion BoundaryMotion::translation(const std::vector<std::string>& patch_names) {
  BoundaryMotion bm;
  for (const auto& name : patch_names)
    bm.patches.emplace(name, [](const Vec2&, const Eigen::VectorXd& mu) {
      if (mu.size() < 2) throw usage_error("translation motion needs a 2-component parameter");
      return Vec2(mu[0], mu[1]);
    });
  return bm;
}

BoundaryMotion BoundaryMotion::rotation(const std::vector<std::string>& patch_names,
                                        const Vec2& center) {
  BoundaryMotion bm;
  for (const auto& name : patch_names)
    bm.patches.emplace(name, [center](const Vec2& x, const Eigen::VectorXd& mu) {
      if (mu.size() < 1) throw usage_error("rotation motion needs a 1-component parameter");
      const double a = mu[0] * kPi / 180.0;
      const double c = std::cos(a), s = std::sin(a);
      const Vec2 r = x - center;
      return Vec2(c * r.x() - s * r.y() - r.x(), s * r.x() + c * r.y() - r.y());
    });
  return bm;
}

std::optional<Vec2> prescribed_point_displacement(const Mesh& mesh, const BoundaryMotion& bm,
                                                  const Eigen::VectorXd& mu, int point) {
  const std::vector<int>& patches = mesh.point_patches(point);
  if (patches.empty()) return std::nullopt;
  Vec2 acc = Vec2::Zero();
  int moving = 0;
  for (int p : patches) {
    auto it = bm.patches.find(mesh.patch_name(p));
    if (it == bm.patches.end()) continue;
    acc += it->second(mesh.point(point), mu);
    ++moving;
  }
  if (moving == 0) return Vec2(Vec2::Zero());
  return Vec2(acc / moving);
}

Eigen::VectorXd motion_diffusivity(const Mesh& mesh, const BoundaryMotion& bm) {
  std::vector<Vec2> moving_centroids;
  for (int p : moving_patch_indices(mesh, bm))
    for (int f : mesh.patch_faces(p)) moving_centroids.push_back(mesh.face_centroid(f));
  if (moving_centroids.empty())
    throw usage_error("boundary motion lists no moving patch with faces");

  const double floor = 0.01 * mesh.min_cell_size();
  Eigen::VectorXd gamma(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double r = std::numeric_limits<double>::infinity();
    for (const Vec2& x : moving_centroids)
      r = std::min(r, (mesh.cell_centroid(c) - x).norm());
    r = std::max(r, floor);
    gamma[c] = 1.0 / (r * r);
  }
  return gamma;
}

PointField laplacian_motion(const Mesh& mesh, const BoundaryMotion& bm,
                            const Eigen::VectorXd& mu) {
  const Eigen::VectorXd gamma = motion_diffusivity(mesh, bm);

  PoissonProblem prob_x, prob_y;
  prob_x.alpha.cellwise = &gamma;
  prob_y.alpha.cellwise = &gamma;
  prob_x.bc = motion_bc(mesh, bm, 0);
  prob_y.bc = motion_bc(mesh, bm, 1);

  const AssembledSystem sys_x = assemble_poisson(mesh, prob_x, mu, Scheme::uncorrected);
  const AssembledSystem sys_y = assemble_poisson(mesh, prob_y, mu, Scheme::uncorrected);

  // identical matrices (boundary-value independent): factorize once
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(
      Eigen::SparseMatrix<double>(sys_x.matrix));
  if (solver.info() != Eigen::Success)
    throw numerical_error("laplacian_motion: factorization of the motion operator failed");
  const Eigen::VectorXd sx = solver.solve(sys_x.source);
  const Eigen::VectorXd sy = solver.solve(sys_y.source);
  if (solver.info() != Eigen::Success)
    throw numerical_error("laplacian_motion: linear solve failed");

  PointField out(mesh.n_points(), Vec2::Zero());
  for (int p = 0; p < mesh.n_points(); ++p) {
    if (auto d = prescribed_point_displacement(mesh, bm, mu, p)) {
      out[p] = *d;
    } else {
      out[p] = transfer_to_point(mesh, p, [&](int c) { return Vec2(sx[c], sy[c]); });
    }
  }
  return out;
}

Vec2 RbfInterpolant::evaluate(const Vec2& x) const {
  Vec2 out(delta(0, 0) + delta(1, 0) * x.x() + delta(2, 0) * x.y(),
           delta(0, 1) + delta(1, 1) * x.x() + delta(2, 1) * x.y());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double r = (x - centers[i]).norm() / radius;
    const double k = std::exp(-r * r);
    out.x() += beta(static_cast<Eigen::Index>(i), 0) * k;
    out.y() += beta(static_cast<Eigen::Index>(i), 1) * k;
  }
  return out;
}

RbfFactorization factor_rbf(const std::vector<Vec2>& centers, double radius) {
  const int n = static_cast<int>(centers.size());
  if (radius <= 0.0) throw usage_error("fit_rbf: kernel radius must be positive");
  if (n < 3) throw usage_error("fit_rbf: at least 3 control points required");

  Eigen::MatrixXd poly(n, 3);
  for (int i = 0; i < n; ++i) poly.row(i) << 1.0, centers[i].x(), centers[i].y();
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(poly).rank() < 3)
    throw usage_error("fit_rbf: degenerate control polygon (collinear control points)");

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = (centers[i] - centers[j]).norm() / radius;
      system(i, j) = std::exp(-r * r);
    }
  system.block(0, n, n, 3) = poly;
  system.block(n, 0, 3, n) = poly.transpose();

  // Rank-truncating decomposition: see the header note on near-singular
  // kernel matrices.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-13);
  const Eigen::Index rank = svd.rank();

  RbfFactorization fact;
  fact.centers = centers;
  fact.radius = radius;
  fact.ut = svd.matrixU().leftCols(rank).transpose();
  fact.inverted_sing = svd.singularValues().head(rank).cwiseInverse();
  fact.v = svd.matrixV().leftCols(rank);
  return fact;
}

RbfInterpolant apply_rbf(const RbfFactorization& fact, const Eigen::MatrixXd& values) {
  const int n = fact.n_centers();
  if (values.rows() != n || values.cols() != 2)
    throw usage_error("fit_rbf: expected one 2-component displacement per control point");

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
  rhs.topRows(n) = values;
  const Eigen::MatrixXd sol = fact.v * (fact.inverted_sing.asDiagonal() * (fact.ut * rhs));

  RbfInterpolant out;
  out.centers = fact.centers;
  out.radius = fact.radius;
  out.beta = sol.topRows(n);
  out.delta = sol.bottomRows(3);
  return out;
}

RbfInterpolant fit_rbf(const std::vector<Vec2>& centers, const Eigen::MatrixXd& values,
                       double radius) {
  return apply_rbf(factor_rbf(centers, radius), values);
}

std::vector<int> select_control_points(const Mesh& mesh, const std::vector<std::string>& patches,
                                       double coarsen_ratio) {
  if (coarsen_ratio < 1.0) throw usage_error("select_control_points: coarsening ratio must be >= 1");
  if (patches.empty()) throw usage_error("select_control_points: no patches given");

  std::set<int> selected;
  for (const std::string& name : patches) {
    int patch;
    try {
      patch = mesh.patch_index(name);
    } catch (const std::out_of_range&) {
      throw usage_error("select_control_points: unknown patch '" + name + "'");
    }
    const std::vector<int>& faces = mesh.patch_faces(patch);
    if (faces.empty()) throw usage_error("select_control_points: patch '" + name + "' has no faces");

    // point adjacency along the patch
    std::map<int, std::vector<int>> adj;
    for (int f : faces) {
      const Face& face = mesh.face(f);
      adj[face.pts[0]].push_back(face.pts[1]);
      adj[face.pts[1]].push_back(face.pts[0]);
    }
    for (auto& [p, nb] : adj) {
      (void)p;
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    // walk each connected chain (lowest point index first, endpoints before
    // loop interiors) and pick arc-length-uniform targets along it
    std::set<int> visited;
    while (visited.size() < adj.size()) {
      int start = -1;
      for (const auto& [p, nb] : adj)  // prefer an unvisited endpoint
        if (!visited.count(p) && nb.size() == 1) {
          start = p;
          break;
        }
      if (start < 0)
        for (const auto& [p, nb] : adj) {
          (void)nb;
          if (!visited.count(p)) {
            start = p;
            break;
          }
        }

      std::vector<int> chain{start};
      visited.insert(start);
      bool open_chain = adj[start].size() == 1;
      for (;;) {
        int next = -1;
        for (int nb : adj[chain.back()])
          if (!visited.count(nb)) {
            next = nb;
            break;
          }
        if (next < 0) break;
        chain.push_back(next);
        visited.insert(next);
      }

      const int count = static_cast<int>(chain.size());
      std::vector<double> arc(count, 0.0);
      for (int k = 1; k < count; ++k)
        arc[k] = arc[k - 1] + (mesh.point(chain[k]) - mesh.point(chain[k - 1])).norm();
      double total = arc.back();
      if (!open_chain) total += (mesh.point(chain.front()) - mesh.point(chain.back())).norm();

      const int want = static_cast<int>(std::ceil(count / coarsen_ratio));
      if (want >= count || count == 1) {
        selected.insert(chain.begin(), chain.end());
        continue;
      }
      for (int j = 0; j < want; ++j) {
        const double target =
            open_chain ? (want == 1 ? 0.5 * total : total * j / (want - 1)) : total * j / want;
        int best = 0;
        for (int k = 1; k < count; ++k)
          if (std::abs(arc[k] - target) < std::abs(arc[best] - target)) best = k;
        selected.insert(chain[best]);
      }
    }
  }
  return std::vector<int>(selected.begin(), selected.end());
}

PointField rbf_motion(const Mesh& mesh, const RbfInterpolant& interp, const BoundaryMotion& bm,
                      const Eigen::VectorXd& mu) {
  PointField out(mesh.n_points(), Vec2::Zero());
  for (int p = 0; p < mesh.n_points(); ++p) {
    if (auto d = prescribed_point_displacement(mesh, bm, mu, p))
      out[p] = *d;
    else
      out[p] = interp.evaluate(mesh.point(p));
  }
  return out;
}

namespace {

Eigen::MatrixXd control_values(const Mesh& mesh, const BoundaryMotion& bm,
                               const Eigen::VectorXd& mu, const std::vector<int>& controls) {
  (void)moving_patch_indices(mesh, bm);  // validate patch names up front
  Eigen::MatrixXd values(static_cast<Eigen::Index>(controls.size()), 2);
  for (std::size_t i = 0; i < controls.size(); ++i) {
    const auto d = prescribed_point_displacement(mesh, bm, mu, controls[i]);
    if (!d) throw usage_error("fit_control_rbf: control point is not a boundary point");
    values.row(static_cast<Eigen::Index>(i)) = d->transpose();
  }
  return values;
}

}  // namespace

RbfInterpolant fit_control_rbf(const Mesh& mesh, const BoundaryMotion& bm,
                               const Eigen::VectorXd& mu, const std::vector<int>& controls,
                               double radius) {
  std::vector<Vec2> centers;
  centers.reserve(controls.size());
  for (const int idx : controls) centers.push_back(mesh.point(idx));
  return fit_rbf(centers, control_values(mesh, bm, mu, controls), radius);
}

RbfInterpolant fit_control_rbf(const Mesh& mesh, const BoundaryMotion& bm,
                               const Eigen::VectorXd& mu, const std::vector<int>& controls,
                               const RbfFactorization& fact) {
  if (static_cast<std::size_t>(fact.n_centers()) != controls.size())
    throw usage_error("fit_control_rbf: factorization does not match the control point set");
  return apply_rbf(fact, control_values(mesh, bm, mu, controls));
}

PointField solve_motion(const Mesh& mesh, const BoundaryMotion& bm, const Eigen::VectorXd& mu,
                        const MotionOptions& opts) {
  if (opts.strategy == MotionStrategy::laplacian) return laplacian_motion(mesh, bm, mu);

  const std::vector<int> controls =
      select_control_points(mesh, mesh.patch_names(), opts.coarsen_ratio);
  const RbfInterpolant interp = fit_control_rbf(mesh, bm, mu, controls, opts.rbf_radius);
  return rbf_motion(mesh, interp, bm, mu);
}

MotionRom train_motion_rom(const Mesh& mesh, const BoundaryMotion& bm,
                           const std::vector<Eigen::VectorXd>& samples, int n_modes, int n_deim) {
  if (samples.empty()) throw usage_error("train_motion_rom: no training samples");
  const int n_snap = static_cast<int>(samples.size());
  const int nc = mesh.n_cells();

  MotionRom rom;
  rom.cell_count = nc;
  rom.gamma = motion_diffusivity(mesh, bm);

  PoissonProblem prob_x, prob_y;
  prob_x.alpha.cellwise = &rom.gamma;
  prob_y.alpha.cellwise = &rom.gamma;
  prob_x.bc = motion_bc(mesh, bm, 0);
  prob_y.bc = motion_bc(mesh, bm, 1);

  const AssembledSystem sys0 = assemble_poisson(mesh, prob_x, samples[0], Scheme::uncorrected);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(
      Eigen::SparseMatrix<double>(sys0.matrix));
  if (solver.info() != Eigen::Success)
    throw numerical_error("train_motion_rom: factorization of the motion operator failed");

  Eigen::MatrixXd disp_snaps(2 * nc, n_snap);
  Eigen::MatrixXd rhs_snaps(2 * nc, n_snap);
  for (int j = 0; j < n_snap; ++j) {
    const Eigen::VectorXd bx = assemble_poisson(mesh, prob_x, samples[j], Scheme::uncorrected).source;
    const Eigen::VectorXd by = assemble_poisson(mesh, prob_y, samples[j], Scheme::uncorrected).source;
    rhs_snaps.col(j).head(nc) = bx;
    rhs_snaps.col(j).tail(nc) = by;
    disp_snaps.col(j).head(nc) = solver.solve(bx);
    disp_snaps.col(j).tail(nc) = solver.solve(by);
  }

  Eigen::VectorXd mass(2 * nc);
  mass.head(nc) = mesh.cell_volumes();
  mass.tail(nc) = mesh.cell_volumes();
  PodBasis pod = pod_field(disp_snaps, mass, n_modes);
  rom.modes = std::move(pod.modes);
  rom.eigenvalues = std::move(pod.eigenvalues);

  const auto& lx = rom.modes.topRows(nc);
  const auto& ly = rom.modes.bottomRows(nc);
  rom.reduced_operator = lx.transpose() * (sys0.matrix * lx).eval() +
                         ly.transpose() * (sys0.matrix * ly).eval();

  const PodBasis rhs_pod = pod_vector(rhs_snaps, n_deim);
  rom.rhs_eigenvalues = rhs_pod.eigenvalues;
  const DeimSelection sel = deim_select(rhs_pod.modes);
  rom.magic_rows = sel.points;
  rom.rhs_condition = sel.condition;
  rom.rhs_blocks = (rom.modes.transpose() * rhs_pod.modes) * sel.interp.fullPivLu().inverse();
  return rom;
}

Eigen::VectorXd motion_rom_coefficients(const MotionRom& rom, const Mesh& mesh,
                                        const BoundaryMotion& bm, const Eigen::VectorXd& mu) {
  PoissonProblem prob_x, prob_y;
  prob_x.alpha.cellwise = &rom.gamma;
  prob_y.alpha.cellwise = &rom.gamma;
  prob_x.bc = motion_bc(mesh, bm, 0);
  prob_y.bc = motion_bc(mesh, bm, 1);
  const GeometryView geo(mesh);

  Eigen::VectorXd sampled(static_cast<Eigen::Index>(rom.magic_rows.size()));
  for (std::size_t k = 0; k < rom.magic_rows.size(); ++k) {
    const int row = rom.magic_rows[k];
    const int cell = row % rom.cell_count;
    const bool y_half = row >= rom.cell_count;
    sampled[static_cast<Eigen::Index>(k)] =
        poisson_source_entry(geo, y_half ? prob_y : prob_x, mu, Scheme::uncorrected, cell);
  }
  return rom.reduced_operator.ldlt().solve(rom.rhs_blocks * sampled);
}

Vec2 motion_rom_point(const MotionRom& rom, const Mesh& mesh, const BoundaryMotion& bm,
                      const Eigen::VectorXd& mu, const Eigen::VectorXd& coef, int point) {
  if (auto d = prescribed_point_displacement(mesh, bm, mu, point)) return *d;
  return transfer_to_point(mesh, point, [&](int c) {
    return Vec2(rom.modes.row(c) * coef, rom.modes.row(rom.cell_count + c) * coef);
  });
}

PointField solve_motion_rom(const MotionRom& rom, const Mesh& mesh, const BoundaryMotion& bm,
                            const Eigen::VectorXd& mu) {
  const Eigen::VectorXd coef = motion_rom_coefficients(rom, mesh, bm, mu);
  PointField out(mesh.n_points(), Vec2::Zero());
  for (int p = 0; p < mesh.n_points(); ++p)
    out[p] = motion_rom_point(rom, mesh, bm, mu, coef, p);
  return out;
}

}  // namespace fvrom
