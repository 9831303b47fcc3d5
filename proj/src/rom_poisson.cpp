#include "fvrom/rom_poisson.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

#include "fvrom/errors.hpp"
#include "fvrom/sampling.hpp"

namespace fvrom {

namespace {

std::string format_mu(const Eigen::VectorXd& mu) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu[i];
  os << ")";
  return os.str();
}

Eigen::VectorXd cell_volumes(const Mesh& mesh) {
  Eigen::VectorXd v(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) v[c] = mesh.cell_volume(c);
  return v;
}

/// Median wall time of `reps` executions of fn, in seconds.
template <class Fn>
double median_seconds(int reps, Fn&& fn) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void write_g17(std::ofstream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void validate_config(const StudyConfig& config) {
  const Eigen::Index dim = config.train_lo.size();
  if (dim == 0) throw usage_error("study config: empty parameter box");
  if (config.train_hi.size() != dim || config.test_lo.size() != dim ||
      config.test_hi.size() != dim)
    throw usage_error("study config: parameter box dimensions disagree");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (config.train_lo[i] > config.train_hi[i] || config.test_lo[i] > config.test_hi[i])
      throw usage_error("study config: box lower bound exceeds upper bound");
    if (config.test_lo[i] < config.train_lo[i] || config.test_hi[i] > config.train_hi[i])
      throw usage_error("study config: test box must lie inside the training box");
  }
  if (config.n_train < 1 || config.n_test < 1)
    throw usage_error("study config: sample counts must be at least 1");
  if (config.n_pod < 1 || config.n_deim < 1 || config.n_motion_modes < 1 ||
      config.n_motion_deim < 1)
    throw usage_error("study config: mode counts must be at least 1");
  if (config.n_r_list.empty() || config.n_a_list.empty())
    throw usage_error("study config: sweep lists must be non-empty");
  for (int n : config.n_r_list)
    if (n < 1 || n > config.n_pod)
      throw usage_error("study config: swept n_r outside [1, n_pod]");
  for (int n : config.n_a_list)
    if (n < 1 || n > config.n_deim)
      throw usage_error("study config: swept n_a outside [1, n_deim]");
  if (config.timing_reps < 1) throw usage_error("study config: timing_reps must be at least 1");
}

HeatRomBundle heat_offline(const Mesh& mesh, const BoundaryMotion& bm,
                           const PoissonProblem& problem, const StudyConfig& config) {
  validate_config(config);

  HeatRomBundle bundle{mesh, config, {}, {}, {}, {}, {}, {}, {}, {}};

  const auto draws = sample_box(config.train_lo, config.train_hi, config.n_train, config.seed);
  const int nc = mesh.n_cells();

  std::vector<Eigen::VectorXd> thetas, rhs;
  std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> operators;
  PointField mean_disp(static_cast<std::size_t>(mesh.n_points()), Vec2::Zero());

  for (std::size_t k = 0; k < draws.size(); ++k) {
    const Eigen::VectorXd& mu = draws[k];
    try {
      const PointField d = solve_motion(mesh, bm, mu, config.motion);
      const Mesh moved = mesh.displace(d);
      if (moved.quality().negative_volume_cells > 0) {
        bundle.skipped.push_back(static_cast<int>(k));
        continue;
      }
      FomResult fom = solve_fom(moved, problem, mu, config.scheme, config.fom);
      AssembledSystem sys =
          assemble_poisson(moved, problem, mu, config.scheme, &fom.theta.values);
      thetas.push_back(std::move(fom.theta.values));
      operators.push_back(std::move(sys.matrix));
      rhs.push_back(std::move(sys.source));
      bundle.train_samples.push_back(mu);
      for (int p = 0; p < mesh.n_points(); ++p) mean_disp[static_cast<std::size_t>(p)] += d[static_cast<std::size_t>(p)];
    } catch (const std::exception& e) {
      throw numerical_error("heat_offline: training sample " + std::to_string(k) + " at mu = " +
                            format_mu(mu) + " failed: " + e.what());
    }
  }

  const int kept = static_cast<int>(bundle.train_samples.size());
  if (kept == 0)
    throw numerical_error("heat_offline: every training sample produced an inverted mesh");

  for (Vec2& v : mean_disp) v /= static_cast<double>(kept);
  const Eigen::VectorXd mass = cell_volumes(mesh.displace(mean_disp));

  bundle.snapshots.resize(nc, kept);
  for (int j = 0; j < kept; ++j) bundle.snapshots.col(j) = thetas[static_cast<std::size_t>(j)];

  const int n_pod = std::min(config.n_pod, kept);
  bundle.temperature = pod_field(bundle.snapshots, mass, n_pod);

  const int n_deim = std::min(config.n_deim, kept);
  const OperatorPod op_pod = pod_operator(operators, n_deim);
  Eigen::MatrixXd sources(nc, kept);
  for (int j = 0; j < kept; ++j) sources.col(j) = rhs[static_cast<std::size_t>(j)];
  const PodBasis source_pod = pod_vector(sources, n_deim);
  bundle.deim = deim_train(op_pod, source_pod, bundle.temperature.modes);

  bundle.motion_rom = train_motion_rom(mesh, bm, bundle.train_samples,
                                       std::min(config.n_motion_modes, kept),
                                       std::min(config.n_motion_deim, kept));
  bundle.rbf_controls =
      select_control_points(mesh, mesh.patch_names(), config.motion.coarsen_ratio);
  std::vector<Vec2> centers;
  centers.reserve(bundle.rbf_controls.size());
  for (const int idx : bundle.rbf_controls) centers.push_back(mesh.point(idx));
  bundle.rbf_factorization = factor_rbf(centers, config.motion.rbf_radius);
  return bundle;
}

OnlineSolution heat_online(const HeatRomBundle& bundle, const BoundaryMotion& bm,
                           const PoissonProblem& problem, const Eigen::VectorXd& mu, int n_r,
                           int n_a, int n_f) {
  const Mesh& mesh = bundle.mesh;
  const Scheme scheme = bundle.config.scheme;
  const BoundDeim bound = deim_bind(bundle.deim, n_r, n_a, n_f);

  // Point displacement with evaluation cost independent of the mesh size.
  std::function<Vec2(int)> displacement;
  if (bundle.config.motion.strategy == MotionStrategy::laplacian) {
    Eigen::VectorXd coef = motion_rom_coefficients(bundle.motion_rom, mesh, bm, mu);
    displacement = [&bundle, &mesh, &bm, mu, coef = std::move(coef)](int p) {
      return motion_rom_point(bundle.motion_rom, mesh, bm, mu, coef, p);
    };
  } else {
    RbfInterpolant interp =
        fit_control_rbf(mesh, bm, mu, bundle.rbf_controls, bundle.rbf_factorization);
    displacement = [&mesh, &bm, mu, interp = std::move(interp)](int p) -> Vec2 {
      if (auto d = prescribed_point_displacement(mesh, bm, mu, p)) return *d;
      return interp.evaluate(mesh.point(p));
    };
  }
  const DisplacedStencilGeometry geo(mesh, displacement);

  Eigen::VectorXd entries(static_cast<Eigen::Index>(bound.entry_rows.size()));
  for (std::size_t i = 0; i < bound.entry_rows.size(); ++i)
    entries[static_cast<Eigen::Index>(i)] =
        poisson_operator_entry(geo, problem, mu, scheme, bound.entry_rows[i], bound.entry_cols[i]);
  const Eigen::MatrixXd reduced = deim_online_matrix(bound, entries);

  OnlineSolution sol;
  {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    sol.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smin > smax * 1e-14)) {
      std::ostringstream os;
      os << "heat_online: reduced matrix is singular (condition estimate " << sol.condition
         << ")";
      throw numerical_error(os.str());
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(reduced);

  const Eigen::MatrixXd& modes = bundle.temperature.modes;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n_r);

  const auto reduced_source = [&](const Eigen::VectorXd& coef) {
    std::function<double(int)> theta_prev;
    if (scheme == Scheme::corrected)
      theta_prev = [&modes, &coef, n_r](int c) { return modes.row(c).head(n_r).dot(coef); };
    Eigen::VectorXd rows(static_cast<Eigen::Index>(bound.source_rows.size()));
    for (std::size_t j = 0; j < bound.source_rows.size(); ++j)
      rows[static_cast<Eigen::Index>(j)] =
          poisson_source_entry(geo, problem, mu, scheme, bound.source_rows[j], theta_prev);
    return deim_online_source(bound, rows);
  };

  if (scheme == Scheme::uncorrected) {
    a = lu.solve(reduced_source(a));
    sol.picard_iterations = 1;
  } else {
    const FomOptions& fo = bundle.config.fom;
    bool converged = false;
    for (int it = 1; it <= fo.max_outer; ++it) {
      const Eigen::VectorXd next = lu.solve(reduced_source(a));
      const Eigen::VectorXd update = fo.relaxation * (next - a);
      a += update;
      sol.picard_iterations = it;
      if (update.norm() <= fo.tol * std::max(a.norm(), 1e-300)) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw numerical_error("heat_online: deferred-correction iteration did not converge in " +
                            std::to_string(fo.max_outer) + " steps");
  }
  sol.coefficients = std::move(a);
  return sol;
}

CellField heat_reconstruct(const HeatRomBundle& bundle, const Eigen::VectorXd& coefficients) {
  const Eigen::Index n_r = coefficients.size();
  if (n_r < 1 || n_r > bundle.temperature.modes.cols())
    throw usage_error("heat_reconstruct: coefficient count outside the trained basis");
  return CellField(bundle.temperature.modes.leftCols(n_r) * coefficients, 1);
}

double relative_l2_error(const CellField& approx, const CellField& reference,
                         const Eigen::VectorXd& volumes) {
  if (approx.values.size() != reference.values.size() ||
      approx.components != reference.components)
    throw usage_error("relative_l2_error: field shapes disagree");
  const double den = l2_norm(reference.values, reference.components, volumes);
  const double num =
      l2_norm(approx.values - reference.values, reference.components, volumes);
  if (den == 0.0) throw usage_error("relative_l2_error: reference field is zero");
  return num / den;
}

ErrorReport error_sweep(const HeatRomBundle& bundle, const BoundaryMotion& bm,
                        const PoissonProblem& problem) {
  const StudyConfig& cfg = bundle.config;
  const Mesh& mesh = bundle.mesh;

  ErrorReport report;
  report.test_samples = sample_box(cfg.test_lo, cfg.test_hi, cfg.n_test, cfg.seed + 1);

  struct Reference {
    CellField theta;
    Eigen::VectorXd volumes;
    double seconds = 0.0;
  };
  std::vector<Reference> refs;
  refs.reserve(report.test_samples.size());

  for (const Eigen::VectorXd& mu : report.test_samples) {
    const auto full_query = [&] {
      const Mesh moved = mesh.displace(solve_motion(mesh, bm, mu, cfg.motion));
      FomResult fom = solve_fom(moved, problem, mu, cfg.scheme, cfg.fom);
      return std::pair<FomResult, Eigen::VectorXd>(std::move(fom), cell_volumes(moved));
    };
    auto [fom, volumes] = full_query();
    Reference ref;
    ref.theta = std::move(fom.theta);
    ref.volumes = std::move(volumes);
    if (cfg.timing) ref.seconds = median_seconds(cfg.timing_reps, [&] { (void)full_query(); });
    refs.push_back(std::move(ref));
  }

  for (int n_a : cfg.n_a_list)
    for (int n_r : cfg.n_r_list) {
      ErrorReport::Entry entry;
      entry.n_r = n_r;
      entry.n_a = n_a;
      entry.n_f = n_a;

      double err_sum = 0.0, fom_sum = 0.0, rom_sum = 0.0;
      for (std::size_t i = 0; i < report.test_samples.size(); ++i) {
        const Eigen::VectorXd& mu = report.test_samples[i];
        const OnlineSolution sol = heat_online(bundle, bm, problem, mu, n_r, n_a, n_a);
        const CellField rb = heat_reconstruct(bundle, sol.coefficients);
        const double err = relative_l2_error(rb, refs[i].theta, refs[i].volumes);
        entry.per_sample.push_back(err);
        err_sum += err;
        fom_sum += refs[i].seconds;
        if (cfg.timing)
          rom_sum += median_seconds(cfg.timing_reps, [&] {
            (void)heat_online(bundle, bm, problem, mu, n_r, n_a, n_a);
          });
      }
      const double n = static_cast<double>(report.test_samples.size());
      entry.mean_error = err_sum / n;
      if (cfg.timing) {
        entry.fom_seconds = fom_sum / n;
        entry.rom_seconds = rom_sum / n;
        entry.speedup = entry.rom_seconds > 0.0 ? entry.fom_seconds / entry.rom_seconds : 0.0;
      }
      report.entries.push_back(std::move(entry));
    }
  return report;
}

void write_errors_csv(const std::string& path, const ErrorReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw usage_error("write_errors_csv: cannot open '" + path + "'");
  out << "n_r,n_deim,mean_rel_err,speedup\n";
  for (const ErrorReport::Entry& e : report.entries) {
    out << e.n_r << ',' << e.n_a << ',';
    write_g17(out, e.mean_error);
    out << ',';
    write_g17(out, e.speedup);
    out << '\n';
  }
  if (!out) throw usage_error("write_errors_csv: write to '" + path + "' failed");
}

void write_eigs_csv(const std::string& path, const HeatRomBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw usage_error("write_eigs_csv: cannot open '" + path + "'");
  const Eigen::VectorXd& t = bundle.temperature.eigenvalues;
  const Eigen::VectorXd& a = bundle.deim.operator_eigenvalues;
  const Eigen::VectorXd& f = bundle.deim.source_eigenvalues;
  const Eigen::VectorXd& m = bundle.motion_rom.eigenvalues;
  const Eigen::Index rows = std::max({t.size(), a.size(), f.size(), m.size()});
  out << "index,temperature,operator,source,motion\n";
  for (Eigen::Index i = 0; i < rows; ++i) {
    out << i;
    for (const Eigen::VectorXd* col : {&t, &a, &f, &m}) {
      out << ',';
      if (i < col->size()) write_g17(out, (*col)[i]);
    }
    out << '\n';
  }
  if (!out) throw usage_error("write_eigs_csv: write to '" + path + "' failed");
}

HeatBenchmark heat_benchmark(int n_tangential, int n_radial) {
  HeatBenchmark bench{
      build_block_mesh(square_with_hole_spec(Vec2(-1.5, -1.5), Vec2(1.5, 1.5), Vec2(-0.5, -0.5),
                                             Vec2(0.5, 0.5), n_tangential, n_radial)),
      BoundaryMotion::translation({"inner_bottom", "inner_right", "inner_top", "inner_left"}),
      {}};

  bench.problem.alpha.constant = 1.0;
  bench.problem.source = {};
  bench.problem.bc.patches = {
      {"outer_left", BoundaryCondition::neumann_value(10.0)},
      {"outer_top", BoundaryCondition::dirichlet_value(10.0)},
      {"outer_right", BoundaryCondition::neumann_value(-10.0)},
      {"outer_bottom", BoundaryCondition::dirichlet_value(10.0)},
      {"inner_left", BoundaryCondition::dirichlet_value(-10.0)},
      {"inner_top", BoundaryCondition::dirichlet_value(0.0)},
      {"inner_right", BoundaryCondition::dirichlet_value(0.0)},
      {"inner_bottom", BoundaryCondition::dirichlet_value(0.0)},
  };
  return bench;
}

}  // namespace fvrom
