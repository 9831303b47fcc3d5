/// @file rom_poisson.hpp
/// Offline/online reduced-order pipeline for the geometrically parametrized
/// heat-transfer benchmark: snapshot training over a sampled parameter box,
/// POD plus empirical-interpolation compression, a mesh-size-independent
/// online query, and an error/speedup sweep with CSV reporting.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fvrom/deim.hpp"
#include "fvrom/fvm.hpp"
#include "fvrom/motion.hpp"
#include "fvrom/reduction.hpp"

namespace fvrom {

/// Study definition: parameter boxes, sample counts and seed, motion and
/// discretization choices, training caps, and the reduced-size sweep grid.
/// Defaults reproduce the square-with-hole heat-transfer benchmark.
struct StudyConfig {
  Eigen::VectorXd train_lo = Eigen::Vector2d(-0.32, -0.32);
  Eigen::VectorXd train_hi = Eigen::Vector2d(0.32, 0.32);
  Eigen::VectorXd test_lo = Eigen::Vector2d(-0.28, -0.28);
  Eigen::VectorXd test_hi = Eigen::Vector2d(0.28, 0.28);
  int n_train = 100;
  int n_test = 100;
  std::uint64_t seed = 424242;  // training draw; the test draw uses seed + 1

  MotionOptions motion;  // rbf with radius 0.6, coarsening ratio 2 by default
  Scheme scheme = Scheme::uncorrected;
  FomOptions fom;

  int n_pod = 15;          // temperature modes trained (clamped to kept samples)
  int n_deim = 15;         // operator/source interpolation terms trained
  int n_motion_modes = 2;  // reduced mesh-motion sizes
  int n_motion_deim = 2;

  std::vector<int> n_r_list{2, 5, 10, 15};
  std::vector<int> n_a_list{15};  // sweep uses N_f = N_A

  bool timing = true;   // measure wall times (disable for byte-stable CSVs)
  int timing_reps = 5;  // timings are medians over this many repetitions
};

/// Throws usage_error on malformed boxes (dimension mismatch, lo > hi, test
/// box not contained in the training box), non-positive counts or caps, or an
/// empty sweep list.
void validate_config(const StudyConfig& config);

/// Everything the online phase needs, produced by heat_offline.
struct HeatRomBundle {
  Mesh mesh;  // undeformed reference configuration
  StudyConfig config;
  std::vector<Eigen::VectorXd> train_samples;  // kept (non-skipped) draws
  std::vector<int> skipped;                    // draw indices with inverted meshes
  Eigen::MatrixXd snapshots;                   // temperature snapshots, cells x kept
  PodBasis temperature;  // mass-weighted by the mean-configuration volumes
  DeimModel deim;
  MotionRom motion_rom;           // reduced Laplacian-smoothing motion model
  std::vector<int> rbf_controls;  // boundary control points for the rbf strategy
  RbfFactorization rbf_factorization;  // control-point system, factored once
};

/// Trains the reduced model: draws n_train parameter samples, deforms the
/// mesh and solves the full problem per sample (samples whose deformed mesh
/// has inverted cells are recorded in `skipped` and excluded; any other
/// failure aborts with the sample identified), then extracts the temperature
/// basis weighted by the volumes of the mean deformed configuration, the
/// operator/source interpolation model, the reduced mesh-motion model, and
/// the stored boundary control points.
HeatRomBundle heat_offline(const Mesh& mesh, const BoundaryMotion& bm,
                           const PoissonProblem& problem, const StudyConfig& config);

/// Result of one reduced query.
struct OnlineSolution {
  Eigen::VectorXd coefficients;  // reduced coordinates, length n_r
  double condition = 0.0;        // SVD condition estimate of the reduced matrix
  int picard_iterations = 1;     // > 1 only for the corrected scheme
};

/// Reduced solve at mu with n_r solution modes, n_a operator terms, and n_f
/// source terms: reduced (or control-point) mesh motion, magic-row sampling
/// of the operator and source on lazily displaced stencil geometry, and the
/// dense n_r x n_r solve. Cost is independent of the mesh size and no
/// full-size operator is ever assembled. The corrected scheme iterates the
/// deferred correction on the reduced coefficients, reconstructing previous
/// iterates only at the stencil cells of the magic rows. Throws
/// numerical_error (with the condition estimate) when the reduced matrix is
/// singular.
OnlineSolution heat_online(const HeatRomBundle& bundle, const BoundaryMotion& bm,
                           const PoissonProblem& problem, const Eigen::VectorXd& mu, int n_r,
                           int n_a, int n_f);

/// Full-size reconstruction theta = modes * coefficients. O(cells x n_r);
/// kept separate from heat_online so timing and assembly-counter assertions
/// isolate the reduced query path.
CellField heat_reconstruct(const HeatRomBundle& bundle, const Eigen::VectorXd& coefficients);

/// Relative volume-weighted L2 distance ||approx - reference|| / ||reference||.
double relative_l2_error(const CellField& approx, const CellField& reference,
                         const Eigen::VectorXd& volumes);

/// Error and speedup report of a sweep over reduced sizes.
struct ErrorReport {
  struct Entry {
    int n_r = 0, n_a = 0, n_f = 0;
    double mean_error = 0.0;         // mean over test samples of the relative
                                     // L2 error on each sample's deformed mesh
    std::vector<double> per_sample;  // one error per test sample
    double fom_seconds = 0.0;        // mean over samples of the median
                                     // full-order query time
    double rom_seconds = 0.0;        // same for the reduced query
    double speedup = 0.0;            // fom_seconds / rom_seconds
  };
  std::vector<Entry> entries;  // grouped by n_a, then ordered by n_r
  std::vector<Eigen::VectorXd> test_samples;
};

/// Runs the full solve once per test sample (field and volume weights), then
/// evaluates every (n_r, n_a = n_f) pair of the config sweep. Timings are
/// medians over config.timing_reps repetitions of the complete query
/// (deform + assemble + solve for the full order, reduced query without
/// reconstruction for the reduced order); zeros when timing is disabled.
ErrorReport error_sweep(const HeatRomBundle& bundle, const BoundaryMotion& bm,
                        const PoissonProblem& problem);

/// One row per sweep entry with columns n_r, n_deim, mean_rel_err, speedup
/// (the sweep couples the operator and source term counts, reported as
/// n_deim). Deterministic formatting (shortest round-trippable decimal); with
/// timing disabled speedups are zero and the file is byte-stable across runs.
void write_errors_csv(const std::string& path, const ErrorReport& report);

/// Descending correlation spectra of the trained decompositions, one row per
/// index: temperature, operator, source, and mesh-motion eigenvalues (empty
/// cells where a spectrum is shorter).
void write_eigs_csv(const std::string& path, const HeatRomBundle& bundle);

/// The heat-transfer benchmark at its reference resolution: square with a
/// square hole (8 axis-aligned blocks, 2448 cells at the default 16/18
/// subdivisions), hole translation by mu as the moving-boundary data, unit
/// diffusivity, zero source, hot outer bottom/top walls, inflow/outflow
/// normal-gradient data on the outer left/right walls, cold hole.
struct HeatBenchmark {
  Mesh mesh;
  BoundaryMotion motion;
  PoissonProblem problem;
};

HeatBenchmark heat_benchmark(int n_tangential = 16, int n_radial = 18);

}  // namespace fvrom
