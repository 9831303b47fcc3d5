#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fvrom/errors.hpp"
#include "fvrom/fvm.hpp"
#include "fvrom/rom_poisson.hpp"

using namespace fvrom;

namespace {

StudyConfig small_config(int n_train, int cap) {
  StudyConfig cfg;
  cfg.train_lo = cfg.test_lo = Eigen::Vector2d(-0.25, -0.25);
  cfg.train_hi = cfg.test_hi = Eigen::Vector2d(0.25, 0.25);
  cfg.n_train = n_train;
  cfg.n_test = 4;
  cfg.seed = 2024;
  cfg.n_pod = cfg.n_deim = cap;
  cfg.n_motion_modes = cfg.n_motion_deim = std::min(2, cap);
  cfg.n_r_list = {cap};
  cfg.n_a_list = {cap};
  cfg.timing = false;
  return cfg;
}

Eigen::VectorXd volumes_of(const Mesh& mesh) {
  Eigen::VectorXd v(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) v[c] = mesh.cell_volume(c);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("study validation rejects malformed configurations") {
  const StudyConfig good = small_config(4, 2);
  CHECK_NOTHROW(validate_config(good));

  StudyConfig c = good;
  c.train_hi = Eigen::Vector3d(1, 1, 1);
  CHECK_THROWS_AS(validate_config(c), usage_error);

  c = good;
  c.train_lo[0] = c.train_hi[0] + 1.0;
  CHECK_THROWS_AS(validate_config(c), usage_error);

  c = good;
  c.test_hi[1] = c.train_hi[1] + 0.01;  // test box escapes the training box
  CHECK_THROWS_AS(validate_config(c), usage_error);

  c = good;
  c.n_train = 0;
  CHECK_THROWS_AS(validate_config(c), usage_error);

  c = good;
  c.n_r_list.clear();
  CHECK_THROWS_AS(validate_config(c), usage_error);

  c = good;
  c.n_r_list = {c.n_pod + 1};  // sweep larger than the trained basis
  CHECK_THROWS_AS(validate_config(c), usage_error);
}

TEST_CASE("relative volume-weighted error matches a hand computation") {
  Eigen::VectorXd vol(2);
  vol << 2.0, 0.5;
  CellField ref(Eigen::Vector2d(1.0, -2.0), 1);
  CellField approx(Eigen::Vector2d(1.3, -2.4), 1);

  // sqrt((2*0.09 + 0.5*0.16) / (2*1 + 0.5*4)) = sqrt(0.26/4)
  CHECK(relative_l2_error(approx, ref, vol) == doctest::Approx(0.25495097567963926).epsilon(1e-14));
  CHECK(relative_l2_error(ref, ref, vol) == 0.0);

  CellField wrong(Eigen::Vector3d(0, 0, 0), 1);
  CHECK_THROWS_AS((void)relative_l2_error(wrong, ref, vol), usage_error);
  CellField zero(Eigen::Vector2d(0, 0), 1);
  CHECK_THROWS_AS((void)relative_l2_error(ref, zero, vol), usage_error);
}

TEST_CASE("single-sample study reproduces its snapshot without full-size assembly") {
  const HeatBenchmark bench = heat_benchmark(8, 8);
  const HeatRomBundle bundle =
      heat_offline(bench.mesh, bench.motion, bench.problem, small_config(1, 1));

  REQUIRE(bundle.train_samples.size() == 1);
  CHECK(bundle.temperature.n_modes() == 1);
  CHECK(bundle.deim.max_modes() == 1);

  const auto assemblies_before = full_assembly_count();
  const OnlineSolution sol =
      heat_online(bundle, bench.motion, bench.problem, bundle.train_samples[0], 1, 1, 1);
  CHECK(full_assembly_count() == assemblies_before);  // reduced path never assembles

  const CellField rb = heat_reconstruct(bundle, sol.coefficients);
  const CellField snapshot(bundle.snapshots.col(0), 1);
  CHECK(relative_l2_error(rb, snapshot, volumes_of(bundle.mesh)) < 1e-8);
  CHECK(sol.condition >= 1.0);
  CHECK(sol.picard_iterations == 1);
}

TEST_CASE("full basis reproduces every training sample") {
  const HeatBenchmark bench = heat_benchmark(8, 8);
  const HeatRomBundle bundle =
      heat_offline(bench.mesh, bench.motion, bench.problem, small_config(6, 6));
  REQUIRE(bundle.train_samples.size() == 6);
  const Eigen::VectorXd vol = volumes_of(bundle.mesh);

  const auto assemblies_before = full_assembly_count();
  for (std::size_t k = 0; k < bundle.train_samples.size(); ++k) {
    const OnlineSolution sol =
        heat_online(bundle, bench.motion, bench.problem, bundle.train_samples[k], 6, 6, 6);
    const CellField rb = heat_reconstruct(bundle, sol.coefficients);
    const CellField snapshot(bundle.snapshots.col(static_cast<Eigen::Index>(k)), 1);
    CHECK(relative_l2_error(rb, snapshot, vol) < 1e-6);

    // reconstruction residual is orthogonal to the basis in the weighted
    // inner product
    const Eigen::VectorXd residual =
        rb.values - bundle.temperature.modes.leftCols(6) * sol.coefficients;
    const Eigen::VectorXd proj = bundle.temperature.modes.transpose() *
                                 (bundle.temperature.mass_diag.asDiagonal() * residual);
    CHECK(proj.cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(full_assembly_count() == assemblies_before);
}

TEST_CASE("corrected scheme iterates the deferred correction online") {
  const HeatBenchmark bench = heat_benchmark(8, 8);
  StudyConfig cfg = small_config(6, 6);
  cfg.scheme = Scheme::corrected;
  const HeatRomBundle bundle = heat_offline(bench.mesh, bench.motion, bench.problem, cfg);
  REQUIRE(bundle.train_samples.size() == 6);
  const Eigen::VectorXd vol = volumes_of(bundle.mesh);

  double worst = 0.0;
  int max_picard = 0;
  for (std::size_t k = 0; k < bundle.train_samples.size(); ++k) {
    const OnlineSolution sol =
        heat_online(bundle, bench.motion, bench.problem, bundle.train_samples[k], 6, 6, 6);
    const CellField rb = heat_reconstruct(bundle, sol.coefficients);
    const CellField snapshot(bundle.snapshots.col(static_cast<Eigen::Index>(k)), 1);
    worst = std::max(worst, relative_l2_error(rb, snapshot, vol));
    max_picard = std::max(max_picard, sol.picard_iterations);
  }
  CHECK(worst < 1e-6);
  CHECK(max_picard > 1);  // the deferred correction actually iterated
}

TEST_CASE("error sweep is deterministic and its reports are byte-stable") {
  const HeatBenchmark bench = heat_benchmark(8, 8);
  StudyConfig cfg = small_config(6, 6);
  cfg.n_r_list = {2, 6};
  cfg.n_a_list = {6};
  const HeatRomBundle bundle = heat_offline(bench.mesh, bench.motion, bench.problem, cfg);

  const ErrorReport a = error_sweep(bundle, bench.motion, bench.problem);
  const ErrorReport b = error_sweep(bundle, bench.motion, bench.problem);

  REQUIRE(a.entries.size() == 2);
  REQUIRE(a.test_samples.size() == 4);
  for (std::size_t e = 0; e < a.entries.size(); ++e) {
    REQUIRE(a.entries[e].per_sample.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(a.entries[e].per_sample[i] == b.entries[e].per_sample[i]);
    CHECK(a.entries[e].mean_error == b.entries[e].mean_error);
    CHECK(a.entries[e].mean_error > 0.0);
    CHECK(a.entries[e].fom_seconds == 0.0);  // timing disabled
  }
  // more temperature modes at fixed interpolation rank cannot hurt here
  CHECK(a.entries[1].mean_error < a.entries[0].mean_error);

  write_errors_csv("sweep_a.csv", a);
  write_errors_csv("sweep_b.csv", b);
  const std::string csv_a = slurp("sweep_a.csv");
  CHECK(csv_a == slurp("sweep_b.csv"));
  CHECK(csv_a.rfind("n_r,n_deim,mean_rel_err,speedup\n", 0) == 0);
  std::filesystem::remove("sweep_a.csv");
  std::filesystem::remove("sweep_b.csv");

  write_eigs_csv("eigs.csv", bundle);
  const std::string eigs = slurp("eigs.csv");
  CHECK(eigs.rfind("index,temperature,operator,source,motion\n", 0) == 0);
  CHECK(std::count(eigs.begin(), eigs.end(), '\n') == 7);  // header + 6 spectra rows
  std::filesystem::remove("eigs.csv");
}

TEST_CASE("inverted training meshes are skipped and recorded") {
  const HeatBenchmark bench = heat_benchmark(18, 18);
  StudyConfig cfg;
  cfg.train_lo = cfg.test_lo = Eigen::Vector2d(0.30, 0.30);
  cfg.train_hi = cfg.test_hi = Eigen::Vector2d(0.45, 0.45);
  cfg.n_train = 8;
  cfg.n_test = 1;
  cfg.seed = 77;
  cfg.motion.strategy = MotionStrategy::laplacian;
  cfg.n_pod = cfg.n_deim = 2;
  cfg.n_motion_modes = cfg.n_motion_deim = 2;
  cfg.n_r_list = {2};
  cfg.n_a_list = {2};
  cfg.timing = false;

  const HeatRomBundle bundle = heat_offline(bench.mesh, bench.motion, bench.problem, cfg);
  CHECK(bundle.train_samples.size() == 2);
  CHECK(bundle.skipped == std::vector<int>{0, 1, 2, 3, 4, 6});

  // shrinking the box to the far corner folds every draw
  cfg.train_lo = cfg.train_hi = Eigen::Vector2d(0.45, 0.45);
  cfg.test_lo = cfg.test_hi = cfg.train_lo;
  CHECK_THROWS_AS(
      (void)heat_offline(bench.mesh, bench.motion, bench.problem, cfg), numerical_error);
}

TEST_CASE("online reports the reduced-system condition and validates sizes") {
  const HeatBenchmark bench = heat_benchmark(8, 8);
  const HeatRomBundle bundle =
      heat_offline(bench.mesh, bench.motion, bench.problem, small_config(3, 3));

  const OnlineSolution sol = heat_online(bundle, bench.motion, bench.problem,
                                         Eigen::Vector2d(0.05, -0.1), 2, 3, 3);
  CHECK(sol.coefficients.size() == 2);
  CHECK(sol.condition >= 1.0);
  CHECK(std::isfinite(sol.condition));

  CHECK_THROWS_AS((void)heat_reconstruct(bundle, Eigen::VectorXd()), usage_error);
  CHECK_THROWS_AS((void)heat_reconstruct(bundle, Eigen::VectorXd::Zero(9)), usage_error);
}
