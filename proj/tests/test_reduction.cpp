#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <vector>

#include "fvrom/deim.hpp"
#include "fvrom/errors.hpp"
#include "fvrom/reduction.hpp"
#include "fvrom/sampling.hpp"

using namespace fvrom;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

/// Reference greedy selection, written independently of the library: residual
/// via least-squares over the already-chosen rows, argmax by linear scan.
std::vector<int> reference_greedy(const Eigen::MatrixXd& basis) {
  const int n = static_cast<int>(basis.rows());
  const int m = static_cast<int>(basis.cols());
  std::vector<int> pts;
  for (int l = 0; l < m; ++l) {
    Eigen::VectorXd r = basis.col(l);
    if (l > 0) {
      Eigen::MatrixXd sub(l, l);
      Eigen::VectorXd rhs(l);
      for (int a = 0; a < l; ++a) {
        for (int b = 0; b < l; ++b) sub(a, b) = basis(pts[a], b);
        rhs[a] = basis(pts[a], l);
      }
      r -= basis.leftCols(l) * sub.colPivHouseholderQr().solve(rhs);
    }
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(r[i]) > std::abs(r[best])) best = i;
    pts.push_back(best);
  }
  return pts;
}

}  // namespace

TEST_CASE("pod modes are mass-orthonormal and capture the trace energy") {
  const int n = 60, n_snap = 12;
  const Eigen::MatrixXd snaps = random_matrix(n, n_snap, 101);
  SplitMix64 rng(202);
  Eigen::VectorXd mass(n);
  for (int i = 0; i < n; ++i) mass[i] = rng.uniform(0.2, 3.0);

  const PodBasis basis = pod_field(snaps, mass, n_snap);
  REQUIRE(basis.n_modes() == n_snap);
  REQUIRE(basis.eigenvalues.size() == n_snap);

  const Eigen::MatrixXd gram =
      basis.modes.transpose() * (mass.asDiagonal() * basis.modes);
  CHECK((gram - Eigen::MatrixXd::Identity(n_snap, n_snap)).cwiseAbs().maxCoeff() < 1e-10);

  // descending spectrum, and its sum equals the mean squared M-norm of the
  // snapshots (trace of the correlation matrix)
  double energy = 0.0;
  for (int j = 0; j < n_snap; ++j)
    energy += snaps.col(j).dot(mass.asDiagonal() * snaps.col(j));
  energy /= n_snap;
  CHECK(basis.eigenvalues.sum() == doctest::Approx(energy).epsilon(1e-12));
  for (int i = 1; i < n_snap; ++i) CHECK(basis.eigenvalues[i] <= basis.eigenvalues[i - 1] + 1e-14);
}

TEST_CASE("pod recovers an exactly low-rank ensemble") {
  const int n = 50, n_snap = 8, rank = 3;
  const Eigen::MatrixXd directions = random_matrix(n, rank, 303);
  const Eigen::MatrixXd coefs = random_matrix(rank, n_snap, 404);
  const Eigen::MatrixXd snaps = directions * coefs;
  const Eigen::VectorXd mass = Eigen::VectorXd::Constant(n, 0.7);

  const PodBasis basis = pod_field(snaps, mass, rank);
  // trailing eigenvalues collapse
  const PodBasis full = pod_field(snaps, mass, rank);  // spectrum is always full length
  for (int i = rank; i < n_snap; ++i)
    CHECK(std::abs(full.eigenvalues[i]) < 1e-12 * full.eigenvalues[0]);

  // every snapshot is reproduced by its projection onto the modes
  for (int j = 0; j < n_snap; ++j) {
    const Eigen::VectorXd coef =
        basis.modes.transpose() * (mass.asDiagonal() * snaps.col(j));
    const Eigen::VectorXd err = snaps.col(j) - basis.modes * coef;
    CHECK(err.norm() < 1e-9 * snaps.col(j).norm());
  }

  CHECK_THROWS_AS((void)pod_field(snaps, mass, rank + 1), numerical_error);
}

TEST_CASE("pod projection error is nonincreasing in the mode count") {
  const int n = 40, n_snap = 10;
  // synthetic ensemble with geometrically decaying spectrum
  const Eigen::MatrixXd u = random_matrix(n, n_snap, 505);
  Eigen::MatrixXd snaps(n, n_snap);
  for (int j = 0; j < n_snap; ++j) {
    snaps.col(j).setZero();
    SplitMix64 rng(600 + j);
    for (int k = 0; k < n_snap; ++k)
      snaps.col(j) += std::pow(0.5, k) * rng.uniform(-1.0, 1.0) * u.col(k);
  }
  const Eigen::VectorXd mass = Eigen::VectorXd::Ones(n);

  double prev = std::numeric_limits<double>::infinity();
  for (int m : {1, 3, 6, 10}) {
    const PodBasis basis = pod_vector(snaps, m);
    double worst = 0.0;
    for (int j = 0; j < n_snap; ++j) {
      const Eigen::VectorXd coef = basis.modes.transpose() * snaps.col(j);
      worst = std::max(worst, (snaps.col(j) - basis.modes * coef).norm() / snaps.col(j).norm());
    }
    CHECK(worst <= prev + 1e-14);
    prev = worst;
    if (m == 10) CHECK(worst < 1e-10);
  }
}

TEST_CASE("operator pattern union is lexicographic and gather/scatter round-trips") {
  using Sp = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  std::vector<Eigen::Triplet<double>> t1{{0, 0, 2.0}, {0, 1, -1.0}, {1, 1, 3.0}, {3, 2, 5.0}};
  std::vector<Eigen::Triplet<double>> t2{{0, 0, 1.0}, {1, 0, -2.0}, {2, 3, 4.0}, {3, 2, 1.5}};
  Sp m1(4, 4), m2(4, 4);
  m1.setFromTriplets(t1.begin(), t1.end());
  m2.setFromTriplets(t2.begin(), t2.end());

  const OperatorPattern pat = union_pattern({m1, m2});
  const std::vector<int> want_rows{0, 0, 1, 1, 2, 3};
  const std::vector<int> want_cols{0, 1, 0, 1, 3, 2};
  REQUIRE(pat.nnz() == 6);
  CHECK(pat.rows == want_rows);
  CHECK(pat.cols == want_cols);
  CHECK(pat.find(2, 3) == 4);
  CHECK(pat.find(2, 2) == -1);

  const Eigen::VectorXd v1 = gather_pattern_values(pat, m1);
  CHECK(v1[2] == 0.0);  // (1,0) absent from m1
  CHECK(v1[4] == 0.0);  // (2,3) absent from m1
  CHECK(v1[5] == 5.0);

  const Sp back = scatter_pattern_values(pat, v1);
  CHECK((Eigen::MatrixXd(back) - Eigen::MatrixXd(m1)).cwiseAbs().maxCoeff() == 0.0);

  Sp outside(4, 4);
  std::vector<Eigen::Triplet<double>> t3{{2, 2, 1.0}};
  outside.setFromTriplets(t3.begin(), t3.end());
  CHECK_THROWS_AS((void)gather_pattern_values(pat, outside), usage_error);
}

TEST_CASE("greedy interpolation points match an independent reference on 20 cases") {
  for (int c = 0; c < 20; ++c) {
    const int rows = 20 + 3 * c;
    const int cols = 3 + (c % 6);
    const Eigen::MatrixXd raw = random_matrix(rows, cols, 1000 + c);
    // orthonormalize so the columns behave like POD output
    const Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
        Eigen::MatrixXd::Identity(rows, cols);

    const DeimSelection sel = deim_select(basis);
    const std::vector<int> want = reference_greedy(basis);
    REQUIRE(sel.points.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(sel.points[i] == want[i]);

    for (int a = 0; a < cols; ++a)
      for (int b = 0; b < cols; ++b) CHECK(sel.interp(a, b) == basis(sel.points[a], b));
    CHECK(sel.condition >= 1.0);
  }
}

TEST_CASE("interpolation is exact on the span of the basis") {
  const Eigen::MatrixXd basis = random_matrix(45, 5, 777);
  const DeimSelection sel = deim_select(basis);

  SplitMix64 rng(888);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd coef(5);
    for (int i = 0; i < 5; ++i) coef[i] = rng.uniform(-2.0, 2.0);
    const Eigen::VectorXd v = basis * coef;

    Eigen::VectorXd sampled(5);
    for (int i = 0; i < 5; ++i) sampled[i] = v[sel.points[i]];
    const Eigen::VectorXd rebuilt = basis * sel.interp.fullPivLu().solve(sampled);
    CHECK((rebuilt - v).norm() < 1e-9 * v.norm());
  }
}

TEST_CASE("affine operator and source families are reproduced exactly") {
  using Sp = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  const int n = 30;

  // three-term diagonally dominant family A(mu) = A0 + mu0 A1 + mu1 A2
  std::vector<Eigen::Triplet<double>> t0, t1, t2;
  for (int i = 0; i < n; ++i) {
    t0.emplace_back(i, i, 4.0);
    if (i + 1 < n) {
      t0.emplace_back(i, i + 1, -1.0);
      t0.emplace_back(i + 1, i, -1.0);
    }
    t1.emplace_back(i, i, 1.0 + 0.05 * i);
    if (i + 2 < n) {
      t2.emplace_back(i, i + 2, -0.3);
      t2.emplace_back(i + 2, i, -0.3);
    }
    t2.emplace_back(i, i, 0.9);
  }
  Sp a0(n, n), a1(n, n), a2(n, n);
  a0.setFromTriplets(t0.begin(), t0.end());
  a1.setFromTriplets(t1.begin(), t1.end());
  a2.setFromTriplets(t2.begin(), t2.end());

  const Eigen::VectorXd b0 = random_matrix(n, 1, 11).col(0);
  const Eigen::VectorXd b1 = random_matrix(n, 1, 12).col(0);

  auto matrix_at = [&](const Eigen::VectorXd& mu) -> Sp {
    Sp a = a0;
    a += mu[0] * a1;
    a += mu[1] * a2;
    a.makeCompressed();
    return a;
  };
  auto source_at = [&](const Eigen::VectorXd& mu) -> Eigen::VectorXd { return b0 + mu[0] * b1; };

  // training snapshots
  const auto train = sample_box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.5, 0.5), 12, 42);
  std::vector<Sp> op_snaps;
  Eigen::MatrixXd sol_snaps(n, static_cast<int>(train.size()));
  Eigen::MatrixXd src_snaps(n, static_cast<int>(train.size()));
  for (std::size_t j = 0; j < train.size(); ++j) {
    op_snaps.push_back(matrix_at(train[j]));
    src_snaps.col(static_cast<Eigen::Index>(j)) = source_at(train[j]);
    sol_snaps.col(static_cast<Eigen::Index>(j)) =
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>(
            Eigen::SparseMatrix<double>(op_snaps.back()))
            .solve(src_snaps.col(static_cast<Eigen::Index>(j)));
  }

  const Eigen::MatrixXd L = pod_vector(sol_snaps, 4).modes;
  const OperatorPod op = pod_operator(op_snaps, 3);
  const PodBasis src = pod_vector(src_snaps, 2);
  const DeimModel model = deim_train(op, src, L);

  // nesting: smaller truncations use prefixes of the same point lists
  const BoundDeim big = deim_bind(model, 4, 3, 2);
  const BoundDeim small = deim_bind(model, 2, 2, 1);
  for (int k = 0; k < 2; ++k) {
    CHECK(small.entry_rows[k] == big.entry_rows[k]);
    CHECK(small.entry_cols[k] == big.entry_cols[k]);
  }
  CHECK(small.source_rows[0] == big.source_rows[0]);

  // exactness at full truncation on fresh parameters
  const auto test = sample_box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.5, 0.5), 3, 4242);
  for (const auto& mu : test) {
    const Sp a = matrix_at(mu);
    const Eigen::VectorXd b = source_at(mu);

    Eigen::VectorXd sampled_entries(3);
    for (int k = 0; k < 3; ++k) sampled_entries[k] = a.coeff(big.entry_rows[k], big.entry_cols[k]);
    Eigen::VectorXd sampled_rows(2);
    for (int k = 0; k < 2; ++k) sampled_rows[k] = b[big.source_rows[k]];

    const Eigen::MatrixXd got = deim_online_matrix(big, sampled_entries);
    const Eigen::MatrixXd want = L.transpose() * (a * L);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9 * want.cwiseAbs().maxCoeff());

    const Eigen::VectorXd got_b = deim_online_source(big, sampled_rows);
    const Eigen::VectorXd want_b = L.transpose() * b;
    CHECK((got_b - want_b).norm() < 1e-10 * (1.0 + want_b.norm()));
  }

  CHECK(model.matrix_condition >= 1.0);
  CHECK(model.source_condition >= 1.0);
}

TEST_CASE("reduction and interpolation reject malformed input") {
  CHECK_THROWS_AS((void)pod_vector(Eigen::MatrixXd(), 1), usage_error);
  CHECK_THROWS_AS((void)pod_vector(random_matrix(10, 4, 1), 5), usage_error);
  CHECK_THROWS_AS((void)pod_field(random_matrix(10, 4, 1), Eigen::VectorXd::Ones(9), 2),
                  usage_error);
  CHECK_THROWS_AS((void)average_parameter({}), usage_error);

  CHECK_THROWS_AS((void)deim_select(Eigen::MatrixXd()), usage_error);
  CHECK_THROWS_AS((void)deim_select(random_matrix(3, 5, 2)), usage_error);

  Eigen::MatrixXd dependent = random_matrix(20, 2, 3);
  dependent.col(1) = 2.0 * dependent.col(0);
  CHECK_THROWS_AS((void)deim_select(dependent), numerical_error);

  const Eigen::MatrixXd basis = random_matrix(20, 3, 4);
  const DeimSelection sel = deim_select(basis);
  BoundDeim bound;
  bound.operator_blocks = {Eigen::MatrixXd::Zero(2, 2)};
  bound.source_blocks = Eigen::MatrixXd::Zero(2, 1);
  CHECK_THROWS_AS((void)deim_online_matrix(bound, Eigen::VectorXd::Zero(2)), usage_error);
  CHECK_THROWS_AS((void)deim_online_source(bound, Eigen::VectorXd::Zero(2)), usage_error);
  (void)sel;
}
