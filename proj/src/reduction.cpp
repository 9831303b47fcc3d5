#include "fvrom/reduction.hpp"

#include <algorithm>
#include <sstream>

#include "fvrom/errors.hpp"

namespace fvrom {

Eigen::VectorXd average_parameter(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw usage_error("average_parameter: no samples");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(samples.front().size());
  for (const auto& s : samples) {
    if (s.size() != mean.size())
      throw usage_error("average_parameter: inconsistent parameter dimensions");
    mean += s;
  }
  return mean / static_cast<double>(samples.size());
}

PodBasis pod_field(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& mass_diag,
                   int n_modes) {
  const int n_snap = static_cast<int>(snapshots.cols());
  if (n_snap == 0) throw usage_error("pod_field: no snapshots");
  if (snapshots.rows() != mass_diag.size())
    throw usage_error("pod_field: mass diagonal size does not match snapshot length");
  if (n_modes < 1 || n_modes > n_snap)
    throw usage_error("pod_field: requested mode count outside [1, n_snapshots]");

  // Correlation matrix in the weighted inner product.
  const Eigen::MatrixXd weighted = mass_diag.asDiagonal() * snapshots;
  Eigen::MatrixXd corr = snapshots.transpose() * weighted;
  corr /= static_cast<double>(n_snap);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success)
    throw numerical_error("pod_field: eigendecomposition failed");

  // Ascending from Eigen; store descending.
  PodBasis basis;
  basis.mass_diag = mass_diag;
  basis.eigenvalues = eig.eigenvalues().reverse();

  const double lead = std::max(basis.eigenvalues[0], 0.0);
  int available = 0;
  for (int i = 0; i < n_snap; ++i)
    if (basis.eigenvalues[i] > std::max(lead * 1e-13, 1e-300)) ++available;
  if (n_modes > available) {
    std::ostringstream os;
    os << "pod_field: requested " << n_modes << " modes but only " << available
       << " are numerically nonzero";
    throw numerical_error(os.str());
  }

  basis.modes.resize(snapshots.rows(), n_modes);
  for (int i = 0; i < n_modes; ++i) {
    const Eigen::VectorXd q = eig.eigenvectors().col(n_snap - 1 - i);
    Eigen::VectorXd phi = snapshots * q / (n_snap * basis.eigenvalues[i]);
    const double norm = std::sqrt(phi.dot(mass_diag.asDiagonal() * phi));
    basis.modes.col(i) = phi / norm;
  }
  return basis;
}

PodBasis pod_vector(const Eigen::MatrixXd& snapshots, int n_modes) {
  return pod_field(snapshots, Eigen::VectorXd::Ones(snapshots.rows()), n_modes);
}

OperatorPattern union_pattern(
    const std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>>& mats) {
  if (mats.empty()) throw usage_error("union_pattern: no matrices");
  const int n = static_cast<int>(mats.front().rows());
  std::vector<std::int64_t> keys;
  for (const auto& m : mats) {
    if (m.rows() != n || m.cols() != n)
      throw usage_error("union_pattern: inconsistent matrix sizes");
    for (int r = 0; r < m.outerSize(); ++r)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it)
        keys.push_back(OperatorPattern::key(static_cast<int>(it.row()),
                                            static_cast<int>(it.col())));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  OperatorPattern pattern;
  pattern.n = n;
  pattern.rows.reserve(keys.size());
  pattern.cols.reserve(keys.size());
  pattern.index.reserve(keys.size());
  for (std::int64_t k : keys) {
    const int r = static_cast<int>(k >> 32);
    const int c = static_cast<int>(k & 0xffffffff);
    pattern.index.emplace(k, static_cast<int>(pattern.rows.size()));
    pattern.rows.push_back(r);
    pattern.cols.push_back(c);
  }
  return pattern;
}

Eigen::VectorXd gather_pattern_values(const OperatorPattern& pattern,
                                      const Eigen::SparseMatrix<double, Eigen::RowMajor>& mat) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(pattern.nnz());
  for (int r = 0; r < mat.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(mat, r); it; ++it) {
      const int slot = pattern.find(static_cast<int>(it.row()), static_cast<int>(it.col()));
      if (slot < 0)
        throw usage_error("gather_pattern_values: matrix entry outside the union pattern");
      values[slot] = it.value();
    }
  return values;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> scatter_pattern_values(
    const OperatorPattern& pattern, const Eigen::VectorXd& values) {
  if (values.size() != pattern.nnz())
    throw usage_error("scatter_pattern_values: value count does not match pattern");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pattern.nnz());
  for (int k = 0; k < pattern.nnz(); ++k)
    trip.emplace_back(pattern.rows[k], pattern.cols[k], values[k]);
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat(pattern.n, pattern.n);
  mat.setFromTriplets(trip.begin(), trip.end());
  mat.makeCompressed();
  return mat;
}

OperatorPod pod_operator(
    const std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>>& snapshots, int n_modes) {
  OperatorPod pod;
  pod.pattern = union_pattern(snapshots);
  Eigen::MatrixXd stacked(pod.pattern.nnz(), snapshots.size());
  for (std::size_t j = 0; j < snapshots.size(); ++j)
    stacked.col(static_cast<Eigen::Index>(j)) = gather_pattern_values(pod.pattern, snapshots[j]);
  PodBasis basis = pod_vector(stacked, n_modes);
  pod.bases = std::move(basis.modes);
  pod.eigenvalues = std::move(basis.eigenvalues);
  return pod;
}

}  // namespace fvrom
