/// @file reduction.hpp
/// Proper orthogonal decomposition via the method of snapshots, for solution
/// fields (weighted by a diagonal mass matrix), plain vectors, and sparse
/// operators compared in the Frobenius inner product on a shared union
/// sparsity pattern.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unordered_map>
#include <vector>

namespace fvrom {

/// Orthonormal basis extracted from snapshots. `modes` columns satisfy
/// modes^T diag(mass_diag) modes = I. `eigenvalues` holds the full descending
/// correlation spectrum (length = number of snapshots), normalized by the
/// snapshot count.
struct PodBasis {
  Eigen::MatrixXd modes;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd mass_diag;

  int n_modes() const { return static_cast<int>(modes.cols()); }
};

/// Component-wise mean of the parameter samples (the ensemble-average
/// parameter at which the reference mass matrix is evaluated).
Eigen::VectorXd average_parameter(const std::vector<Eigen::VectorXd>& samples);

/// Method of snapshots: eigendecomposition of C_ij = x_i^T M x_j / N, modes
/// phi_i = (1/(N lambda_i)) sum_j x_j Q_ji renormalized to unit M-norm.
/// Throws numerical_error when fewer than n_modes numerically nonzero
/// eigenvalues exist; usage_error for empty input or n_modes out of range.
PodBasis pod_field(const Eigen::MatrixXd& snapshots, const Eigen::VectorXd& mass_diag,
                   int n_modes);

/// Same decomposition in the unweighted Euclidean inner product.
PodBasis pod_vector(const Eigen::MatrixXd& snapshots, int n_modes);

/// Union sparsity pattern of a family of equally-sized sparse matrices.
/// Entries are ordered lexicographically by (row, col); `index_of` maps an
/// entry position back to its slot.
struct OperatorPattern {
  int n = 0;
  std::vector<int> rows, cols;
  std::unordered_map<std::int64_t, int> index;

  int nnz() const { return static_cast<int>(rows.size()); }
  static std::int64_t key(int r, int c) {
    return (static_cast<std::int64_t>(r) << 32) | static_cast<std::int64_t>(c);
  }
  /// Slot of entry (r, c), or -1 when outside the pattern.
  int find(int r, int c) const {
    auto it = index.find(key(r, c));
    return it == index.end() ? -1 : it->second;
  }
};

OperatorPattern union_pattern(const std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>>& mats);

/// Values of one matrix gathered into pattern order (absent entries are 0).
Eigen::VectorXd gather_pattern_values(const OperatorPattern& pattern,
                                      const Eigen::SparseMatrix<double, Eigen::RowMajor>& mat);

/// Scatter pattern-ordered values back into a sparse matrix.
Eigen::SparseMatrix<double, Eigen::RowMajor> scatter_pattern_values(
    const OperatorPattern& pattern, const Eigen::VectorXd& values);

/// POD of operator snapshots in the Frobenius inner product: snapshots are
/// stacked on the union pattern and decomposed as plain vectors.
struct OperatorPod {
  OperatorPattern pattern;
  Eigen::MatrixXd bases;        // nnz x n_modes
  Eigen::VectorXd eigenvalues;  // full spectrum
};

OperatorPod pod_operator(const std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>>& snapshots,
                         int n_modes);

}  // namespace fvrom
