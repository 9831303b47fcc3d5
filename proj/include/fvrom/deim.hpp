/// @file deim.hpp
/// Discrete empirical interpolation for parametrized operators and source
/// vectors: greedy interpolation-point selection over POD bases, and reduced
/// blocks precomputed offline so the online combination never touches
/// full-size objects.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fvrom/reduction.hpp"

namespace fvrom {

/// Greedy interpolation points for the columns of `basis`: the first point
/// maximizes |column 0|; each next point maximizes the residual of column l
/// after interpolating it at the points already chosen. Ties take the lowest
/// row index. `interp` is basis(points, :), `condition` its SVD condition
/// number.
struct DeimSelection {
  std::vector<int> points;
  Eigen::MatrixXd interp;
  double condition = 0.0;
};

DeimSelection deim_select(const Eigen::MatrixXd& basis);

/// Trained interpolation model for a parametrized sparse operator and source
/// vector, bound to a solution basis L: stores the magic entries/rows, the
/// interpolation matrices, and the projections G_j = L^T U_j L (operator) and
/// H = L^T U_f (source) from which reduced blocks at any truncated size are
/// derived.
struct DeimModel {
  // operator side
  OperatorPattern pattern;
  std::vector<int> entry_slots;             // pattern slots of the magic entries
  std::vector<int> entry_rows, entry_cols;  // same entries as (row, col)
  Eigen::MatrixXd matrix_interp;            // B_A
  double matrix_condition = 0.0;
  std::vector<Eigen::MatrixXd> projected_operator_modes;  // G_j, each n_r_max^2
  Eigen::VectorXd operator_eigenvalues;

  // source side
  std::vector<int> source_rows;
  Eigen::MatrixXd source_interp;  // B_f
  double source_condition = 0.0;
  Eigen::MatrixXd projected_source_modes;  // H = L^T U_f (n_r_max x n_f_max)
  Eigen::VectorXd source_eigenvalues;

  int max_modes() const { return static_cast<int>(projected_source_modes.rows()); }
  int max_operator_terms() const { return static_cast<int>(entry_slots.size()); }
  int max_source_terms() const { return static_cast<int>(source_rows.size()); }
};

/// Trains the interpolation model: greedy points on the operator POD (in its
/// pattern-value space, ties resolved to the lexicographically smallest
/// (row, col)) and on the source POD, plus the offline projections through
/// the solution modes L.
DeimModel deim_train(const OperatorPod& op, const PodBasis& source, const Eigen::MatrixXd& L);

/// Reduced blocks at a concrete truncation (n_r solution modes, n_a operator
/// terms, n_f source terms): the offline-absorbed combination
/// A_r(mu) = sum_k operator_blocks[k] * A(mu)[entry k],
/// b_r(mu) = sum_k source_blocks.col(k) * b(mu)[row k].
/// Truncations are nested: points and interpolation matrices restrict to
/// leading sub-blocks.
struct BoundDeim {
  std::vector<int> entry_rows, entry_cols;  // n_a magic operator entries
  std::vector<Eigen::MatrixXd> operator_blocks;
  std::vector<int> source_rows;  // n_f magic source rows
  Eigen::MatrixXd source_blocks;

  int n_modes() const { return static_cast<int>(source_blocks.rows()); }
};

BoundDeim deim_bind(const DeimModel& model, int n_r, int n_a, int n_f);

Eigen::MatrixXd deim_online_matrix(const BoundDeim& bound, const Eigen::VectorXd& sampled_entries);
Eigen::VectorXd deim_online_source(const BoundDeim& bound, const Eigen::VectorXd& sampled_rows);

}  // namespace fvrom
