#include "fvrom/deim.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

#include "fvrom/errors.hpp"

namespace fvrom {

namespace {

double svd_condition(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / (s(s.size() - 1));
}

}  // namespace

DeimSelection deim_select(const Eigen::MatrixXd& basis) {
  const int n = static_cast<int>(basis.rows());
  const int m = static_cast<int>(basis.cols());
  if (n == 0 || m == 0) throw usage_error("deim_select: empty basis");
  if (m > n) throw usage_error("deim_select: more basis vectors than rows");

  DeimSelection sel;
  sel.points.reserve(m);

  // first point: largest magnitude of the first basis vector; strict > keeps
  // the lowest index on ties
  {
    int best = 0;
    double best_mag = std::abs(basis(0, 0));
    for (int i = 1; i < n; ++i) {
      const double mag = std::abs(basis(i, 0));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag == 0.0) throw numerical_error("deim_select: first basis vector is zero");
    sel.points.push_back(best);
  }

  for (int l = 1; l < m; ++l) {
    // interpolate column l at the points chosen so far and take the largest
    // residual as the next point
    Eigen::MatrixXd sub(l, l);
    Eigen::VectorXd rhs(l);
    for (int a = 0; a < l; ++a) {
      for (int b = 0; b < l; ++b) sub(a, b) = basis(sel.points[a], b);
      rhs(a) = basis(sel.points[a], l);
    }
    const Eigen::VectorXd coef = sub.fullPivLu().solve(rhs);
    const Eigen::VectorXd residual = basis.col(l) - basis.leftCols(l) * coef;

    int best = 0;
    double best_mag = std::abs(residual(0));
    for (int i = 1; i < n; ++i) {
      const double mag = std::abs(residual(i));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    const double scale = basis.col(l).norm();
    if (best_mag <= 1e-13 * (scale > 0.0 ? scale : 1.0))
      throw numerical_error("deim_select: basis vector " + std::to_string(l) +
                            " is interpolated exactly by its predecessors (dependent bases)");
    sel.points.push_back(best);
  }

  sel.interp.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) sel.interp(a, b) = basis(sel.points[a], b);
  sel.condition = svd_condition(sel.interp);
  return sel;
}

DeimModel deim_train(const OperatorPod& op, const PodBasis& source, const Eigen::MatrixXd& L) {
  DeimModel model;
  model.pattern = op.pattern;
  model.operator_eigenvalues = op.eigenvalues;
  model.source_eigenvalues = source.eigenvalues;

  const int n_h = static_cast<int>(L.rows());
  if (op.pattern.n != n_h) throw usage_error("deim_train: operator pattern size does not match solution basis");
  if (source.modes.cols() > 0 && source.modes.rows() != n_h)
    throw usage_error("deim_train: source modes do not match solution basis size");

  // ---- operator side: greedy points in pattern-value space ----
  const int n_a_max = static_cast<int>(op.bases.cols());
  if (n_a_max == 0) throw usage_error("deim_train: no operator modes");
  const DeimSelection op_sel = deim_select(op.bases);
  model.entry_slots = op_sel.points;
  model.matrix_interp = op_sel.interp;
  model.matrix_condition = op_sel.condition;
  model.entry_rows.reserve(op_sel.points.size());
  model.entry_cols.reserve(op_sel.points.size());
  for (int slot : op_sel.points) {
    model.entry_rows.push_back(op.pattern.rows[slot]);
    model.entry_cols.push_back(op.pattern.cols[slot]);
  }

  // G_j = L^T U_j L with U_j the j-th operator mode scattered to a matrix
  model.projected_operator_modes.reserve(n_a_max);
  for (int j = 0; j < n_a_max; ++j) {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> uj =
        scatter_pattern_values(op.pattern, op.bases.col(j));
    model.projected_operator_modes.push_back(L.transpose() * (uj * L));
  }

  // ---- source side ----
  const int n_f_max = static_cast<int>(source.modes.cols());
  if (n_f_max == 0) throw usage_error("deim_train: no source modes");
  const DeimSelection src_sel = deim_select(source.modes);
  model.source_rows = src_sel.points;
  model.source_interp = src_sel.interp;
  model.source_condition = src_sel.condition;
  model.projected_source_modes = L.transpose() * source.modes;

  return model;
}

BoundDeim deim_bind(const DeimModel& model, int n_r, int n_a, int n_f) {
  if (n_r < 1 || n_r > model.max_modes())
    throw usage_error("deim_bind: requested " + std::to_string(n_r) + " solution modes, model has " +
                      std::to_string(model.max_modes()));
  if (n_a < 1 || n_a > model.max_operator_terms())
    throw usage_error("deim_bind: requested " + std::to_string(n_a) + " operator terms, model has " +
                      std::to_string(model.max_operator_terms()));
  if (n_f < 1 || n_f > model.max_source_terms())
    throw usage_error("deim_bind: requested " + std::to_string(n_f) + " source terms, model has " +
                      std::to_string(model.max_source_terms()));

  BoundDeim bound;
  bound.entry_rows.assign(model.entry_rows.begin(), model.entry_rows.begin() + n_a);
  bound.entry_cols.assign(model.entry_cols.begin(), model.entry_cols.begin() + n_a);
  bound.source_rows.assign(model.source_rows.begin(), model.source_rows.begin() + n_f);

  // A_r^k = sum_j G_j (B_A^-1)_{jk}: fold the interpolation inverse into the
  // projected modes so the online step is a plain weighted sum
  const Eigen::MatrixXd binv_a =
      model.matrix_interp.topLeftCorner(n_a, n_a).fullPivLu().inverse();
  bound.operator_blocks.assign(n_a, Eigen::MatrixXd::Zero(n_r, n_r));
  for (int k = 0; k < n_a; ++k)
    for (int j = 0; j < n_a; ++j)
      bound.operator_blocks[k] += binv_a(j, k) * model.projected_operator_modes[j].topLeftCorner(n_r, n_r);

  const Eigen::MatrixXd binv_f =
      model.source_interp.topLeftCorner(n_f, n_f).fullPivLu().inverse();
  bound.source_blocks = model.projected_source_modes.topLeftCorner(n_r, n_f) * binv_f;
  return bound;
}

Eigen::MatrixXd deim_online_matrix(const BoundDeim& bound, const Eigen::VectorXd& sampled_entries) {
  const int n_a = static_cast<int>(bound.operator_blocks.size());
  if (sampled_entries.size() != n_a)
    throw usage_error("deim_online_matrix: expected " + std::to_string(n_a) + " sampled entries, got " +
                      std::to_string(sampled_entries.size()));
  const int n_r = bound.n_modes();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_r, n_r);
  for (int k = 0; k < n_a; ++k) out += sampled_entries(k) * bound.operator_blocks[k];
  return out;
}

Eigen::VectorXd deim_online_source(const BoundDeim& bound, const Eigen::VectorXd& sampled_rows) {
  if (sampled_rows.size() != bound.source_blocks.cols())
    throw usage_error("deim_online_source: expected " + std::to_string(bound.source_blocks.cols()) +
                      " sampled rows, got " + std::to_string(sampled_rows.size()));
  return bound.source_blocks * sampled_rows;
}

}  // namespace fvrom
