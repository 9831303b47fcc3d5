/// @file field.hpp
/// Cell- and point-attached field containers.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "fvrom/geometry.hpp"

namespace fvrom {

/// One displacement (or position delta) per mesh point.
using PointField = std::vector<Vec2>;

/// Scalar or vector field stored cell-wise. Vector fields are stacked by
/// component: values[c] is component 0 of cell c, values[n_cells + c] is
/// component 1 of cell c.
struct CellField {
  Eigen::VectorXd values;
  int components = 1;

  CellField() = default;
  CellField(int n_cells, int ncomp)
      : values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_cells) * ncomp)),
        components(ncomp) {}
  explicit CellField(Eigen::VectorXd v, int ncomp = 1)
      : values(std::move(v)), components(ncomp) {
    if (values.size() % components != 0)
      throw std::invalid_argument("CellField: size not divisible by component count");
  }

  int n_cells() const { return static_cast<int>(values.size()) / components; }
  double& at(int cell, int comp = 0) { return values[static_cast<Eigen::Index>(comp) * n_cells() + cell]; }
  double at(int cell, int comp = 0) const { return values[static_cast<Eigen::Index>(comp) * n_cells() + cell]; }
};

/// Volume-weighted L2 norm: sqrt(sum_i V_i sum_comp v_{i,comp}^2).
inline double l2_norm(const Eigen::VectorXd& values, int components, const Eigen::VectorXd& volumes) {
  const Eigen::Index n = volumes.size();
  if (values.size() != n * components)
    throw std::invalid_argument("l2_norm: field/volume size mismatch");
  double acc = 0.0;
  for (int c = 0; c < components; ++c)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = values[c * n + i];
      acc += volumes[i] * v * v;
    }
  return std::sqrt(acc);
}

inline double l2_norm(const CellField& f, const Eigen::VectorXd& volumes) {
  return l2_norm(f.values, f.components, volumes);
}

}  // namespace fvrom
