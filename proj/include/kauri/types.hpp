#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace kauri {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n samples x d features. feature_names is either empty or has d entries.
struct Dataset {
  Matrix rows;
  std::vector<std::string> feature_names;

  Index n() const { return rows.rows(); }
  Index d() const { return rows.cols(); }
};

}  // namespace kauri
