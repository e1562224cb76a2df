#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace lemll {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Logical labels, entries in {-1, +1} (0 only in the virtual column).
using LabelMatrix = Eigen::MatrixXi;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace lemll
