#pragma once

#include <filesystem>
#include <vector>

#include "lemll/types.hpp"

namespace lemll {

using NeighborLists = std::vector<std::vector<Eigen::Index>>;

// Multiplier on tr(G)/K added to the local Gram diagonal before solving.
inline constexpr double kDefaultLleRegularization = 1e-3;

// K nearest neighbors under the Euclidean metric, self excluded, ties broken
// by ascending index. Each row is handled independently (OpenMP over rows);
// output does not depend on the thread count.
NeighborLists knn(const Matrix& features, Eigen::Index k);

// Serial brute force: full sort of every distance row. Kept as the oracle
// for knn() and as the baseline in the benchmark.
NeighborLists knn_reference(const Matrix& features, Eigen::Index k);

// Reconstruction weights of x from its neighbors (one per row of
// neighbor_points) minimizing w'Gw subject to sum(w) = 1, with
// G_jk = (x - x_j)'(x - x_k). Solves (G + reg*(tr(G)/K + 1e-12) I) w = 1
// and rescales to unit sum.
Vector lle_row_weights(const Vector& x, const Matrix& neighbor_points,
                       double regularization = kDefaultLleRegularization);

// Row-stochastic W with W(i, j) nonzero only for j in neighbors[i].
SparseMatrix lle_weights(const Matrix& features, const NeighborLists& neighbors,
                         double regularization = kDefaultLleRegularization);
SparseMatrix lle_weights_reference(const Matrix& features, const NeighborLists& neighbors,
                                   double regularization = kDefaultLleRegularization);

// M = (I - W)'(I - W), symmetrized exactly.
SparseMatrix build_M(const SparseMatrix& weights);

// ||U - WU||_F^2 == tr(U'MU).
double manifold_penalty(const SparseMatrix& m, const Matrix& u);

struct NeighborhoodGraph {
  NeighborLists neighbors;
  SparseMatrix weights;
  SparseMatrix m;

  Eigen::Index size() const { return m.rows(); }
};

NeighborhoodGraph build_graph(const Matrix& features, Eigen::Index k,
                              double regularization = kDefaultLleRegularization);

// Debug dump: <dir>/W.csv and <dir>/M.csv as dense tables.
void write_graph_csv(const std::filesystem::path& dir, const NeighborhoodGraph& graph);

}  // namespace lemll
