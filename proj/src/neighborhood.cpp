#include "lemll/neighborhood.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "lemll/csv.hpp"
#include "lemll/error.hpp"

namespace lemll {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Candidate = std::pair<double, Eigen::Index>;

void check_k(Eigen::Index n, Eigen::Index k) {
  if (k < 1 || k > n - 1) {
    throw ConfigError("K = " + std::to_string(k) + " out of range [1, n-1] with n = " +
                      std::to_string(n) + "; need n >= K+1");
  }
}

// Squared distances from row i to every other row, accumulated in a fixed
// order so the parallel and serial paths agree bit for bit.
std::vector<Candidate> distance_row(const RowMajorMatrix& x, Eigen::Index i) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double* xi = x.data() + i * d;
  std::vector<Candidate> row;
  row.reserve(static_cast<std::size_t>(n - 1));
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const double* xj = x.data() + j * d;
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double t = xi[c] - xj[c];
      s += t * t;
    }
    row.emplace_back(s, j);
  }
  return row;
}

std::vector<Eigen::Index> take_indices(const std::vector<Candidate>& row, Eigen::Index k) {
  std::vector<Eigen::Index> out(static_cast<std::size_t>(k));
  for (Eigen::Index m = 0; m < k; ++m) out[m] = row[m].second;
  return out;
}

Vector row_weights(const Matrix& features, const std::vector<Eigen::Index>& nbrs,
                   Eigen::Index i, double regularization) {
  return lle_row_weights(features.row(i).transpose(), features(nbrs, Eigen::all), regularization);
}

SparseMatrix assemble(Eigen::Index n, const NeighborLists& neighbors,
                      const std::vector<Vector>& rows) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < neighbors[i].size(); ++m) {
      triplets.emplace_back(i, neighbors[i][m], rows[i](static_cast<Eigen::Index>(m)));
    }
  }
  SparseMatrix w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

void check_neighbors(const Matrix& features, const NeighborLists& neighbors) {
  if (static_cast<Eigen::Index>(neighbors.size()) != features.rows()) {
    throw ConfigError("neighbor lists do not match the number of rows");
  }
}

}  // namespace

NeighborLists knn(const Matrix& features, Eigen::Index k) {
  const Eigen::Index n = features.rows();
  check_k(n, k);
  const RowMajorMatrix x = features;
  NeighborLists out(static_cast<std::size_t>(n));
  const auto cmp = [](const Candidate& a, const Candidate& b) { return a < b; };

#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = distance_row(x, i);
    std::partial_sort(row.begin(), row.begin() + k, row.end(), cmp);
    out[i] = take_indices(row, k);
  }
  return out;
}

NeighborLists knn_reference(const Matrix& features, Eigen::Index k) {
  const Eigen::Index n = features.rows();
  check_k(n, k);
  const RowMajorMatrix x = features;
  NeighborLists out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = distance_row(x, i);
    std::sort(row.begin(), row.end());
    out[i] = take_indices(row, k);
  }
  return out;
}

Vector lle_row_weights(const Vector& x, const Matrix& neighbor_points, double regularization) {
  const Eigen::Index k = neighbor_points.rows();
  if (k < 1) throw ConfigError("lle_row_weights needs at least one neighbor");
  if (neighbor_points.cols() != x.size()) throw ConfigError("neighbor dimension mismatch");
  if (k == 1) return Vector::Ones(1);

  const Matrix z = (-neighbor_points).rowwise() + x.transpose();
  Matrix g = z * z.transpose();
  const double shift = regularization * (g.trace() / static_cast<double>(k) + 1e-12);
  g.diagonal().array() += shift;

  Vector w = g.ldlt().solve(Vector::Ones(k));
  const double sum = w.sum();
  if (!w.allFinite() || sum == 0.0) {
    throw SolverError("local Gram system is singular; raise the LLE regularization");
  }
  return w / sum;
}

SparseMatrix lle_weights(const Matrix& features, const NeighborLists& neighbors,
                         double regularization) {
  check_neighbors(features, neighbors);
  const Eigen::Index n = features.rows();
  std::vector<Vector> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    rows[i] = row_weights(features, neighbors[i], i, regularization);
  }
  return assemble(n, neighbors, rows);
}

SparseMatrix lle_weights_reference(const Matrix& features, const NeighborLists& neighbors,
                                   double regularization) {
  check_neighbors(features, neighbors);
  const Eigen::Index n = features.rows();
  std::vector<Vector> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rows[i] = row_weights(features, neighbors[i], i, regularization);
  }
  return assemble(n, neighbors, rows);
}

SparseMatrix build_M(const SparseMatrix& weights) {
  if (weights.rows() != weights.cols()) throw ConfigError("W must be square");
  const Eigen::Index n = weights.rows();
  SparseMatrix identity(n, n);
  identity.setIdentity();
  const SparseMatrix a = identity - weights;
  const SparseMatrix at = a.transpose();
  SparseMatrix m = at * a;
  const SparseMatrix mt = m.transpose();
  SparseMatrix sym = 0.5 * (m + mt);
  sym.prune(0.0);
  return sym;
}

double manifold_penalty(const SparseMatrix& m, const Matrix& u) {
  const Matrix mu = m * u;
  return u.cwiseProduct(mu).sum();
}

NeighborhoodGraph build_graph(const Matrix& features, Eigen::Index k, double regularization) {
  NeighborhoodGraph g;
  g.neighbors = knn(features, k);
  g.weights = lle_weights(features, g.neighbors, regularization);
  g.m = build_M(g.weights);
  return g;
}

void write_graph_csv(const std::filesystem::path& dir, const NeighborhoodGraph& graph) {
  std::filesystem::create_directories(dir);
  const auto dump = [](const std::filesystem::path& path, const SparseMatrix& s) {
    const Matrix dense = s;
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < dense.cols(); ++j) header.push_back("c" + std::to_string(j));
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(dense.rows()));
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      for (Eigen::Index j = 0; j < dense.cols(); ++j) {
        rows[i].push_back(csv::format_number(dense(i, j)));
      }
    }
    csv::write(path, header, rows);
  };
  dump(dir / "W.csv", graph.weights);
  dump(dir / "M.csv", graph.m);
}

}  // namespace lemll
