#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lemll/dataset.hpp"
#include "lemll/enhancer.hpp"
#include "lemll/metrics.hpp"
#include "lemll/msvr.hpp"
#include "lemll/neighborhood.hpp"
#include "lemll/types.hpp"

namespace lemll {

// Column index of the virtual label y0 in every extended label matrix.
inline constexpr Eigen::Index kVirtualLabel = 0;

struct LemllConfig {
  Eigen::Index k = 10;
  double epsilon = 0.1;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int outer_max_iters = 50;
  double outer_rel_tol = 1e-5;
  double lle_regularization = kDefaultLleRegularization;
  int msvr_max_iters = 100;
  double msvr_rel_tol = 1e-6;
  int enhancer_max_iters = 50;
  double enhancer_rel_tol = 1e-6;
  double armijo_c = 1e-4;
  int max_backtracks = 30;

  void validate() const;
  SolverConfig msvr() const;
  EnhancerConfig enhancer() const;
};

struct TrainingReport {
  int iterations = 0;
  bool converged = false;
  // Full objective at U = 0 with the zero model, then after each outer iteration.
  std::vector<double> objective_trace;
  // Per outer iteration, the enhancer's inner objective trace.
  std::vector<std::vector<double>> enhancer_traces;
};

struct LemllModel {
  RegressionModel regression;  // l + 1 outputs, row kVirtualLabel is y0
  Matrix u_final;              // n x (l + 1) numerical labels of the training set
  std::vector<std::string> label_names;
  LemllConfig config;
  Standardizer standardizer;  // empty unless features were z-scored
  TrainingReport report;

  Eigen::Index num_labels() const { return static_cast<Eigen::Index>(label_names.size()); }

  // Extended prediction p* = theta x + b (standardizer applied first if set).
  Vector predict(const Vector& x) const;
  Matrix predict_rows(const Matrix& x) const;
};

// [0 | Y] as reals: the virtual label takes logical value 0.
Matrix extend_labels(const LabelMatrix& y);

// Alternating minimization: U starts at 0, W is built once from the
// features, then each round refits the regression on U (warm-started) and
// runs the enhancer on U with P fixed.
LemllModel fit(const MultiLabelDataset& dataset, const LemllConfig& config);
// Same, reusing a graph already built on dataset.features with config.k.
LemllModel fit(const MultiLabelDataset& dataset, const LemllConfig& config,
               const NeighborhoodGraph& graph);

// sum_i L(r_i) + alpha ||theta||^2 + beta ||U - Y'||^2 + gamma tr(U'MU)
double full_objective(const RegressionModel& model, const Matrix& x, const Matrix& u,
                      const Matrix& y_extended, const SparseMatrix& m, const LemllConfig& config);

// Label j (1-based in the extended vector) is relevant iff p*_j > p*_0.
Eigen::VectorXi decide(const Vector& p_star);
LabelMatrix decide_rows(const Matrix& p_star);

// Real-label columns of an extended matrix (drops y0).
Matrix label_scores(const Matrix& p_star);

enum class SelectionMetric { kAveragePrecision, kHammingLoss, kRankingLoss, kOneError, kCoverage };

SelectionMetric parse_selection_metric(const std::string& name);
std::string to_string(SelectionMetric metric);

struct Grid {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> gammas;

  // {1/64, 1/16, 1/4, 1, 4, 16, 64} for each of alpha, beta, gamma.
  static Grid standard();
  std::size_t size() const { return alphas.size() * betas.size() * gammas.size(); }
};

struct GridCandidate {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> score;  // mean validation metric over folds
};

struct GridSearchResult {
  LemllConfig best;
  std::optional<double> best_score;
  std::vector<GridCandidate> candidates;  // lexicographic (alpha, beta, gamma) order
};

// k-fold cross-validation over every (alpha, beta, gamma) triple, all other
// settings taken from `base`. Candidates run in parallel; the winner is the
// best mean score, ties going to the lexicographically smallest triple.
GridSearchResult grid_search(const MultiLabelDataset& train, const LemllConfig& base,
                             const Grid& grid, int folds, std::uint64_t seed,
                             SelectionMetric metric = SelectionMetric::kAveragePrecision);

// Evaluate a trained model on a labelled set.
EvalReport evaluate_model(const LemllModel& model, const MultiLabelDataset& data);

}  // namespace lemll
