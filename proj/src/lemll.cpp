#include "lemll/lemll.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>

#include "lemll/error.hpp"

namespace lemll {

void LemllConfig::validate() const {
  if (k < 1) throw ConfigError("K must be >= 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (outer_max_iters < 1) throw ConfigError("outer_max_iters must be >= 1");
  if (!(outer_rel_tol > 0.0)) throw ConfigError("outer_rel_tol must be > 0");
  if (!(lle_regularization >= 0.0)) throw ConfigError("lle_regularization must be >= 0");
  msvr().validate();
  enhancer().validate();
}

SolverConfig LemllConfig::msvr() const {
  return {epsilon, alpha, msvr_max_iters, msvr_rel_tol, armijo_c, max_backtracks};
}

EnhancerConfig LemllConfig::enhancer() const {
  return {epsilon, beta, gamma, enhancer_max_iters, enhancer_rel_tol, armijo_c, max_backtracks};
}

Vector LemllModel::predict(const Vector& x) const {
  if (standardizer.empty()) return regression.predict(x);
  return regression.predict(standardizer.apply(x.transpose()).transpose());
}

Matrix LemllModel::predict_rows(const Matrix& x) const {
  return regression.predict_rows(standardizer.apply(x));
}

Matrix extend_labels(const LabelMatrix& y) {
  Matrix out(y.rows(), y.cols() + 1);
  out.col(kVirtualLabel).setZero();
  out.rightCols(y.cols()) = y.cast<double>();
  return out;
}

double full_objective(const RegressionModel& model, const Matrix& x, const Matrix& u,
                      const Matrix& y_extended, const SparseMatrix& m, const LemllConfig& config) {
  return msvr::objective(model, x, u, config.msvr()) +
         config.beta * (u - y_extended).squaredNorm() + config.gamma * manifold_penalty(m, u);
}

LemllModel fit(const MultiLabelDataset& dataset, const LemllConfig& config) {
  config.validate();
  dataset.validate();
  if (dataset.size() < config.k + 1) {
    throw ConfigError("LEMLL needs n >= K+1 training instances (n = " +
                      std::to_string(dataset.size()) + ", K = " + std::to_string(config.k) + ")");
  }
  return fit(dataset, config, build_graph(dataset.features, config.k, config.lle_regularization));
}

LemllModel fit(const MultiLabelDataset& dataset, const LemllConfig& config,
               const NeighborhoodGraph& graph) {
  config.validate();
  dataset.validate();
  if (graph.size() != dataset.size()) throw ConfigError("graph does not match the dataset");

  const Matrix& x = dataset.features;
  const Matrix y = extend_labels(dataset.labels);
  const auto msvr_config = config.msvr();
  const auto enhancer_config = config.enhancer();

  LemllModel model;
  model.config = config;
  model.label_names = dataset.label_names;
  model.regression = RegressionModel::zeros(y.cols(), x.cols());
  Matrix u = Matrix::Zero(y.rows(), y.cols());

  auto& report = model.report;
  report.objective_trace.push_back(full_objective(model.regression, x, u, y, graph.m, config));
  for (int t = 1; t <= config.outer_max_iters; ++t) {
    model.regression = msvr::fit(x, u, msvr_config, model.regression).model;
    const Matrix p = model.regression.predict_rows(x);
    auto enhanced = enhancer::run(u, p, y, graph.m, enhancer_config);
    u = std::move(enhanced.state.u);
    report.enhancer_traces.push_back(std::move(enhanced.trace));

    const double previous = report.objective_trace.back();
    const double current = full_objective(model.regression, x, u, y, graph.m, config);
    report.objective_trace.push_back(current);
    report.iterations = t;
    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if ((previous - current) / scale < config.outer_rel_tol) {
      report.converged = true;
      break;
    }
  }
  model.u_final = std::move(u);
  return model;
}

Eigen::VectorXi decide(const Vector& p_star) {
  if (p_star.size() < 2) throw ConfigError("decide needs the virtual label plus at least one label");
  const Eigen::Index l = p_star.size() - 1;
  Eigen::VectorXi out(l);
  for (Eigen::Index j = 0; j < l; ++j) out(j) = p_star(j + 1) > p_star(kVirtualLabel) ? 1 : -1;
  return out;
}

LabelMatrix decide_rows(const Matrix& p_star) {
  LabelMatrix out(p_star.rows(), p_star.cols() - 1);
  for (Eigen::Index i = 0; i < p_star.rows(); ++i) {
    out.row(i) = decide(p_star.row(i).transpose()).transpose();
  }
  return out;
}

Matrix label_scores(const Matrix& p_star) { return p_star.rightCols(p_star.cols() - 1); }

EvalReport evaluate_model(const LemllModel& model, const MultiLabelDataset& data) {
  if (data.num_labels() + 1 != model.regression.outputs()) {
    throw DataError("dataset has " + std::to_string(data.num_labels()) + " labels, model expects " +
                    std::to_string(model.regression.outputs() - 1));
  }
  const Matrix p = model.predict_rows(data.features);
  return metrics::evaluate(label_scores(p), data.labels, decide_rows(p));
}

SelectionMetric parse_selection_metric(const std::string& name) {
  if (name == "average_precision") return SelectionMetric::kAveragePrecision;
  if (name == "hamming_loss") return SelectionMetric::kHammingLoss;
  if (name == "ranking_loss") return SelectionMetric::kRankingLoss;
  if (name == "one_error") return SelectionMetric::kOneError;
  if (name == "coverage") return SelectionMetric::kCoverage;
  throw ConfigError("unknown selection metric '" + name + "'");
}

std::string to_string(SelectionMetric metric) {
  switch (metric) {
    case SelectionMetric::kAveragePrecision: return "average_precision";
    case SelectionMetric::kHammingLoss: return "hamming_loss";
    case SelectionMetric::kRankingLoss: return "ranking_loss";
    case SelectionMetric::kOneError: return "one_error";
    case SelectionMetric::kCoverage: return "coverage";
  }
  return "average_precision";
}

Grid Grid::standard() {
  const std::vector<double> values{1.0 / 64, 1.0 / 16, 1.0 / 4, 1.0, 4.0, 16.0, 64.0};
  return {values, values, values};
}

namespace {

std::optional<double> pick(const EvalReport& r, SelectionMetric metric) {
  switch (metric) {
    case SelectionMetric::kAveragePrecision: return r.average_precision;
    case SelectionMetric::kHammingLoss: return r.hamming_loss;
    case SelectionMetric::kRankingLoss: return r.ranking_loss;
    case SelectionMetric::kOneError: return r.one_error;
    case SelectionMetric::kCoverage: return r.coverage;
  }
  return std::nullopt;
}

bool higher_is_better(SelectionMetric metric) {
  return metric == SelectionMetric::kAveragePrecision;
}

struct Fold {
  MultiLabelDataset train;
  MultiLabelDataset validation;
  NeighborhoodGraph graph;
};

}  // namespace

GridSearchResult grid_search(const MultiLabelDataset& train, const LemllConfig& base,
                             const Grid& grid, int folds, std::uint64_t seed,
                             SelectionMetric metric) {
  if (grid.size() == 0) throw ConfigError("grid is empty");
  if (folds < 2) throw ConfigError("grid search needs at least 2 folds");
  train.validate();
  base.validate();
  const Eigen::Index n = train.size();
  if (n < folds) throw ConfigError("more folds than training instances");

  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    for (const double x : v) {
      if (!(x > 0.0)) throw ConfigError("grid values must be positive");
    }
    return v;
  };
  const auto alphas = sorted(grid.alphas);
  const auto betas = sorted(grid.betas);
  const auto gammas = sorted(grid.gammas);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (Eigen::Index p = 0; p < n; ++p) fold_of[order[p]] = static_cast<int>(p % folds);

  std::vector<Fold> parts(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr;
    std::vector<Eigen::Index> va;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[i] == f ? va : tr).push_back(i);
    if (static_cast<Eigen::Index>(tr.size()) < base.k + 1) {
      throw ConfigError("fold training set smaller than K+1");
    }
    parts[f].train = train.subset(tr);
    parts[f].validation = train.subset(va);
    parts[f].graph = build_graph(parts[f].train.features, base.k, base.lle_regularization);
  }

  GridSearchResult result;
  for (const double a : alphas) {
    for (const double b : betas) {
      for (const double g : gammas) result.candidates.push_back({a, b, g, std::nullopt});
    }
  }

  const auto count = static_cast<std::ptrdiff_t>(result.candidates.size());
  std::vector<std::exception_ptr> failures(result.candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < count; ++c) {
    auto& cand = result.candidates[c];
    try {
      LemllConfig cfg = base;
      cfg.alpha = cand.alpha;
      cfg.beta = cand.beta;
      cfg.gamma = cand.gamma;
      double total = 0.0;
      int defined = 0;
      for (const auto& part : parts) {
        const auto model = fit(part.train, cfg, part.graph);
        if (const auto v = pick(evaluate_model(model, part.validation), metric)) {
          total += *v;
          ++defined;
        }
      }
      if (defined > 0) cand.score = total / defined;
    } catch (const SolverError&) {
      cand.score.reset();
    } catch (...) {
      failures[c] = std::current_exception();
    }
  }
  for (const auto& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  const bool up = higher_is_better(metric);
  const GridCandidate* best = &result.candidates.front();
  for (const auto& cand : result.candidates) {
    if (!cand.score) continue;
    if (!best->score || (up ? *cand.score > *best->score : *cand.score < *best->score)) {
      best = &cand;
    }
  }
  result.best = base;
  result.best.alpha = best->alpha;
  result.best.beta = best->beta;
  result.best.gamma = best->gamma;
  result.best_score = best->score;
  return result;
}

}  // namespace lemll
