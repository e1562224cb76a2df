#include "lemll/msvr.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "lemll/csv.hpp"
#include "lemll/error.hpp"

namespace lemll {

RegressionModel RegressionModel::zeros(Eigen::Index outputs, Eigen::Index d) {
  return {Matrix::Zero(outputs, d), Vector::Zero(outputs)};
}

Vector RegressionModel::predict(const Vector& x) const {
  if (x.size() != theta.cols()) {
    throw DataError("input has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(theta.cols()));
  }
  return theta * x + bias;
}

Matrix RegressionModel::predict_rows(const Matrix& x) const {
  if (x.cols() != theta.cols()) {
    throw DataError("input has " + std::to_string(x.cols()) + " features, model expects " +
                    std::to_string(theta.cols()));
  }
  return (x * theta.transpose()).rowwise() + bias.transpose();
}

void SolverConfig::validate() const {
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0,1)");
  if (max_backtracks < 0) throw ConfigError("max_backtracks must be >= 0");
}

namespace msvr {
namespace {

void check_shapes(const RegressionModel& model, const Matrix& x, const Matrix& u) {
  if (x.rows() != u.rows() || model.theta.cols() != x.cols() ||
      model.theta.rows() != u.cols() || model.bias.size() != u.cols()) {
    throw ConfigError("regression shapes are not conformable");
  }
}

double relative_decrease(double before, double after) {
  const double scale = std::max(std::abs(before), std::numeric_limits<double>::min());
  return (before - after) / scale;
}

}  // namespace

double loss(double r, double epsilon) {
  if (r < epsilon) return 0.0;
  const double t = r - epsilon;
  return t * t;
}

double loss_derivative(double r, double epsilon) { return r < epsilon ? 0.0 : 2.0 * (r - epsilon); }

double irwls_weight(double r, double epsilon) {
  if (r < epsilon || r == 0.0) return 0.0;
  return (r - epsilon) / r;
}

Vector residual_norms(const Matrix& u, const Matrix& p) { return (u - p).rowwise().norm(); }

Residuals residuals(const RegressionModel& model, const Matrix& x, const Matrix& u) {
  check_shapes(model, x, u);
  Residuals res;
  res.xi = u - model.predict_rows(x);
  res.r = res.xi.rowwise().norm();
  return res;
}

double objective(const RegressionModel& model, const Matrix& x, const Matrix& u,
                 const SolverConfig& config) {
  const auto res = residuals(model, x, u);
  double total = 0.0;
  for (Eigen::Index i = 0; i < res.r.size(); ++i) total += loss(res.r(i), config.epsilon);
  return total + config.alpha * model.theta.squaredNorm();
}

Gradient gradient(const RegressionModel& model, const Matrix& x, const Matrix& u,
                  const SolverConfig& config) {
  const auto res = residuals(model, x, u);
  Vector a(res.r.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = irwls_weight(res.r(i), config.epsilon);
  const Matrix weighted = a.asDiagonal() * res.xi;
  return {2.0 * config.alpha * model.theta - 2.0 * weighted.transpose() * x,
          -2.0 * weighted.colwise().sum().transpose()};
}

RegressionModel weighted_ridge(const Matrix& x, const Matrix& u, const Vector& weights,
                               double alpha) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (weights.size() != n || u.rows() != n) throw ConfigError("weighted_ridge shape mismatch");
  if (!(weights.array() > 0.0).any()) throw SolverError("weighted_ridge: all weights are zero");

  // Augmented design [x 1]; the bias column carries no ridge penalty.
  Matrix design(n, d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();
  const Vector root = weights.cwiseSqrt();
  const Matrix scaled = root.asDiagonal() * design;
  Matrix normal = scaled.transpose() * scaled;
  normal.diagonal().head(d).array() += alpha;
  const Matrix rhs = scaled.transpose() * (root.asDiagonal() * u);

  Eigen::LDLT<Matrix> ldlt(normal);
  const Matrix coeffs = ldlt.solve(rhs);  // (d + 1) x outputs
  if (ldlt.info() != Eigen::Success || !coeffs.allFinite()) {
    throw SolverError("weighted ridge normal system is singular");
  }
  return {coeffs.topRows(d).transpose(), coeffs.row(d).transpose()};
}

FitResult fit(const Matrix& x, const Matrix& u, const SolverConfig& config) {
  return fit(x, u, config, RegressionModel::zeros(u.cols(), x.cols()));
}

FitResult fit(const Matrix& x, const Matrix& u, const SolverConfig& config,
              const RegressionModel& initial) {
  config.validate();
  if (x.rows() < 1) throw ConfigError("msvr fit needs n >= 1");
  if (x.rows() != u.rows()) throw ConfigError("features and targets differ in row count");

  FitResult out;
  out.model = RegressionModel::zeros(u.cols(), x.cols());
  out.objective = objective(out.model, x, u, config);
  if (initial.theta.size() != 0 || initial.bias.size() != 0) {
    check_shapes(initial, x, u);
    const double warm = objective(initial, x, u, config);
    if (warm < out.objective) {
      out.model = initial;
      out.objective = warm;
    }
  }
  out.trace.push_back(out.objective);

  const auto policy = config.line_search();
  for (int it = 0; it < config.max_iters; ++it) {
    const auto res = residuals(out.model, x, u);
    Vector a(res.r.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = irwls_weight(res.r(i), config.epsilon);

    if (!(a.array() > 0.0).any()) {
      // Every residual sits inside the tube, so the surrogate carries no
      // loss information. Try the ridge-optimal constant model instead.
      RegressionModel flat{Matrix::Zero(u.cols(), x.cols()), u.colwise().mean().transpose()};
      const double f = objective(flat, x, u, config);
      out.iterations = it + 1;
      if (f < out.objective) {
        out.model = std::move(flat);
        out.objective = f;
        out.trace.push_back(f);
        continue;
      }
      out.converged = true;
      break;
    }

    const RegressionModel target = weighted_ridge(x, u, a, config.alpha);
    const Matrix d_theta = target.theta - out.model.theta;
    const Vector d_bias = target.bias - out.model.bias;
    const auto grad = gradient(out.model, x, u, config);
    const double slope = grad.theta.cwiseProduct(d_theta).sum() + grad.bias.dot(d_bias);
    out.iterations = it + 1;
    if (!(slope < 0.0)) {
      out.converged = true;
      break;
    }

    RegressionModel trial;
    const auto step = backtrack(
        out.objective, slope,
        [&](double t) {
          trial.theta = out.model.theta + t * d_theta;
          trial.bias = out.model.bias + t * d_bias;
          return objective(trial, x, u, config);
        },
        policy);
    if (!step) {
      out.converged = true;
      break;
    }

    const double previous = out.objective;
    out.model.theta += step->step * d_theta;
    out.model.bias += step->step * d_bias;
    out.objective = step->value;
    out.trace.push_back(out.objective);
    if (relative_decrease(previous, out.objective) < config.rel_tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.model.theta.allFinite() || !out.model.bias.allFinite()) {
    throw SolverError("msvr fit produced non-finite coefficients");
  }
  return out;
}

void save(std::ostream& out, const RegressionModel& model) {
  out << "regression " << model.theta.rows() << ' ' << model.theta.cols() << '\n';
  for (Eigen::Index i = 0; i < model.theta.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.theta.cols(); ++j) {
      if (j) out << ' ';
      out << csv::format_number(model.theta(i, j));
    }
    out << '\n';
  }
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) {
    if (i) out << ' ';
    out << csv::format_number(model.bias(i));
  }
  out << '\n';
}

RegressionModel load(std::istream& in) {
  std::string tag;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> tag >> rows >> cols) || tag != "regression" || rows < 1 || cols < 1) {
    throw DataError("malformed regression header");
  }
  auto next = [&in]() {
    std::string token;
    if (!(in >> token)) throw DataError("truncated regression block");
    return csv::parse_number(token, "<model>", 0, 0);
  };
  RegressionModel model{Matrix(rows, cols), Vector(rows)};
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) model.theta(i, j) = next();
  }
  for (Eigen::Index i = 0; i < rows; ++i) model.bias(i) = next();
  return model;
}

}  // namespace msvr
}  // namespace lemll
