#pragma once

#include <iosfwd>
#include <vector>

#include "lemll/line_search.hpp"
#include "lemll/types.hpp"

namespace lemll {

// Linear multi-output predictor p = theta * x + bias.
struct RegressionModel {
  Matrix theta;  // outputs x d
  Vector bias;   // outputs

  static RegressionModel zeros(Eigen::Index outputs, Eigen::Index d);

  Eigen::Index outputs() const { return theta.rows(); }
  Eigen::Index inputs() const { return theta.cols(); }

  Vector predict(const Vector& x) const;
  // One prediction per row of x.
  Matrix predict_rows(const Matrix& x) const;
};

struct SolverConfig {
  double epsilon = 0.1;
  double alpha = 1.0;
  int max_iters = 100;
  double rel_tol = 1e-6;
  double armijo_c = 1e-4;
  int max_backtracks = 30;

  void validate() const;
  LineSearchPolicy line_search() const { return {armijo_c, max_backtracks}; }
};

namespace msvr {

// Epsilon-insensitive loss on the l2 residual norm: (r - eps)^2 outside the tube.
double loss(double r, double epsilon);
double loss_derivative(double r, double epsilon);
// IRWLS weight (1 / 2r) dL/dr = (r - eps) / r outside the tube, 0 inside.
double irwls_weight(double r, double epsilon);

struct Residuals {
  Matrix xi;  // U - P, n x outputs
  Vector r;   // row norms of xi
};

Residuals residuals(const RegressionModel& model, const Matrix& x, const Matrix& u);

// Row-wise residual norms for an explicit prediction matrix.
Vector residual_norms(const Matrix& u, const Matrix& p);

// sum_i L(r_i) + alpha ||theta||_F^2
double objective(const RegressionModel& model, const Matrix& x, const Matrix& u,
                 const SolverConfig& config);

struct Gradient {
  Matrix theta;
  Vector bias;
};

// Gradient of objective(); the loss is C^1 so this is exact everywhere.
Gradient gradient(const RegressionModel& model, const Matrix& x, const Matrix& u,
                  const SolverConfig& config);

// argmin sum_i a_i ||u_i - theta x_i - b||^2 + alpha ||theta||_F^2.
// Requires at least one positive weight.
RegressionModel weighted_ridge(const Matrix& x, const Matrix& u, const Vector& weights,
                               double alpha);

struct FitResult {
  RegressionModel model;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective at start and after each accepted step
};

// IRWLS with backtracking line search. Starts from the zero model, or from
// `initial` when that one scores lower.
FitResult fit(const Matrix& x, const Matrix& u, const SolverConfig& config);
FitResult fit(const Matrix& x, const Matrix& u, const SolverConfig& config,
              const RegressionModel& initial);

// Text form: "regression <outputs> <d>", then theta row-major one row per
// line, then the bias on one line. Values carry 17 significant digits.
void save(std::ostream& out, const RegressionModel& model);
RegressionModel load(std::istream& in);

}  // namespace msvr
}  // namespace lemll
