#pragma once

#include <vector>

#include "lemll/line_search.hpp"
#include "lemll/types.hpp"

namespace lemll {

struct EnhancerConfig {
  double epsilon = 0.1;
  double beta = 1.0;
  double gamma = 1.0;
  int max_iters = 50;
  double rel_tol = 1e-6;
  double armijo_c = 1e-4;
  int max_backtracks = 30;

  void validate() const;
  LineSearchPolicy line_search() const { return {armijo_c, max_backtracks}; }
};

struct EnhancerState {
  Matrix u;
  double last_objective = 0.0;
  int iteration = 0;
  bool converged = false;
};

// Label enhancement step: with predictions P held fixed, minimize
//   L(U) = sum_i Lr(||u_i - p_i||) + beta ||U - Y||_F^2 + gamma tr(U'MU).
// Y is the extended logical matrix (virtual column of zeros included).
namespace enhancer {

double objective(const Matrix& u, const Matrix& p, const Matrix& y, const SparseMatrix& m,
                 double epsilon, double beta, double gamma);

// IRWLS weights a_i evaluated at U.
Vector weights(const Matrix& u, const Matrix& p, double epsilon);

// Quadratic surrogate tr(U'(Da + beta I + gamma M)U) - 2 tr((Da P + beta Y)U'),
// additive constants dropped.
double surrogate(const Matrix& u, const Matrix& p, const Matrix& y, const SparseMatrix& m,
                 const Vector& a, double beta, double gamma);
Matrix surrogate_gradient(const Matrix& u, const Matrix& p, const Matrix& y,
                          const SparseMatrix& m, const Vector& a, double beta, double gamma);

// Minimizer of the surrogate: (Da + beta I + gamma M) U = Da P + beta Y,
// solved by sparse Cholesky. beta > 0 keeps the system positive definite.
Matrix closed_form_direction(const Matrix& p, const Matrix& y, const SparseMatrix& m,
                             const Vector& a, double beta, double gamma);

// One IRWLS step with line search on the true objective. When no step
// decreases the objective the state comes back unchanged and flagged converged.
EnhancerState update_U(const EnhancerState& state, const Matrix& p, const Matrix& y,
                       const SparseMatrix& m, const EnhancerConfig& config);

struct RunResult {
  EnhancerState state;
  std::vector<double> trace;  // objective at start and after each step
};

// Repeats update_U until the relative decrease drops below rel_tol or
// max_iters steps have been taken.
RunResult run(const Matrix& u0, const Matrix& p, const Matrix& y, const SparseMatrix& m,
              const EnhancerConfig& config);

}  // namespace enhancer
}  // namespace lemll
