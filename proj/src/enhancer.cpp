#include "lemll/enhancer.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <string>

#include "lemll/csv.hpp"
#include "lemll/error.hpp"
#include "lemll/msvr.hpp"
#include "lemll/neighborhood.hpp"

namespace lemll {

void EnhancerConfig::validate() const {
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (max_iters < 1) throw ConfigError("enhancer max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("enhancer rel_tol must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0,1)");
  if (max_backtracks < 0) throw ConfigError("max_backtracks must be >= 0");
}

namespace enhancer {
namespace {

void check_shapes(const Matrix& u, const Matrix& p, const Matrix& y, const SparseMatrix& m) {
  if (u.rows() != p.rows() || u.cols() != p.cols() || y.rows() != u.rows() ||
      y.cols() != u.cols() || m.rows() != u.rows() || m.cols() != u.rows()) {
    throw ConfigError("enhancer shapes are not conformable");
  }
}

SparseMatrix system_matrix(const SparseMatrix& m, const Vector& a, double beta, double gamma) {
  SparseMatrix diag(m.rows(), m.cols());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) entries.emplace_back(i, i, a(i) + beta);
  diag.setFromTriplets(entries.begin(), entries.end());
  return diag + gamma * m;
}

}  // namespace

double objective(const Matrix& u, const Matrix& p, const Matrix& y, const SparseMatrix& m,
                 double epsilon, double beta, double gamma) {
  check_shapes(u, p, y, m);
  const Vector r = msvr::residual_norms(u, p);
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) total += msvr::loss(r(i), epsilon);
  return total + beta * (u - y).squaredNorm() + gamma * manifold_penalty(m, u);
}

Vector weights(const Matrix& u, const Matrix& p, double epsilon) {
  const Vector r = msvr::residual_norms(u, p);
  Vector a(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) a(i) = msvr::irwls_weight(r(i), epsilon);
  return a;
}

double surrogate(const Matrix& u, const Matrix& p, const Matrix& y, const SparseMatrix& m,
                 const Vector& a, double beta, double gamma) {
  check_shapes(u, p, y, m);
  const Matrix au = a.asDiagonal() * u + beta * u + gamma * (m * u);
  const Matrix b = a.asDiagonal() * p + beta * y;
  return u.cwiseProduct(au).sum() - 2.0 * b.cwiseProduct(u).sum();
}

Matrix surrogate_gradient(const Matrix& u, const Matrix& p, const Matrix& y,
                          const SparseMatrix& m, const Vector& a, double beta, double gamma) {
  check_shapes(u, p, y, m);
  const Matrix au = a.asDiagonal() * u + beta * u + gamma * (m * u);
  const Matrix b = a.asDiagonal() * p + beta * y;
  return 2.0 * au - 2.0 * b;
}

Matrix closed_form_direction(const Matrix& p, const Matrix& y, const SparseMatrix& m,
                             const Vector& a, double beta, double gamma) {
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (a.size() != p.rows() || m.rows() != p.rows() || y.rows() != p.rows() ||
      y.cols() != p.cols()) {
    throw ConfigError("closed_form_direction shapes are not conformable");
  }
  const SparseMatrix lhs = system_matrix(m, a, beta, gamma);
  const Matrix rhs = a.asDiagonal() * p + beta * y;

  // Column-major copy for the factorization.
  const Eigen::SparseMatrix<double> system = lhs;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(system);
  const auto condition = [&chol]() {
    const Vector d = chol.vectorD();
    const double lo = d.cwiseAbs().minCoeff();
    return lo > 0.0 ? d.cwiseAbs().maxCoeff() / lo : std::numeric_limits<double>::infinity();
  };
  if (chol.info() != Eigen::Success) {
    throw SolverError("enhancer system factorization failed");
  }
  const Matrix u = chol.solve(rhs);
  if (chol.info() != Eigen::Success || !u.allFinite()) {
    throw SolverError("enhancer system solve is non-finite (pivot ratio estimate " +
                      csv::format_number(condition()) + ")");
  }
  return u;
}

EnhancerState update_U(const EnhancerState& state, const Matrix& p, const Matrix& y,
                       const SparseMatrix& m, const EnhancerConfig& config) {
  config.validate();
  check_shapes(state.u, p, y, m);
  const auto f = [&](const Matrix& u) {
    return objective(u, p, y, m, config.epsilon, config.beta, config.gamma);
  };

  EnhancerState next = state;
  next.last_objective = f(state.u);
  next.iteration = state.iteration + 1;
  next.converged = false;

  const Vector a = weights(state.u, p, config.epsilon);
  const Matrix target = closed_form_direction(p, y, m, a, config.beta, config.gamma);
  const Matrix direction = target - state.u;
  // The loss is C^1, so the surrogate gradient at U equals the true gradient.
  const double slope =
      surrogate_gradient(state.u, p, y, m, a, config.beta, config.gamma).cwiseProduct(direction).sum();
  if (!(slope < 0.0)) {
    next.converged = true;
    return next;
  }

  Matrix trial;
  const auto step = backtrack(
      next.last_objective, slope,
      [&](double t) {
        trial = state.u + t * direction;
        return f(trial);
      },
      config.line_search());
  if (!step) {
    next.converged = true;
    return next;
  }
  if (step->step == 1.0) {
    next.u = target;
    next.last_objective = f(target);
  } else {
    next.u = state.u + step->step * direction;
    next.last_objective = step->value;
  }
  return next;
}

RunResult run(const Matrix& u0, const Matrix& p, const Matrix& y, const SparseMatrix& m,
              const EnhancerConfig& config) {
  config.validate();
  RunResult out;
  out.state.u = u0;
  out.state.last_objective = objective(u0, p, y, m, config.epsilon, config.beta, config.gamma);
  out.trace.push_back(out.state.last_objective);
  for (int k = 0; k < config.max_iters; ++k) {
    const double previous = out.state.last_objective;
    out.state = update_U(out.state, p, y, m, config);
    if (out.state.converged) break;
    out.trace.push_back(out.state.last_objective);
    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if ((previous - out.state.last_objective) / scale < config.rel_tol) {
      out.state.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace enhancer
}  // namespace lemll
