#include "lemll/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lemll/error.hpp"

namespace lemll::metrics {
namespace {

struct InstanceScores {
  double hamming = 0.0;
  bool ranked = false;  // has both relevant and irrelevant labels
  double ranking = 0.0;
  double one_error = 0.0;
  double coverage = 0.0;
  double precision = 0.0;
};

std::vector<Eigen::Index> descending_order(const Vector& v) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&v](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
  return order;
}

InstanceScores score_instance(const Vector& s, const Eigen::VectorXi& truth,
                              const Eigen::VectorXi& decision) {
  const Eigen::Index l = s.size();
  InstanceScores out;
  out.hamming = static_cast<double>((truth.array() != decision.array()).count()) /
                static_cast<double>(l);

  const Eigen::Index num_rel = (truth.array() == 1).count();
  if (num_rel == 0 || num_rel == l) return out;
  out.ranked = true;

  const auto order = descending_order(s);
  std::vector<Eigen::Index> rank(static_cast<std::size_t>(l));
  for (Eigen::Index p = 0; p < l; ++p) rank[order[p]] = p + 1;

  out.one_error = truth(order.front()) == 1 ? 0.0 : 1.0;

  Eigen::Index misordered = 0;
  Eigen::Index deepest = 0;
  double precision = 0.0;
  for (Eigen::Index j = 0; j < l; ++j) {
    if (truth(j) != 1) continue;
    deepest = std::max(deepest, rank[j]);
    Eigen::Index above = 0;
    for (Eigen::Index k = 0; k < l; ++k) {
      if (truth(k) == 1) {
        if (rank[k] <= rank[j]) ++above;
      } else if (s(j) <= s(k)) {
        ++misordered;
      }
    }
    precision += static_cast<double>(above) / static_cast<double>(rank[j]);
  }
  out.ranking = static_cast<double>(misordered) / static_cast<double>(num_rel * (l - num_rel));
  out.coverage = static_cast<double>(deepest - 1) / static_cast<double>(l);
  out.precision = precision / static_cast<double>(num_rel);
  return out;
}

}  // namespace

EvalReport evaluate(const Matrix& scores, const LabelMatrix& truth, const LabelMatrix& decisions) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols() ||
      decisions.rows() != truth.rows() || decisions.cols() != truth.cols()) {
    throw ConfigError("evaluate: scores, truth and decisions must share a shape");
  }
  const Eigen::Index n = scores.rows();
  if (n == 0 || scores.cols() == 0) return {};

  std::vector<InstanceScores> per(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    per[i] = score_instance(scores.row(i).transpose(), truth.row(i).transpose(),
                            decisions.row(i).transpose());
  }

  // Serial reduction keeps the sums independent of the schedule.
  EvalReport report;
  double hamming = 0.0;
  double ranking = 0.0;
  double one_error = 0.0;
  double coverage = 0.0;
  double precision = 0.0;
  Eigen::Index ranked = 0;
  for (const auto& p : per) {
    hamming += p.hamming;
    if (!p.ranked) continue;
    ++ranked;
    ranking += p.ranking;
    one_error += p.one_error;
    coverage += p.coverage;
    precision += p.precision;
  }
  report.hamming_loss = hamming / static_cast<double>(n);
  if (ranked > 0) {
    const double m = static_cast<double>(ranked);
    report.ranking_loss = ranking / m;
    report.one_error = one_error / m;
    report.coverage = coverage / m;
    report.average_precision = precision / m;
  }
  return report;
}

double chebyshev(const Vector& d, const Vector& e) {
  if (d.size() != e.size()) throw ConfigError("chebyshev: length mismatch");
  return (d - e).cwiseAbs().maxCoeff();
}

double kl_divergence(const Vector& d, const Vector& e) {
  if (d.size() != e.size()) throw ConfigError("kl_divergence: length mismatch");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d(j) > 0.0) sum += d(j) * std::log(d(j) / e(j));
  }
  return sum;
}

double cosine(const Vector& d, const Vector& e) {
  if (d.size() != e.size()) throw ConfigError("cosine: length mismatch");
  return d.dot(e) / (d.norm() * e.norm());
}

Vector normalize(const Vector& mu) {
  Vector s(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double v = mu(j);
    s(j) = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return s / s.sum();
}

Matrix normalize_rows(const Matrix& mu) {
  Matrix out(mu.rows(), mu.cols());
  for (Eigen::Index i = 0; i < mu.rows(); ++i) out.row(i) = normalize(mu.row(i).transpose());
  return out;
}

Eigen::VectorXi binarize(const Vector& d, double rho) {
  const auto order = descending_order(d);
  Eigen::VectorXi out = Eigen::VectorXi::Constant(d.size(), -1);
  double mass = 0.0;
  for (const auto j : order) {
    out(j) = 1;
    mass += d(j);
    if (mass > rho) break;
  }
  return out;
}

LabelMatrix binarize_rows(const Matrix& distributions, double rho) {
  LabelMatrix out(distributions.rows(), distributions.cols());
  for (Eigen::Index i = 0; i < distributions.rows(); ++i) {
    out.row(i) = binarize(distributions.row(i).transpose(), rho).transpose();
  }
  return out;
}

ReconstructionReport compare(const Matrix& truth, const Matrix& reconstructed) {
  if (truth.rows() != reconstructed.rows() || truth.cols() != reconstructed.cols()) {
    throw ConfigError("compare: shape mismatch");
  }
  ReconstructionReport r;
  const Eigen::Index n = truth.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector d = truth.row(i).transpose();
    const Vector e = reconstructed.row(i).transpose();
    r.chebyshev += chebyshev(d, e);
    r.kl += kl_divergence(d, e);
    r.cosine += cosine(d, e);
  }
  const double m = static_cast<double>(std::max<Eigen::Index>(n, 1));
  r.chebyshev /= m;
  r.kl /= m;
  r.cosine /= m;
  return r;
}

}  // namespace lemll::metrics
