#pragma once

#include <optional>

#include "lemll/types.hpp"

namespace lemll {

// Five multi-label metrics. A metric is empty when no instance qualifies
// (ranking metrics skip rows whose relevant or irrelevant set is empty).
struct EvalReport {
  std::optional<double> hamming_loss;
  std::optional<double> ranking_loss;
  std::optional<double> one_error;
  std::optional<double> coverage;
  std::optional<double> average_precision;
};

struct ReconstructionReport {
  double chebyshev = 0.0;
  double kl = 0.0;
  double cosine = 0.0;
};

namespace metrics {

// scores rank labels in descending order, ties to the lower label index.
// Ranking loss counts score ties between a relevant and an irrelevant label
// as mis-ordered. Coverage is normalized by l.
EvalReport evaluate(const Matrix& scores, const LabelMatrix& truth, const LabelMatrix& decisions);

double chebyshev(const Vector& d, const Vector& e);
// sum_j d_j ln(d_j / e_j); terms with d_j = 0 vanish. d is the ground truth.
double kl_divergence(const Vector& d, const Vector& e);
double cosine(const Vector& d, const Vector& e);

// sigmoid(mu) / sum_k sigmoid(mu_k)
Vector normalize(const Vector& mu);
Matrix normalize_rows(const Matrix& mu);

// Greedy top-down labelling: take labels by descending degree (ties to the
// lower index) until the accumulated degree strictly exceeds rho.
Eigen::VectorXi binarize(const Vector& d, double rho);
LabelMatrix binarize_rows(const Matrix& distributions, double rho);

// Row-averaged distribution measures.
ReconstructionReport compare(const Matrix& truth, const Matrix& reconstructed);

}  // namespace metrics
}  // namespace lemll
