#include "lemll/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lemll/csv.hpp"
#include "lemll/error.hpp"

namespace lemll {
namespace {

Matrix parse_matrix(const csv::Table& table, const std::filesystem::path& path) {
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(table.header.size());
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m(i, j) = csv::parse_number(table.rows[i][j], path, table.line_numbers[i], j + 1);
    }
  }
  return m;
}

void require_paired(const csv::Table& features, const csv::Table& labels,
                    const std::filesystem::path& features_path,
                    const std::filesystem::path& labels_path) {
  if (features.rows.size() != labels.rows.size()) {
    throw DataError("row count mismatch: " + features_path.string() + " has " +
                    std::to_string(features.rows.size()) + " rows, " + labels_path.string() +
                    " has " + std::to_string(labels.rows.size()));
  }
  if (features.rows.empty()) throw DataError(features_path.string() + ": no data rows");
  if (features.header.empty() || features.header.front().empty()) {
    throw DataError(features_path.string() + ": no feature columns");
  }
  if (labels.header.empty() || labels.header.front().empty()) {
    throw DataError(labels_path.string() + ": no label columns");
  }
}

std::vector<std::vector<std::string>> format_rows(const Matrix& m) {
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows[i].reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i].push_back(csv::format_number(m(i, j)));
  }
  return rows;
}

}  // namespace

void MultiLabelDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1 || labels.cols() < 1) {
    throw DataError("dataset needs n >= 1, d >= 1, l >= 1");
  }
  if (features.rows() != labels.rows()) throw DataError("features and labels differ in row count");
  if (!features.allFinite()) throw DataError("features contain non-finite values");
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    for (Eigen::Index j = 0; j < labels.cols(); ++j) {
      if (labels(i, j) != 1 && labels(i, j) != -1) {
        throw DataError("label at row " + std::to_string(i) + ", column " + std::to_string(j) +
                        " is not -1 or +1");
      }
    }
  }
  if (static_cast<Eigen::Index>(label_names.size()) != labels.cols() ||
      static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw DataError("name lists do not match matrix widths");
  }
}

MultiLabelDataset MultiLabelDataset::subset(const std::vector<Eigen::Index>& rows) const {
  MultiLabelDataset out;
  out.features = features(rows, Eigen::all);
  out.labels = labels(rows, Eigen::all);
  out.feature_names = feature_names;
  out.label_names = label_names;
  return out;
}

void LabelDistributionDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1 || distributions.cols() < 1) {
    throw DataError("dataset needs n >= 1, d >= 1, l >= 1");
  }
  if (features.rows() != distributions.rows()) {
    throw DataError("features and distributions differ in row count");
  }
  for (Eigen::Index i = 0; i < distributions.rows(); ++i) {
    if ((distributions.row(i).array() < 0.0).any() || (distributions.row(i).array() > 1.0).any()) {
      throw DataError("distribution row " + std::to_string(i) + " has entries outside [0,1]");
    }
    if (std::abs(distributions.row(i).sum() - 1.0) > 1e-9) {
      throw DataError("distribution row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

MultiLabelDataset load_multilabel(const std::filesystem::path& features_path,
                                  const std::filesystem::path& labels_path) {
  const auto feature_table = csv::read(features_path);
  const auto label_table = csv::read(labels_path);
  require_paired(feature_table, label_table, features_path, labels_path);

  MultiLabelDataset ds;
  ds.features = parse_matrix(feature_table, features_path);
  ds.feature_names = feature_table.header;
  ds.label_names = label_table.header;

  const auto n = static_cast<Eigen::Index>(label_table.rows.size());
  const auto l = static_cast<Eigen::Index>(label_table.header.size());
  ds.labels.resize(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      const auto& cell = label_table.rows[i][j];
      if (cell == "1") {
        ds.labels(i, j) = 1;
      } else if (cell == "-1") {
        ds.labels(i, j) = -1;
      } else {
        throw DataError(labels_path.string() + ":" + std::to_string(label_table.line_numbers[i]) +
                        ": column " + std::to_string(j + 1) + ": label '" + cell +
                        "' must be -1 or 1");
      }
    }
  }
  ds.validate();
  return ds;
}

LabelDistributionDataset load_distribution(const std::filesystem::path& features_path,
                                           const std::filesystem::path& labels_path) {
  const auto feature_table = csv::read(features_path);
  const auto label_table = csv::read(labels_path);
  require_paired(feature_table, label_table, features_path, labels_path);

  LabelDistributionDataset ds;
  ds.features = parse_matrix(feature_table, features_path);
  ds.distributions = parse_matrix(label_table, labels_path);
  ds.feature_names = feature_table.header;
  ds.label_names = label_table.header;

  for (Eigen::Index i = 0; i < ds.distributions.rows(); ++i) {
    const auto line = std::to_string(label_table.line_numbers[i]);
    for (Eigen::Index j = 0; j < ds.distributions.cols(); ++j) {
      if (ds.distributions(i, j) < 0.0) {
        throw DataError(labels_path.string() + ":" + line + ": column " + std::to_string(j + 1) +
                        ": negative description degree");
      }
    }
    const double sum = ds.distributions.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-6) {
      throw DataError(labels_path.string() + ":" + line + ": row sums to " +
                      csv::format_number(sum) + ", expected 1 within 1e-6");
    }
    ds.distributions.row(i) /= sum;
  }
  if (!ds.features.allFinite()) throw DataError(features_path.string() + ": non-finite feature");
  ds.validate();
  return ds;
}

void write_features(const std::filesystem::path& path, const Matrix& features,
                    const std::vector<std::string>& names) {
  csv::write(path, names, format_rows(features));
}

void write_labels(const std::filesystem::path& path, const LabelMatrix& labels,
                  const std::vector<std::string>& names) {
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(labels.rows()));
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    for (Eigen::Index j = 0; j < labels.cols(); ++j) {
      rows[i].push_back(std::to_string(labels(i, j)));
    }
  }
  csv::write(path, names, rows);
}

void write_distributions(const std::filesystem::path& path, const Matrix& distributions,
                         const std::vector<std::string>& names) {
  csv::write(path, names, format_rows(distributions));
}

std::vector<Split> make_splits(Eigen::Index n, const SplitPlan& plan) {
  if (n < 2) throw ConfigError("make_splits needs n >= 2");
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0,1)");
  }
  const auto train_size =
      static_cast<Eigen::Index>(std::llround(plan.train_fraction * static_cast<double>(n)));
  if (train_size < 1 || train_size > n - 1) {
    throw ConfigError("split leaves the train or test side empty");
  }

  std::mt19937_64 rng(plan.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::vector<Split> splits;
  splits.reserve(plan.repetitions);
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    Split s;
    s.train.assign(order.begin(), order.begin() + train_size);
    s.test.assign(order.begin() + train_size, order.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

Standardizer::Standardizer(Vector mean, Vector scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) throw ConfigError("standardizer size mismatch");
}

Standardizer Standardizer::fit(const Matrix& features) {
  const double n = static_cast<double>(features.rows());
  Vector mean = features.colwise().mean();
  Vector scale(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - mean(j)).square().sum() / n;
    scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return {std::move(mean), std::move(scale)};
}

Matrix Standardizer::apply(const Matrix& features) const {
  if (empty()) return features;
  if (features.cols() != mean_.size()) throw DataError("standardizer width mismatch");
  return (features.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array();
}

}  // namespace lemll
