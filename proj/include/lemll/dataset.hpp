#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lemll/types.hpp"

namespace lemll {

// Features X (n x d) paired with logical labels Y in {-1,+1}^(n x l).
struct MultiLabelDataset {
  Matrix features;
  LabelMatrix labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index num_features() const { return features.cols(); }
  Eigen::Index num_labels() const { return labels.cols(); }

  // Throws DataError if any invariant is broken.
  void validate() const;
  MultiLabelDataset subset(const std::vector<Eigen::Index>& rows) const;
};

// Features paired with label distributions; each row is nonnegative and sums to one.
struct LabelDistributionDataset {
  Matrix features;
  Matrix distributions;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index num_labels() const { return distributions.cols(); }

  void validate() const;
};

MultiLabelDataset load_multilabel(const std::filesystem::path& features_path,
                                  const std::filesystem::path& labels_path);

// Rows must sum to 1 within 1e-6; they are then divided by their sum.
LabelDistributionDataset load_distribution(const std::filesystem::path& features_path,
                                           const std::filesystem::path& labels_path);

void write_features(const std::filesystem::path& path, const Matrix& features,
                    const std::vector<std::string>& names);
void write_labels(const std::filesystem::path& path, const LabelMatrix& labels,
                  const std::vector<std::string>& names);
void write_distributions(const std::filesystem::path& path, const Matrix& distributions,
                         const std::vector<std::string>& names);

struct SplitPlan {
  std::uint64_t seed = 0;
  std::size_t repetitions = 10;
  double train_fraction = 0.5;
};

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

// Repeated random partitions without replacement; train size is
// round(train_fraction * n). Both index lists come back sorted.
std::vector<Split> make_splits(Eigen::Index n, const SplitPlan& plan);

// Per-feature z-scoring with statistics taken from a training matrix.
// Constant features keep scale 1.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Vector mean, Vector scale);

  static Standardizer fit(const Matrix& features);
  Matrix apply(const Matrix& features) const;

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }
  bool empty() const { return mean_.size() == 0; }

 private:
  Vector mean_;
  Vector scale_;
};

}  // namespace lemll
