#pragma once

// Test-only helpers: synthetic data generators and brute-force oracles.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lemll/dataset.hpp"
#include "lemll/types.hpp"

namespace lemll::testing {

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                       double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

inline std::vector<std::string> names(const std::string& prefix, Eigen::Index count) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < count; ++j) out.push_back(prefix + std::to_string(j + 1));
  return out;
}

// Labels from the sign of a noisy random linear map; every column gets at
// least one +1 and one -1.
inline MultiLabelDataset synthetic_multilabel(Eigen::Index n, Eigen::Index d, Eigen::Index l,
                                              std::uint64_t seed, double noise = 0.3) {
  std::mt19937_64 rng(seed);
  MultiLabelDataset ds;
  ds.features = gaussian(n, d, rng);
  const Matrix map = gaussian(d, l, rng);
  const Matrix scores = ds.features * map + gaussian(n, l, rng, noise);
  ds.labels.resize(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) ds.labels(i, j) = scores(i, j) > 0.0 ? 1 : -1;
  }
  ds.feature_names = names("f", d);
  ds.label_names = names("y", l);
  return ds;
}

// Row-softmax of a random linear map of the features plus Gaussian noise.
inline LabelDistributionDataset synthetic_distribution(Eigen::Index n, Eigen::Index d,
                                                       Eigen::Index l, std::uint64_t seed,
                                                       double noise = 0.1) {
  std::mt19937_64 rng(seed);
  LabelDistributionDataset ds;
  ds.features = gaussian(n, d, rng);
  const Matrix map = gaussian(d, l, rng, 1.0 / std::sqrt(static_cast<double>(d)));
  const Matrix logits = ds.features * map + gaussian(n, l, rng, noise);
  ds.distributions.resize(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = logits.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index j = 0; j < l; ++j) z += std::exp(logits(i, j) - top);
    for (Eigen::Index j = 0; j < l; ++j) ds.distributions(i, j) = std::exp(logits(i, j) - top) / z;
  }
  ds.feature_names = names("f", d);
  ds.label_names = names("y", l);
  return ds;
}

// Random row-stochastic W with zero diagonal and k nonzeros per row.
inline SparseMatrix random_row_stochastic(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> others;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::shuffle(others.begin(), others.end(), rng);
    std::vector<double> w(static_cast<std::size_t>(k));
    double s = 0.0;
    for (auto& v : w) s += (v = u(rng));
    if (std::abs(s) < 1e-3) {
      w[0] += 1.0;
      s += 1.0;
    }
    for (Eigen::Index m = 0; m < k; ++m) t.emplace_back(i, others[m], w[m] / s);
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// ---- oracles ---------------------------------------------------------------

// Gaussian elimination with partial pivoting, scalar loops.
inline Matrix dense_solve(Matrix a, Matrix b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    b.row(c).swap(b.row(piv));
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      for (Eigen::Index k = 0; k < b.cols(); ++k) b(r, k) -= f * b(c, k);
    }
  }
  Matrix x(n, b.cols());
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      double s = b(r, k);
      for (Eigen::Index j = r + 1; j < n; ++j) s -= a(r, j) * x(j, k);
      x(r, k) = s / a(r, r);
    }
  }
  return x;
}

// Repeated minimum scan over all other points; ties to the lower index.
inline std::vector<std::vector<Eigen::Index>> knn_by_selection(const Matrix& x, Eigen::Index k) {
  const Eigen::Index n = x.rows();
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    taken[i] = true;
    for (Eigen::Index m = 0; m < k; ++m) {
      Eigen::Index best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (taken[j]) continue;
        double s = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
        if (s < best_d) {
          best_d = s;
          best = j;
        }
      }
      taken[best] = true;
      out[i].push_back(best);
    }
  }
  return out;
}

// Minimizes a 1-D convex function on [lo, hi] by ternary search.
template <typename F>
double ternary_min(F&& f, double lo, double hi) {
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

struct BruteMetrics {
  double hamming = 0.0;
  std::optional<double> ranking, one_error, coverage, precision;
};

// Pair and rank enumeration straight from the definitions. rank(j) counts
// labels scored higher, or equal with a lower index, plus one.
inline BruteMetrics brute_metrics(const Matrix& s, const LabelMatrix& y, const LabelMatrix& h) {
  const Eigen::Index n = s.rows();
  const Eigen::Index l = s.cols();
  BruteMetrics out;
  double hl = 0.0, rl = 0.0, oe = 0.0, co = 0.0, ap = 0.0;
  int used = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int diff = 0;
    for (Eigen::Index j = 0; j < l; ++j) diff += (y(i, j) != h(i, j)) ? 1 : 0;
    hl += static_cast<double>(diff) / static_cast<double>(l);

    int rel = 0;
    for (Eigen::Index j = 0; j < l; ++j) rel += y(i, j) == 1 ? 1 : 0;
    if (rel == 0 || rel == l) continue;
    ++used;
    auto rank = [&](Eigen::Index j) {
      int r = 1;
      for (Eigen::Index k = 0; k < l; ++k) {
        if (s(i, k) > s(i, j) || (s(i, k) == s(i, j) && k < j)) ++r;
      }
      return r;
    };
    int bad = 0;
    for (Eigen::Index a = 0; a < l; ++a) {
      for (Eigen::Index b = 0; b < l; ++b) {
        if (y(i, a) == 1 && y(i, b) != 1 && s(i, a) <= s(i, b)) ++bad;
      }
    }
    rl += static_cast<double>(bad) / static_cast<double>(rel * (l - rel));
    for (Eigen::Index j = 0; j < l; ++j) {
      if (rank(j) == 1) oe += y(i, j) == 1 ? 0.0 : 1.0;
    }
    int deepest = 0;
    for (Eigen::Index j = 0; j < l; ++j) {
      if (y(i, j) == 1) deepest = std::max(deepest, rank(j));
    }
    co += static_cast<double>(deepest - 1) / static_cast<double>(l);
    double p = 0.0;
    for (Eigen::Index j = 0; j < l; ++j) {
      if (y(i, j) != 1) continue;
      int above = 0;
      for (Eigen::Index k = 0; k < l; ++k) {
        if (y(i, k) == 1 && rank(k) <= rank(j)) ++above;
      }
      p += static_cast<double>(above) / rank(j);
    }
    ap += p / rel;
  }
  out.hamming = hl / static_cast<double>(n);
  if (used > 0) {
    out.ranking = rl / used;
    out.one_error = oe / used;
    out.coverage = co / used;
    out.precision = ap / used;
  }
  return out;
}

inline double brute_chebyshev(const Vector& d, const Vector& e) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) m = std::max(m, std::abs(d(j) - e(j)));
  return m;
}

inline double brute_kl(const Vector& d, const Vector& e) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d(j) > 0.0) s += d(j) * std::log(d(j) / e(j));
  }
  return s;
}

inline double brute_cosine(const Vector& d, const Vector& e) {
  double de = 0.0, dd = 0.0, ee = 0.0;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    de += d(j) * e(j);
    dd += d(j) * d(j);
    ee += e(j) * e(j);
  }
  return de / (std::sqrt(dd) * std::sqrt(ee));
}

// Smallest prefix of the degree-sorted labels whose mass exceeds rho,
// found by trying every prefix length.
inline Eigen::VectorXi brute_binarize(const Vector& d, double rho) {
  const Eigen::Index l = d.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(l));
  for (Eigen::Index j = 0; j < l; ++j) order[j] = j;
  // insertion sort: descending degree, ascending index on ties
  for (std::size_t a = 1; a < order.size(); ++a) {
    for (std::size_t b = a; b > 0; --b) {
      const auto p = order[b - 1], q = order[b];
      if (d(q) > d(p)) std::swap(order[b - 1], order[b]);
    }
  }
  Eigen::Index take = l;
  for (Eigen::Index len = 1; len <= l; ++len) {
    double h = 0.0;
    for (Eigen::Index m = 0; m < len; ++m) h += d(order[m]);
    if (h > rho) {
      take = len;
      break;
    }
  }
  Eigen::VectorXi out = Eigen::VectorXi::Constant(l, -1);
  for (Eigen::Index m = 0; m < take; ++m) out(order[m]) = 1;
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lemll_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lemll::testing
