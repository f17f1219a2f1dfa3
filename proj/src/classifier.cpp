#include "cfo/classifier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cfo {

LinearModel train_ridge(const Dataset& d, ClassPair pair, double rho, std::vector<std::string>* warnings) {
  if (rho < 0.0) throw std::invalid_argument("train_ridge: rho must be >= 0");
  if (pair.minority == pair.majority) throw std::invalid_argument("train_ridge: pair classes must differ");
  const auto& lo = d.class_rows(pair.minority);
  const auto& hi = d.class_rows(pair.majority);
  if (lo.empty() || hi.empty()) throw DataError("train_ridge: both classes of the pair need samples");

  std::vector<std::size_t> rows(lo);
  rows.insert(rows.end(), hi.begin(), hi.end());
  std::sort(rows.begin(), rows.end());

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(d.num_features());
  Eigen::MatrixXd a(n, m + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto x = d.row(rows[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m; ++c) a(r, c) = x[static_cast<std::size_t>(c)];
    a(r, m) = 1.0;
    y(r) = d.label(rows[static_cast<std::size_t>(r)]) == pair.majority ? 1.0 : 0.0;
  }

  Eigen::VectorXd w;
  if (rho > 0.0) {
    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal().array() += static_cast<double>(n) * rho;
    w = normal.llt().solve(a.transpose() * y);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    if (cod.rank() < m + 1 && warnings) {
      warnings->push_back("train_ridge: singular system with rho = 0, using least-norm solution");
    }
    w = cod.solve(y);
  }

  LinearModel model;
  model.weights.assign(w.data(), w.data() + m);
  model.intercept = w(m);
  model.pair = pair;
  model.minority_name = d.class_name(pair.minority);
  model.majority_name = d.class_name(pair.majority);
  model.reg = rho;
  return model;
}

double score(const LinearModel& m, std::span<const double> x) {
  if (x.size() != m.weights.size()) throw std::invalid_argument("score: dimension mismatch");
  double s = m.intercept;
  for (std::size_t k = 0; k < x.size(); ++k) s += m.weights[k] * x[k];
  return s;
}

int predict(const LinearModel& m, std::span<const double> x) {
  return score(m, x) < m.threshold ? m.pair.minority : m.pair.majority;
}

KnnModel::KnnModel(const Dataset& train, int k)
    : k_(k), num_classes_(train.num_classes()), features_(train.features()), labels_(train.labels()) {
  if (k < 1) throw std::invalid_argument("knn: k must be positive");
  if (static_cast<std::size_t>(k) > labels_.size())
    throw std::invalid_argument("knn: k larger than the training set");
}

int KnnModel::predict(std::span<const double> x) const {
  if (x.size() != features_.cols()) throw std::invalid_argument("knn: dimension mismatch");
  const std::size_t n = labels_.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = features_.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double diff = row[c] - x[c];
      s += diff * diff;
    }
    dist[r] = {s, r};
  }
  const auto kk = static_cast<std::ptrdiff_t>(k_);
  std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
  std::vector<int> votes(static_cast<std::size_t>(num_classes_) + 1, 0);
  for (std::ptrdiff_t t = 0; t < kk; ++t) ++votes[static_cast<std::size_t>(labels_[dist[t].second])];
  int best = 1;
  for (int c = 2; c <= num_classes_; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return best;
}

}  // namespace cfo
