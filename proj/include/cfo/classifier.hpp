#pragma once

#include <span>
#include <string>
#include <vector>

#include "cfo/dataset.hpp"

namespace cfo {

inline constexpr double kDefaultRidgeRho = 1e-3;

/// Ridge model for one (minority, majority) pair. The minority class is
/// regressed to 0 and the majority to 1; a score below the threshold
/// predicts the minority class.
struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;
  ClassPair pair;
  std::string minority_name;
  std::string majority_name;
  double threshold = 0.5;
  double reg = kDefaultRidgeRho;
};

/// Minimizes (1/N) sum (w.x + b - y)^2 + rho (|w|^2 + b^2) over the rows of
/// the pair, i.e. solves (A'A + N rho I) [w; b] = A'y with A = [X 1].
/// With rho = 0 a rank-deficient system falls back to the least-norm solution
/// and a warning is appended to `warnings` when given.
LinearModel train_ridge(const Dataset& d, ClassPair pair, double rho = kDefaultRidgeRho,
                        std::vector<std::string>* warnings = nullptr);

double score(const LinearModel& m, std::span<const double> x);
int predict(const LinearModel& m, std::span<const double> x);

/// k-nearest-neighbour vote under Euclidean distance in feature-native scale.
class KnnModel {
 public:
  KnnModel(const Dataset& train, int k);

  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return labels_.size(); }
  /// Majority vote among the k nearest rows; equal distances resolve to the
  /// lower row index and tied votes to the smaller class id.
  int predict(std::span<const double> x) const;

 private:
  int k_;
  int num_classes_;
  Matrix features_;
  std::vector<int> labels_;
};

inline KnnModel knn_fit(const Dataset& d, int k) { return KnnModel(d, k); }
inline int knn_predict(const KnnModel& m, std::span<const double> x) { return m.predict(x); }

}  // namespace cfo
