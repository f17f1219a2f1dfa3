#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cfo/baselines.hpp"
#include "cfo/classifier.hpp"
#include "cfo/counterfactual.hpp"
#include "cfo/dataset.hpp"

namespace cfo {

/// Rows are truth, columns are prediction; class ids 1..C.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);
  static ConfusionMatrix from_predictions(std::span<const int> truth, std::span<const int> predicted, int classes);

  void add(int truth, int predicted, std::size_t count = 1);
  int num_classes() const noexcept { return classes_; }
  std::size_t operator()(int truth, int predicted) const;
  std::size_t total() const noexcept;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

 private:
  int classes_;
  std::vector<std::size_t> counts_;
};

/// Harmonic mean of precision and recall for `positive`; 0 when TP = 0.
double f_measure(const ConfusionMatrix& cm, int positive);
/// sqrt(TPR * TNR), one-vs-rest for `positive`. A rate with an empty
/// denominator counts as 0.
double g_mean(const ConfusionMatrix& cm, int positive);
/// Diagonal, index c-1 for class c.
std::vector<std::size_t> per_class_correct(const ConfusionMatrix& cm);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int predict(std::span<const double> x) const = 0;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>(const Dataset& train)>;
/// Oversamples a training fold; must return the input rows first, unchanged.
using Oversampler = std::function<Dataset(const Dataset& train, std::uint64_t seed)>;

ClassifierFactory knn_classifier(int k);
/// Ridge on two classes; one-vs-one vote (ties to the smaller id) otherwise.
ClassifierFactory ridge_classifier(double rho = kDefaultRidgeRho);

Oversampler identity_oversampler();
/// `params.seed` is replaced by the per-fold seed.
Oversampler counterfactual_oversampler(GenerationParams params);
Oversampler baseline_oversampler(BaselineSpec spec);

struct FoldResult {
  int run = 0;
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t augmented_size = 0;
  std::size_t test_size = 0;
  double f_measure = 0.0;
  double g_mean = 0.0;
  std::vector<double> f_per_positive;
  std::vector<double> g_per_positive;
  std::vector<std::size_t> correct_per_class;
};

struct MetricsReport {
  int folds = 0;
  int runs = 0;
  std::uint64_t seed = 0;
  std::vector<int> positive_classes;
  std::vector<std::string> class_names;
  std::vector<FoldResult> fold_results;  // ordered by (run, fold)
  double f_measure = 0.0;
  double g_mean = 0.0;
  double f_std_folds = 0.0;  // sample std over every (run, fold)
  double g_std_folds = 0.0;
  double f_std_runs = 0.0;   // sample std of the per-run means
  double g_std_runs = 0.0;
  std::vector<double> mean_correct_per_class;  // per run, summed over folds
  std::size_t leakage_checks = 0;
  std::size_t leakage_violations = 0;
  std::vector<std::string> warnings;
};

/// Stratified fold id per row: each class is shuffled with a stream derived
/// from (seed, run, class) and dealt round-robin, continuing the deal across
/// classes so fold sizes stay balanced.
std::vector<int> stratified_folds(const Dataset& d, int k, std::uint64_t seed, int run,
                                  std::vector<std::string>* warnings = nullptr);

/// Stratified k-fold cross-validation repeated `runs` times. Oversampling
/// touches only the training fold; metrics are macro-averaged over the
/// minority classes (every class with a strictly larger class).
MetricsReport kfold_evaluate(const Dataset& d, const Oversampler& oversampler, const ClassifierFactory& classifier,
                             int k, int runs, std::uint64_t seed, int threads = 1);

struct RegionCounts {
  std::size_t majority = 0;
  std::size_t boundary_minority = 0;
  std::size_t interior_minority = 0;
  std::size_t total() const noexcept { return majority + boundary_minority + interior_minority; }
};

enum class Region { Majority, BoundaryMinority, InteriorMinority };

/// score >= threshold: majority; [threshold - tau, threshold): boundary; below: interior.
Region classify_region(const LinearModel& model, std::span<const double> x, double tau);
RegionCounts count_regions(const LinearModel& model, const Matrix& rows, double tau);

struct CensusReport {
  RegionCounts generated;
  RegionCounts original;  // factual rows of the model's minority class
  double tau = 0.0;
};

CensusReport region_census(const Dataset& factual, const Matrix& generated, const LinearModel& model, double tau);

}  // namespace cfo
