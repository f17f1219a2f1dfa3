#include "cfo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "cfo/numerics.hpp"
#include "cfo/parallel.hpp"

namespace cfo {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
  if (classes < 1) throw std::invalid_argument("ConfusionMatrix: need at least one class");
  counts_.assign(static_cast<std::size_t>(classes) * static_cast<std::size_t>(classes), 0);
}

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const int> truth, std::span<const int> predicted,
                                                  int classes) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("ConfusionMatrix: length mismatch");
  ConfusionMatrix cm(classes);
  for (std::size_t k = 0; k < truth.size(); ++k) cm.add(truth[k], predicted[k]);
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::size_t count) {
  if (truth < 1 || truth > classes_ || predicted < 1 || predicted > classes_)
    throw std::out_of_range("ConfusionMatrix: class id out of range");
  counts_[static_cast<std::size_t>(truth - 1) * static_cast<std::size_t>(classes_) +
          static_cast<std::size_t>(predicted - 1)] += count;
}

std::size_t ConfusionMatrix::operator()(int truth, int predicted) const {
  if (truth < 1 || truth > classes_ || predicted < 1 || predicted > classes_)
    throw std::out_of_range("ConfusionMatrix: class id out of range");
  return counts_[static_cast<std::size_t>(truth - 1) * static_cast<std::size_t>(classes_) +
                 static_cast<std::size_t>(predicted - 1)];
}

std::size_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw std::invalid_argument("ConfusionMatrix: class count mismatch");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  return *this;
}

namespace {

struct Binary {
  double tp = 0, fp = 0, fn = 0, tn = 0;
};

Binary one_vs_rest(const ConfusionMatrix& cm, int positive) {
  Binary b;
  for (int t = 1; t <= cm.num_classes(); ++t) {
    for (int p = 1; p <= cm.num_classes(); ++p) {
      const auto n = static_cast<double>(cm(t, p));
      if (t == positive && p == positive) b.tp += n;
      else if (t == positive) b.fn += n;
      else if (p == positive) b.fp += n;
      else b.tn += n;
    }
  }
  return b;
}

}  // namespace

double f_measure(const ConfusionMatrix& cm, int positive) {
  const auto b = one_vs_rest(cm, positive);
  if (b.tp == 0.0) return 0.0;
  const double precision = b.tp / (b.tp + b.fp);
  const double recall = b.tp / (b.tp + b.fn);
  return 2.0 * precision * recall / (precision + recall);
}

double g_mean(const ConfusionMatrix& cm, int positive) {
  const auto b = one_vs_rest(cm, positive);
  const double tpr = b.tp + b.fn > 0.0 ? b.tp / (b.tp + b.fn) : 0.0;
  const double tnr = b.tn + b.fp > 0.0 ? b.tn / (b.tn + b.fp) : 0.0;
  return std::sqrt(tpr * tnr);
}

std::vector<std::size_t> per_class_correct(const ConfusionMatrix& cm) {
  std::vector<std::size_t> out(static_cast<std::size_t>(cm.num_classes()));
  for (int c = 1; c <= cm.num_classes(); ++c) out[static_cast<std::size_t>(c - 1)] = cm(c, c);
  return out;
}

namespace {

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(const Dataset& d, int k) : model_(d, k) {}
  int predict(std::span<const double> x) const override { return model_.predict(x); }

 private:
  KnnModel model_;
};

class RidgeVoteClassifier final : public Classifier {
 public:
  RidgeVoteClassifier(const Dataset& d, double rho) : classes_(d.num_classes()) {
    for (int i = 1; i <= classes_; ++i) {
      for (int j = i + 1; j <= classes_; ++j) {
        if (d.class_size(i) == 0 || d.class_size(j) == 0) continue;
        // The smaller class of the two plays the minority role.
        const ClassPair pair = d.class_size(i) <= d.class_size(j) ? ClassPair{i, j} : ClassPair{j, i};
        models_.push_back(train_ridge(d, pair, rho));
      }
    }
    if (models_.empty()) throw DataError("ridge classifier: fewer than two non-empty classes in training data");
  }

  int predict(std::span<const double> x) const override {
    if (models_.size() == 1) return cfo::predict(models_.front(), x);
    std::vector<int> votes(static_cast<std::size_t>(classes_) + 1, 0);
    for (const auto& m : models_) ++votes[static_cast<std::size_t>(cfo::predict(m, x))];
    int best = 1;
    for (int c = 2; c <= classes_; ++c) {
      if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
  }

 private:
  int classes_;
  std::vector<LinearModel> models_;
};

}  // namespace

ClassifierFactory knn_classifier(int k) {
  return [k](const Dataset& train) -> std::unique_ptr<Classifier> { return std::make_unique<KnnClassifier>(train, k); };
}

ClassifierFactory ridge_classifier(double rho) {
  return [rho](const Dataset& train) -> std::unique_ptr<Classifier> {
    return std::make_unique<RidgeVoteClassifier>(train, rho);
  };
}

Oversampler identity_oversampler() {
  return [](const Dataset& train, std::uint64_t) { return train; };
}

Oversampler counterfactual_oversampler(GenerationParams params) {
  return [params](const Dataset& train, std::uint64_t seed) {
    GenerationParams p = params;
    p.seed = seed;
    return oversample_all(train, p).augmented;
  };
}

Oversampler baseline_oversampler(BaselineSpec spec) {
  return [spec](const Dataset& train, std::uint64_t seed) {
    BaselineSpec s = spec;
    s.seed = seed;
    return baseline_oversample(train, s).augmented;
  };
}

std::vector<int> stratified_folds(const Dataset& d, int k, std::uint64_t seed, int run,
                                  std::vector<std::string>* warnings) {
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");
  std::vector<int> fold(d.size(), 0);
  std::size_t deal = 0;
  for (int c = 1; c <= d.num_classes(); ++c) {
    std::vector<std::size_t> rows = d.class_rows(c);
    if (rows.size() < static_cast<std::size_t>(k) && warnings) {
      warnings->push_back("class '" + d.class_name(c) + "' has " + std::to_string(rows.size()) + " samples, fewer than " +
                          std::to_string(k) + " folds; some test folds will not contain it");
    }
    Rng rng = derive_stream(seed, {0xf01dULL, static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(c)});
    for (std::size_t t = rows.size(); t > 1; --t) {
      const auto s = std::min<std::size_t>(t - 1, static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(t)));
      std::swap(rows[t - 1], rows[s]);
    }
    for (std::size_t r : rows) fold[r] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  }
  return fold;
}

namespace {

std::string_view row_bytes(std::span<const double> row) {
  return {reinterpret_cast<const char*>(row.data()), row.size_bytes()};
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

MetricsReport kfold_evaluate(const Dataset& d, const Oversampler& oversampler, const ClassifierFactory& classifier,
                             int k, int runs, std::uint64_t seed, int threads) {
  if (k < 2) throw std::invalid_argument("kfold_evaluate: k must be >= 2");
  if (runs < 1) throw std::invalid_argument("kfold_evaluate: runs must be >= 1");
  MetricsReport rep;
  rep.folds = k;
  rep.runs = runs;
  rep.seed = seed;
  rep.class_names = d.class_names();
  for (int c = 1; c <= d.num_classes(); ++c) {
    for (int j = 1; j <= d.num_classes(); ++j) {
      if (d.class_size(c) < d.class_size(j)) {
        rep.positive_classes.push_back(c);
        break;
      }
    }
  }
  if (rep.positive_classes.empty()) rep.positive_classes.push_back(1);

  std::unordered_set<std::string_view> factual_rows;
  for (std::size_t n = 0; n < d.size(); ++n) factual_rows.insert(row_bytes(d.row(n)));

  std::vector<std::vector<int>> assignments(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r)
    assignments[static_cast<std::size_t>(r)] = stratified_folds(d, k, seed, r, r == 0 ? &rep.warnings : nullptr);

  const std::size_t tasks = static_cast<std::size_t>(runs) * static_cast<std::size_t>(k);
  rep.fold_results.resize(tasks);
  std::vector<std::size_t> violations(tasks, 0);
  std::vector<std::size_t> checks(tasks, 0);
  parallel_for(tasks, threads, [&](std::size_t task) {
    const int run = static_cast<int>(task / static_cast<std::size_t>(k));
    const int fold = static_cast<int>(task % static_cast<std::size_t>(k));
    const auto& assign = assignments[static_cast<std::size_t>(run)];
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t n = 0; n < d.size(); ++n) (assign[n] == fold ? test_idx : train_idx).push_back(n);

    const Dataset train = d.subset(train_idx);
    const Dataset test = d.subset(test_idx);
    const std::uint64_t fold_seed = derive_stream(seed, {0xe7a1ULL, static_cast<std::uint64_t>(run),
                                                         static_cast<std::uint64_t>(fold)})();
    const Dataset augmented = oversampler(train, fold_seed);
    if (augmented.size() < train.size()) throw DataError("oversampler dropped training rows");
    const auto model = classifier(augmented);

    ConfusionMatrix cm(d.num_classes());
    for (std::size_t t = 0; t < test.size(); ++t) {
      ++checks[task];
      if (!factual_rows.contains(row_bytes(test.row(t))) ||
          std::memcmp(test.row(t).data(), d.row(test_idx[t]).data(), test.row(t).size_bytes()) != 0) {
        ++violations[task];
      }
      cm.add(test.label(t), model->predict(test.row(t)));
    }

    FoldResult& fr = rep.fold_results[task];
    fr.run = run;
    fr.fold = fold;
    fr.train_size = train.size();
    fr.augmented_size = augmented.size();
    fr.test_size = test.size();
    for (int c : rep.positive_classes) {
      fr.f_per_positive.push_back(f_measure(cm, c));
      fr.g_per_positive.push_back(g_mean(cm, c));
    }
    fr.f_measure = mean_of(fr.f_per_positive);
    fr.g_mean = mean_of(fr.g_per_positive);
    fr.correct_per_class = per_class_correct(cm);
  });

  std::vector<double> all_f, all_g, run_f(static_cast<std::size_t>(runs), 0.0), run_g(static_cast<std::size_t>(runs), 0.0);
  rep.mean_correct_per_class.assign(static_cast<std::size_t>(d.num_classes()), 0.0);
  for (std::size_t task = 0; task < tasks; ++task) {
    const auto& fr = rep.fold_results[task];
    all_f.push_back(fr.f_measure);
    all_g.push_back(fr.g_mean);
    run_f[static_cast<std::size_t>(fr.run)] += fr.f_measure / k;
    run_g[static_cast<std::size_t>(fr.run)] += fr.g_mean / k;
    for (std::size_t c = 0; c < fr.correct_per_class.size(); ++c)
      rep.mean_correct_per_class[c] += static_cast<double>(fr.correct_per_class[c]) / runs;
    rep.leakage_checks += checks[task];
    rep.leakage_violations += violations[task];
  }
  rep.f_measure = mean_of(all_f);
  rep.g_mean = mean_of(all_g);
  rep.f_std_folds = sample_std(all_f);
  rep.g_std_folds = sample_std(all_g);
  rep.f_std_runs = sample_std(run_f);
  rep.g_std_runs = sample_std(run_g);
  return rep;
}

Region classify_region(const LinearModel& model, std::span<const double> x, double tau) {
  const double s = score(model, x);
  if (s >= model.threshold) return Region::Majority;
  if (s >= model.threshold - tau) return Region::BoundaryMinority;
  return Region::InteriorMinority;
}

RegionCounts count_regions(const LinearModel& model, const Matrix& rows, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("region census: tau must be > 0");
  RegionCounts rc;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    switch (classify_region(model, rows.row(r), tau)) {
      case Region::Majority: ++rc.majority; break;
      case Region::BoundaryMinority: ++rc.boundary_minority; break;
      case Region::InteriorMinority: ++rc.interior_minority; break;
    }
  }
  return rc;
}

CensusReport region_census(const Dataset& factual, const Matrix& generated, const LinearModel& model, double tau) {
  CensusReport rep;
  rep.tau = tau;
  rep.generated = count_regions(model, generated, tau);
  Matrix original(0, 0);
  for (std::size_t n : factual.class_rows(model.pair.minority)) original.append_row(factual.row(n));
  rep.original = count_regions(model, original, tau);
  return rep;
}

}  // namespace cfo
