// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cfo/baselines.hpp"
#include "cfo/counterfactual.hpp"
#include "cfo/evaluation.hpp"
#include "cfo/synthetic.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

namespace {

using namespace cfo;
using Clock = std::chrono::steady_clock;

namespace limits {
constexpr double kCensusSeconds = 60.0;
constexpr double kCensusTau = 0.15;
constexpr std::size_t kHardConstraintSamples = 100'000;
constexpr std::size_t kMinimalitySamples = 1000;
constexpr int kKsSpecs = 20;
constexpr int kKsRequired = 18;
constexpr std::size_t kKsDraws = 10'000;
constexpr std::size_t kSupportDraws = 1'000'000;
constexpr int kMetricCases = 1000;
constexpr double kMetricTolerance = 1e-12;
constexpr double kGMeanExample = 0.8485;
constexpr double kGMeanExampleTolerance = 1e-4;
constexpr double kWbcGMeanFloor = 0.90;
constexpr double kWbcBaselineSlack = 0.01;
constexpr double kWbcSeconds = 300.0;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTolerance = 0.3;
}  // namespace limits

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int worker_threads() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

double boundary_fraction(const RegionCounts& r) {
  return r.total() ? static_cast<double>(r.boundary_minority) / static_cast<double>(r.total()) : 0.0;
}

Matrix appended_minority_rows(const Dataset& factual, const Dataset& augmented, int minority) {
  Matrix rows(0, factual.num_features());
  for (std::size_t n = factual.size(); n < augmented.size(); ++n)
    if (augmented.label(n) == minority) rows.append_row(augmented.row(n));
  return rows;
}

Outcome region_census_ordering() {
  const auto start = Clock::now();
  const Dataset d = make_synthetic({});
  const auto ours = oversample(d, {1, 2}, GenerationParams{});
  const auto& model = ours.models.front();
  BaselineSpec spec;
  spec.method = BaselineMethod::Smote;
  const auto smote = baseline_oversample(d, spec);
  spec.method = BaselineMethod::Adasyn;
  const auto adasyn = baseline_oversample(d, spec);
  const double tau = limits::kCensusTau;
  const auto c_ours = region_census(d, appended_minority_rows(d, ours.augmented, 1), model, tau).generated;
  const auto c_smote = region_census(d, appended_minority_rows(d, smote.augmented, 1), model, tau).generated;
  const auto c_adasyn = region_census(d, appended_minority_rows(d, adasyn.augmented, 1), model, tau).generated;
  const double elapsed = seconds_since(start);
  const double b_ours = boundary_fraction(c_ours), b_smote = boundary_fraction(c_smote),
               b_adasyn = boundary_fraction(c_adasyn);
  const bool pass = c_ours.total() > 0 && c_ours.majority == 0 && b_ours > b_smote && b_ours > b_adasyn &&
                    elapsed < limits::kCensusSeconds;
  return {pass, fmt("ours majority=%zu boundary=%.1f%% (n=%zu); smote boundary=%.1f%%; adasyn boundary=%.1f%%; "
                    "tau=%.2f; %.1f s",
                    c_ours.majority, 100 * b_ours, c_ours.total(), 100 * b_smote, 100 * b_adasyn, tau, elapsed)};
}

// Random multi-cluster datasets with mixed scales, integer-valued columns and
// occasional constant columns.
Dataset fuzz_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 6), classes(2, 3), rows(80, 400);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = width(rng), c = classes(rng), n = rows(rng);
  std::vector<double> scale(m), shift(m);
  std::vector<int> kind(m);  // 0 real, 1 integer, 2 constant
  for (int k = 0; k < m; ++k) {
    scale[k] = std::pow(10.0, 3.0 * u(rng) - 1.5);
    shift[k] = 10.0 * nd(rng);
    const double r = u(rng);
    kind[k] = r < 0.7 ? 0 : (r < 0.92 ? 1 : 2);
  }
  std::vector<std::vector<double>> centers(c, std::vector<double>(m));
  for (auto& ctr : centers)
    for (auto& v : ctr) v = 2.5 * nd(rng);
  std::vector<double> weight(c);
  for (auto& w : weight) w = 0.1 + u(rng);
  std::discrete_distribution<int> pick(weight.begin(), weight.end());

  Matrix x(0, static_cast<std::size_t>(m));
  std::vector<int> labels;
  std::vector<double> row(m);
  for (int r = 0; r < n; ++r) {
    const int cls = r < 2 * c ? r % c : pick(rng);
    for (int k = 0; k < m; ++k) {
      double v = shift[k] + scale[k] * (centers[cls][k] + nd(rng));
      if (kind[k] == 1) v = std::round(v / scale[k]);
      if (kind[k] == 2) v = shift[k];
      row[k] = v;
    }
    x.append_row(row);
    labels.push_back(cls + 1);
  }
  // Relabel by size so ids follow the loader convention.
  std::vector<std::size_t> size(c, 0);
  for (int l : labels) ++size[l - 1];
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size[a] < size[b]; });
  std::vector<int> remap(c);
  for (int k = 0; k < c; ++k) remap[order[k]] = k + 1;
  for (int& l : labels) l = remap[l - 1];
  std::vector<std::string> names;
  for (int k = 1; k <= c; ++k) names.push_back("c" + std::to_string(k));
  return Dataset(std::move(x), std::move(labels), std::move(names), {});
}

GenerationParams fuzz_params(std::mt19937_64& rng, std::uint64_t seed) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GenerationParams p;
  p.seed = seed;
  p.exhaustive = u(rng) < 0.5;
  p.trials = 10 + static_cast<int>(rng() % 60);
  if (u(rng) < 0.4) p.epsilon = 0.5 + 20.0 * u(rng);
  p.pair_policy = u(rng) < 0.3 ? PairPolicy::AllPairs : PairPolicy::LargestMajority;
  p.ridge_rho = u(rng) < 0.2 ? 0.0 : std::pow(10.0, -4.0 * u(rng));
  p.threads = worker_threads();
  return p;
}

Outcome hard_constraints() {
  std::mt19937_64 rng(20240611);
  std::size_t checked = 0, violations = 0, datasets = 0;
  while (checked < limits::kHardConstraintSamples) {
    const Dataset d = fuzz_dataset(rng);
    auto p = fuzz_params(rng, rng());
    OversampleResult r{d, {}, {}, {}, {}};
    try {
      r = oversample_all(d, p);
    } catch (const DataError&) {
      continue;  // e.g. zero adaptive epsilon on degenerate data
    }
    ++datasets;
    const auto stats = compute_feature_stats(d);
    std::size_t next = 0;
    for (std::size_t q = 0; q < r.reports.size(); ++q) {
      const auto& rep = r.reports[q];
      const auto& model = r.models[q];
      for (std::size_t s = 0; s < rep.succeeded; ++s, ++next) {
        const auto& cf = r.samples[next];
        const auto row = r.augmented.row(d.size() + next);
        bool ok = predict(model, row) == model.pair.minority && r.augmented.label(d.size() + next) == rep.pair.minority;
        ok = ok && mad_distance(row, d.row(cf.source_index), stats) < rep.epsilon;
        for (std::size_t m = 0; m < d.num_features(); ++m) ok = ok && row[m] >= stats.min[m] && row[m] <= stats.max[m];
        ok = ok && d.label(cf.source_index) == rep.pair.majority;
        violations += !ok;
        ++checked;
      }
    }
    if (next != r.samples.size()) ++violations;
  }
  return {violations == 0, fmt("%zu generated samples over %zu fuzzed datasets; violations=%zu", checked, datasets,
                               violations)};
}

Outcome minimal_inversion() {
  std::mt19937_64 rng(777);
  std::size_t checked = 0, violations = 0, candidates = 0;
  while (checked < limits::kMinimalitySamples) {
    const Dataset d = fuzz_dataset(rng);
    auto p = fuzz_params(rng, rng());
    p.log_candidates = true;
    OversampleResult r{d, {}, {}, {}, {}};
    try {
      r = oversample_all(d, p);
    } catch (const DataError&) {
      continue;
    }
    // Each pair contributes `attempted` logs and `succeeded` samples, both in
    // visiting order; match by source row within the pair's segment.
    std::size_t log_begin = 0, sample_at = 0;
    for (const auto& rep : r.reports) {
      std::size_t log_at = log_begin;
      const std::size_t log_end = log_begin + rep.attempted;
      for (std::size_t s = 0; s < rep.succeeded && checked < limits::kMinimalitySamples; ++s) {
        const auto& cf = r.samples[sample_at + s];
        while (log_at < log_end && r.candidate_logs[log_at].factual_index != cf.source_index) ++log_at;
        if (log_at == log_end) {
          ++violations;
          break;
        }
        const auto& log = r.candidate_logs[log_at++];
        double best = INFINITY;
        for (const auto& c : log.candidates) best = std::min(best, c.distance);
        candidates += log.candidates.size();
        violations += cf.distance != best;
        ++checked;
      }
      log_begin = log_end;
      sample_at += rep.succeeded;
    }
  }
  return {violations == 0,
          fmt("%zu generations, %zu logged candidates; non-minimal=%zu", checked, candidates, violations)};
}

Outcome sampler_correctness() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_spec = [&] {
    const double sigma = std::pow(10.0, 4.0 * u(rng) - 2.0);
    const double lower = -sigma * 6.0 * u(rng) * u(rng);
    const double upper = sigma * 6.0 * u(rng) * u(rng) + 1e-3 * sigma;
    const double shift = 100.0 * (u(rng) - 0.5);
    return TruncSpec{shift, sigma, shift + lower, shift + upper};
  };
  int below = 0;
  double worst_ratio = 0.0;
  const double critical = oracle::ks_critical_1pct(limits::kKsDraws);
  for (int s = 0; s < limits::kKsSpecs; ++s) {
    const TruncSpec spec = random_spec();
    Rng stream = derive_stream(99, {static_cast<std::uint64_t>(s)});
    std::vector<double> draws(limits::kKsDraws);
    for (auto& v : draws) v = truncnorm_sample(spec, stream);
    const double lo = spec.lower - spec.center, hi = spec.upper - spec.center;
    const double ks = oracle::ks_statistic(draws, [&](double t) { return oracle::truncated_cdf(spec.sigma, lo, hi, t); });
    below += ks < critical;
    worst_ratio = std::max(worst_ratio, ks / critical);
  }
  std::size_t violations = 0;
  Rng stream(5);
  TruncSpec spec = random_spec();
  for (std::size_t k = 0; k < limits::kSupportDraws; ++k) {
    if (k % 1000 == 0) {
      spec = random_spec();
      // Every tenth spec pins the center to a bound, the hardest case for rounding.
      if (k % 10000 == 0) spec.center = (k / 10000) % 2 ? spec.lower : spec.upper;
    }
    const double v = spec.center + truncnorm_sample(spec, stream);
    violations += !(v >= spec.lower && v <= spec.upper);
  }
  return {below >= limits::kKsRequired && violations == 0,
          fmt("KS below 1%% critical value in %d/%d specs (worst KS/critical %.2f); support violations=%zu over "
              "%zu draws",
              below, limits::kKsSpecs, worst_ratio, violations, limits::kSupportDraws)};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int t = 0; t < limits::kMetricCases; ++t) {
    const int classes = 2 + static_cast<int>(rng() % 5);
    ConfusionMatrix cm(classes);
    std::vector<int> truth, pred;
    for (int a = 1; a <= classes; ++a)
      for (int b = 1; b <= classes; ++b) {
        // Sparse counts so zero rows and columns occur.
        const std::size_t n = rng() % 4 == 0 ? 0 : rng() % 40;
        cm.add(a, b, n);
        truth.insert(truth.end(), n, a);
        pred.insert(pred.end(), n, b);
      }
    for (int c = 1; c <= classes; ++c) {
      worst = std::max(worst, std::abs(f_measure(cm, c) - oracle::f_from_lists(truth, pred, c)));
      worst = std::max(worst, std::abs(g_mean(cm, c) - oracle::g_from_lists(truth, pred, c)));
    }
  }
  ConfusionMatrix example(2);
  example.add(1, 1, 9);
  example.add(1, 2, 1);
  example.add(2, 1, 2);
  example.add(2, 2, 8);
  const double g = g_mean(example, 1);
  const bool pass = worst <= limits::kMetricTolerance &&
                    std::abs(g - limits::kGMeanExample) <= limits::kGMeanExampleTolerance;
  return {pass, fmt("max |diff| over %d fuzzed matrices = %.3g; g_mean(TPR 0.9, TNR 0.8) = %.6f",
                    limits::kMetricCases, worst, g)};
}

struct LeakageTally {
  std::size_t runs = 0, checks = 0, violations = 0;
  void add(const MetricsReport& r) {
    ++runs;
    checks += r.leakage_checks;
    violations += r.leakage_violations;
  }
};

LeakageTally leakage;

Outcome wbc_end_to_end() {
  const auto start = Clock::now();
  const auto loaded = load_csv(CFO_DATA_DIR "/wbc.csv", "class");
  const auto& d = loaded.data;
  const auto none = kfold_evaluate(d, identity_oversampler(), knn_classifier(5), 10, 1, 42, worker_threads());
  const auto ours =
      kfold_evaluate(d, counterfactual_oversampler(GenerationParams{}), knn_classifier(5), 10, 1, 42, worker_threads());
  leakage.add(none);
  leakage.add(ours);
  const double elapsed = seconds_since(start);
  const double ratio = static_cast<double>(d.class_size(2)) / static_cast<double>(d.class_size(1));
  const bool pass = loaded.report.rows_read == 699 && ours.g_mean >= limits::kWbcGMeanFloor &&
                    ours.g_mean >= none.g_mean - limits::kWbcBaselineSlack && elapsed < limits::kWbcSeconds;
  return {pass, fmt("%zu rows read (%zu kept, ratio %.2f:1); 10-fold kNN(5) G-Mean %.4f (+-%.4f) vs none %.4f; "
                    "%.1f s",
                    loaded.report.rows_read, d.size(), ratio, ours.g_mean, ours.g_std_folds, none.g_mean, elapsed)};
}

Dataset gaussian_pair(std::size_t minority, std::size_t majority, std::size_t features) {
  Rng rng = derive_stream(7, {features});
  std::normal_distribution<double> nd;
  Matrix x(0, features);
  std::vector<int> labels;
  std::vector<double> row(features);
  for (std::size_t n = 0; n < minority + majority; ++n) {
    const bool is_min = n < minority;
    for (auto& v : row) v = nd(rng) + (is_min ? 3.0 / std::sqrt(static_cast<double>(features)) : 0.0);
    x.append_row(row);
    labels.push_back(is_min ? 1 : 2);
  }
  return Dataset(std::move(x), std::move(labels), {"min", "maj"}, {});
}

Outcome complexity_exponent() {
  const std::vector<std::size_t> widths{4, 8, 16};
  std::vector<double> lx, ly;
  std::string times;
  for (std::size_t m : widths) {
    const Dataset d = gaussian_pair(100, 600, m);
    GenerationParams p;
    p.exhaustive = true;
    p.trials = 50;
    p.epsilon = 1e9;
    p.threads = 1;
    double best = INFINITY;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = Clock::now();
      const auto r = oversample(d, {1, 2}, p);
      best = std::min(best, seconds_since(start));
      if (r.reports[0].attempted != 600) return {false, "sweep did not visit every majority row"};
    }
    lx.push_back(std::log(static_cast<double>(m)));
    ly.push_back(std::log(best));
    times += fmt("%sM=%zu %.3fs", times.empty() ? "" : ", ", m, best);
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0, my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double slope = sxy / sxx;
  return {std::abs(slope - limits::kSlopeTarget) <= limits::kSlopeTolerance,
          fmt("log-log slope %.3f (N=600 majority rows, T=50; %s)", slope, times.c_str())};
}

Outcome determinism() {
  const auto a1 = testing::run_experiment_one("cfo_acc_det_a", 1);
  const auto a2 = testing::run_experiment_one("cfo_acc_det_b", 1);
  const auto b1 = testing::run_experiment_one("cfo_acc_det_c", 8);
  const auto b2 = testing::run_experiment_one("cfo_acc_det_d", 8);
  std::size_t bytes = 0, files = 0;
  for (const auto& [name, content] : a1) {
    if (name.ends_with(".csv") || name.ends_with(".json")) {
      ++files;
      bytes += content.size();
    }
  }
  const bool pass = a1 == a2 && b1 == b2 && a1 == b1 && files >= 8;
  return {pass, fmt("%zu CSV/JSON files (%zu bytes) identical across 2 runs x {1, 8} threads: %s", files, bytes,
                    pass ? "yes" : "no")};
}

Outcome leakage_guard() {
  // Extra runs across methods and datasets on top of the WBC evaluations.
  const Dataset syn = make_synthetic({});
  const auto wbc = load_csv(CFO_DATA_DIR "/wbc.csv", "class").data;
  GenerationParams p;
  p.threads = 1;
  std::vector<Oversampler> samplers{identity_oversampler(), counterfactual_oversampler(p)};
  for (auto m : {BaselineMethod::RandomDuplication, BaselineMethod::Smote, BaselineMethod::Adasyn}) {
    BaselineSpec s;
    s.method = m;
    samplers.push_back(baseline_oversampler(s));
  }
  for (const auto& sampler : samplers)
    for (const Dataset* d : {&syn, &wbc}) leakage.add(kfold_evaluate(*d, sampler, knn_classifier(5), 5, 2, 11, worker_threads()));
  return {leakage.checks > 0 && leakage.violations == 0,
          fmt("%zu kfold_evaluate runs, %zu test rows checked; violations=%zu", leakage.runs, leakage.checks,
              leakage.violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"region census ordering", region_census_ordering},
      {"hard constraints", hard_constraints},
      {"minimal inversion", minimal_inversion},
      {"truncated-normal sampler", sampler_correctness},
      {"metric oracles", metric_oracles},
      {"WBC end-to-end", wbc_end_to_end},
      {"complexity exponent", complexity_exponent},
      {"determinism", determinism},
      {"leakage guard", leakage_guard},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s: %zu/%zu criteria passed\n", failed ? "FAIL" : "PASS", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
