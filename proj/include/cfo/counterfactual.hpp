#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfo/classifier.hpp"
#include "cfo/dataset.hpp"
#include "cfo/numerics.hpp"

namespace cfo {

enum class PairPolicy {
  LargestMajority,  // each minority class against its largest strictly larger class
  AllPairs,         // every (i, j) with N_i < N_j
};

struct GenerationParams {
  /// Weight of the prediction term in the counterfactual loss. The search
  /// enforces the prediction flip as a hard constraint, so this is recorded
  /// but does not change the result.
  double lambda = 1.0;
  /// Distance budget. Unset means the 25th percentile of the pairwise MAD
  /// distances between the two classes.
  std::optional<double> epsilon;
  int trials = 50;
  std::uint64_t seed = 42;
  /// Desired N_i / N_j after augmentation.
  double target_ratio = 1.0;
  double boundary_tau = 0.15;
  /// Generate one counterfactual per majority row, ignoring target_ratio.
  bool exhaustive = false;
  PairPolicy pair_policy = PairPolicy::LargestMajority;
  double ridge_rho = kDefaultRidgeRho;
  int threads = 1;
  /// Keep every accepted candidate in the result (memory heavy).
  bool log_candidates = false;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct Candidate {
  std::vector<double> delta;  // dense, zero outside the perturbed features
  double distance = 0.0;
  int round = 0;   // number of leading ranked features perturbed (1-based)
  int trial = 0;   // 0-based trial index within the round
};

struct CandidateSet {
  std::size_t factual_index = 0;
  std::vector<Candidate> candidates;
};

struct CounterfactualSample {
  std::vector<double> values;
  std::size_t source_index = 0;
  double distance = 0.0;
  int label = 0;
  int round = 0;
};

/// Sum over features with MAD > 0 of |x_m - x'_m| / MAD_m.
double mad_distance(std::span<const double> x, std::span<const double> x_prime, const FeatureStats& stats);

/// Everything the per-sample search reads. All fields are shared read-only.
struct SearchContext {
  const FeatureRanking& ranking;
  const FeatureStats& stats;
  const LinearModel& model;
  double epsilon;
  int trials;
  std::uint64_t seed;
};

/// One round of the search: T trials, each drawing fresh truncated-normal
/// perturbations on the first m ranked features; a trial is kept when its
/// distance is below epsilon and the model predicts the minority class.
std::vector<Candidate> perturb_round(std::span<const double> x, int m, const SearchContext& ctx, Rng& rng);

/// The stream used for round m of sample n.
Rng round_stream(const SearchContext& ctx, std::size_t n, int m);

struct SampleOutcome {
  std::optional<CounterfactualSample> sample;
  std::vector<std::size_t> accepted_per_round;  // index m-1
  bool predicted_minority = false;               // factual row already on the minority side
  std::optional<CandidateSet> log;
};

/// Runs rounds m = 1..M over the union of their candidates and returns the
/// candidate with the smallest distance (ties: earlier round, then earlier
/// trial). Nothing is returned when the model does not place x on the
/// majority side or when every round is empty.
SampleOutcome generate_for_sample(std::span<const double> x, std::size_t n, const SearchContext& ctx,
                                  bool log_candidates = false);

/// 25th percentile (linear interpolation) of the MAD distances between all
/// minority and majority rows of the pair. Large pairs are subsampled with a
/// fixed stride.
double default_epsilon(const Dataset& d, ClassPair pair, const FeatureStats& stats);

struct DistanceSummary {
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

struct GenerationReport {
  ClassPair pair;
  std::string minority_name;
  std::string majority_name;
  std::size_t minority_before = 0;
  std::size_t majority_size = 0;
  std::size_t needed = 0;
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::size_t skipped_predicted_minority = 0;
  std::size_t no_candidate = 0;
  std::vector<std::size_t> accepted_per_round;
  std::vector<std::size_t> chosen_round_histogram;
  DistanceSummary distance;
  std::vector<std::size_t> distance_histogram;  // 10 equal bins over [0, epsilon)
  double epsilon = 0.0;
  std::string epsilon_source;
  std::vector<std::size_t> feature_order;
  std::vector<double> feature_rho;
  double elapsed_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct OversampleResult {
  Dataset augmented;
  std::vector<GenerationReport> reports;
  std::vector<LinearModel> models;
  std::vector<CounterfactualSample> samples;
  std::vector<CandidateSet> candidate_logs;  // filled when params.log_candidates
};

/// Counterfactual oversampling of one pair. The model, ranking and feature
/// statistics come from the factual data; majority rows are visited in row
/// order until the target is met (or all of them with `exhaustive`).
/// Generated rows are appended after the factual rows, which are unchanged.
OversampleResult oversample(const Dataset& d, ClassPair pair, const GenerationParams& params);

/// Applies `oversample` to every pair chosen by params.pair_policy in turn;
/// later pairs see the updated class counts.
OversampleResult oversample_all(const Dataset& d, const GenerationParams& params);

std::size_t needed_count(std::size_t minority, std::size_t majority, double target_ratio);

}  // namespace cfo
