#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfo/counterfactual.hpp"
#include "cfo/dataset.hpp"

namespace cfo {

enum class BaselineMethod { RandomDuplication, Smote, Adasyn };

std::string to_string(BaselineMethod m);
/// Accepts "random", "smote", "adasyn".
BaselineMethod parse_baseline_method(const std::string& name);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::Smote;
  int k_neighbors = 5;
  std::uint64_t seed = 42;
  double target_ratio = 1.0;
  PairPolicy pair_policy = PairPolicy::LargestMajority;
};

struct BaselineReport {
  ClassPair pair;
  std::string minority_name;
  std::string majority_name;
  std::size_t minority_before = 0;
  std::size_t majority_size = 0;
  std::size_t needed = 0;
  std::size_t appended = 0;
  std::vector<std::size_t> quotas;  // ADASYN only, per minority row
  std::vector<std::string> warnings;
};

struct BaselineResult {
  Dataset augmented;
  std::vector<BaselineReport> reports;
};

BaselineResult random_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec);
BaselineResult smote_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec);
BaselineResult adasyn_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec);

/// Dispatches on spec.method over the pairs chosen by spec.pair_policy.
BaselineResult baseline_oversample(const Dataset& d, const BaselineSpec& spec);

/// x + u (neighbour - x), kept inside the segment's bounding box.
std::vector<double> interpolate(std::span<const double> x, std::span<const double> neighbour, double u);

/// Splits `total` proportionally to `weights` by the largest-remainder
/// method; equal remainders go to the lower index.
std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total);

/// Indices (into `candidates`) of the k rows nearest to `query` by Euclidean
/// distance, nearest first, ties by position. `exclude` is skipped.
std::vector<std::size_t> nearest_rows(const Matrix& x, std::span<const std::size_t> candidates,
                                      std::span<const double> query, int k,
                                      std::size_t exclude = static_cast<std::size_t>(-1));

}  // namespace cfo
