#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "cfo/dataset.hpp"

namespace cfo {

using Rng = std::mt19937_64;

/// Seeds an independent stream from a global seed and a tuple of indices
/// (e.g. pair, sample, round). The mapping is fixed so that any run can be
/// replayed from its recorded seed.
Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Uniform draw on (0, 1).
double uniform_open(Rng& rng);

/// Ranks starting at 1; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson correlation of the average-tied ranks. Returns 0 when either
/// input is constant.
double spearman_rho(std::span<const double> x, std::span<const double> y);

struct FeatureRanking {
  std::vector<std::size_t> order;  // feature indices, most important first
  std::vector<double> rho;         // per feature, indexed by feature
};

/// Spearman coefficient of each feature against the pair's binary label,
/// restricted to the rows of the two classes. Sorted by |rho| descending,
/// ties by ascending feature index.
FeatureRanking rank_features(const Dataset& d, ClassPair pair);

double normal_pdf(double z);
/// Standard normal CDF.
double phi_cdf(double z);
/// Standard normal quantile for p in (0, 1); returns -inf/+inf at 0/1.
double phi_inv(double p);

/// Normal perturbation of a factual value, truncated to the observed range.
struct TruncSpec {
  double center = 0.0;
  double sigma = 1.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Draws a perturbation Δ with lower <= center + Δ <= upper, distributed as
/// N(0, sigma^2) truncated to [lower - center, upper - center]. Uses exact
/// inverse-transform sampling, evaluated in whichever tail keeps precision.
/// A degenerate range (upper == lower) yields 0 without consuming the stream.
double truncnorm_sample(const TruncSpec& spec, Rng& rng);

/// Same, driven by an explicit uniform u in [0, 1].
double truncnorm_from_uniform(const TruncSpec& spec, double u);

/// CDF of the perturbation distribution at Δ.
double truncnorm_cdf(const TruncSpec& spec, double delta);

}  // namespace cfo
