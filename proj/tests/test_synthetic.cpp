#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cfo/synthetic.hpp"

namespace cfo {
namespace {

std::string as_csv(const Dataset& d) {
  std::ostringstream out;
  write_csv(out, d);
  return out.str();
}

TEST(Synthetic, DefaultClassSizes) {
  const auto d = make_synthetic({});
  EXPECT_EQ(d.size(), 1000u);
  EXPECT_EQ(d.class_size(1), 83u);
  EXPECT_EQ(d.class_size(2), 917u);
  EXPECT_EQ(d.class_name(1), "minority");
  EXPECT_EQ(d.num_features(), 2u);
  EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"x1", "x2"}));
}

TEST(Synthetic, SameSeedSameCsv) {
  EXPECT_EQ(as_csv(make_synthetic({})), as_csv(make_synthetic({})));
  SynthSpec other;
  other.seed = 43;
  EXPECT_NE(as_csv(make_synthetic({})), as_csv(make_synthetic(other)));
}

TEST(Synthetic, WellSeparatedMinorityNearItsCenter) {
  SynthSpec s;
  s.n_noise = 0;
  s.minority_center = {6.0, 0.0};
  // Per point the probability is Phi(3) = 0.99865; pool 20 seeds so the
  // empirical rate is measured to about +-0.001.
  std::size_t nearer = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    s.seed = seed;
    const auto d = make_synthetic(s);
    total += d.class_size(1);
    for (auto n : d.class_rows(1)) {
      const auto x = d.row(n);
      // Identity covariance scaled by spread^2, so Mahalanobis is Euclidean / spread.
      const double to_min = std::hypot(x[0] - 6.0, x[1]) / s.spread;
      const double to_maj = std::hypot(x[0], x[1]) / s.spread;
      nearer += to_min < to_maj;
    }
  }
  EXPECT_GE(static_cast<double>(nearer) / static_cast<double>(total), 0.99);
}

TEST(Synthetic, ClusterMeansNearCenters) {
  SynthSpec s;
  s.n_noise = 0;
  s.spread = 1.5;
  const auto d = make_synthetic(s);
  for (int c = 1; c <= 2; ++c) {
    const auto& center = c == 1 ? s.minority_center : s.majority_center;
    const double n = static_cast<double>(d.class_size(c));
    for (int k = 0; k < 2; ++k) {
      double mean = 0.0;
      for (auto r : d.class_rows(c)) mean += d.row(r)[k] / n;
      EXPECT_LT(std::abs(mean - center[k]), 4.0 * s.spread / std::sqrt(n));
    }
  }
}

TEST(Synthetic, NoisePointsSitInMajorityCluster) {
  SynthSpec s;
  s.n_noise = 10;
  s.minority_center = {20.0, 20.0};
  const auto d = make_synthetic(s);
  std::size_t near_majority = 0;
  for (auto n : d.class_rows(1)) near_majority += std::hypot(d.row(n)[0], d.row(n)[1]) < 5.0;
  EXPECT_EQ(near_majority, 10u);
}

TEST(Synthetic, InvalidSpecs) {
  SynthSpec s;
  s.n_noise = 100;
  EXPECT_THROW(make_synthetic(s), std::invalid_argument);
  s = {};
  s.n_minority = 1000;
  EXPECT_THROW(make_synthetic(s), std::invalid_argument);
  s = {};
  s.spread = 0.0;
  EXPECT_THROW(make_synthetic(s), std::invalid_argument);
}

}  // namespace
}  // namespace cfo
