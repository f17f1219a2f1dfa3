#pragma once

#include <array>
#include <cstdint>

#include "cfo/dataset.hpp"

namespace cfo {

/// Two Gaussian clusters in the plane plus minority-labelled noise points
/// planted inside the majority cluster.
struct SynthSpec {
  std::size_t n_total = 1000;
  std::size_t n_minority = 83;
  std::size_t n_noise = 4;
  std::array<double, 2> majority_center{0.0, 0.0};
  std::array<double, 2> minority_center{4.0, 4.0};
  double spread = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Class id 1 is "minority", id 2 is "majority"; rows are shuffled.
Dataset make_synthetic(const SynthSpec& spec);

}  // namespace cfo
