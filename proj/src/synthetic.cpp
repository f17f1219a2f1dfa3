#include "cfo/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cfo/numerics.hpp"

namespace cfo {

void SynthSpec::validate() const {
  if (!(n_noise <= n_minority && n_minority < n_total)) throw std::invalid_argument("synth: need n_noise <= n_minority < n_total");
  if (n_minority < 1) throw std::invalid_argument("synth: need at least one minority sample");
  if (!(spread > 0.0)) throw std::invalid_argument("synth: spread must be > 0");
}

Dataset make_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng = derive_stream(spec.seed, {0x5e7ULL});
  std::normal_distribution<double> unit(0.0, 1.0);

  struct Point {
    double x, y;
    int label;
  };
  std::vector<Point> points;
  points.reserve(spec.n_total);
  auto draw = [&](const std::array<double, 2>& c, double s, int label, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      const double dx = unit(rng);
      const double dy = unit(rng);
      points.push_back({c[0] + s * dx, c[1] + s * dy, label});
    }
  };
  draw(spec.majority_center, spec.spread, 2, spec.n_total - spec.n_minority);
  draw(spec.minority_center, spec.spread, 1, spec.n_minority - spec.n_noise);
  draw(spec.majority_center, spec.spread / 2.0, 1, spec.n_noise);

  for (std::size_t t = points.size(); t > 1; --t) {
    const auto s = std::min<std::size_t>(t - 1, static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(t)));
    std::swap(points[t - 1], points[s]);
  }

  Matrix x(0, 2);
  std::vector<int> labels;
  for (const auto& p : points) {
    const double row[2] = {p.x, p.y};
    x.append_row(row);
    labels.push_back(p.label);
  }
  return Dataset(std::move(x), std::move(labels), {"minority", "majority"}, {"x1", "x2"});
}

}  // namespace cfo
