#include "cfo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cfo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return Rng(h);
}

double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k + 1;
    while (end < n && x[idx[end]] == x[idx[k]]) ++end;
    // positions k..end-1 hold ranks k+1..end
    const double avg = (static_cast<double>(k + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t t = k; t < end; ++t) ranks[idx[t]] = avg;
    k = end;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman_rho: need at least 2 observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    const double dx = rx[k] - mean;
    const double dy = ry[k] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

FeatureRanking rank_features(const Dataset& d, ClassPair pair) {
  std::vector<std::size_t> rows = d.class_rows(pair.minority);
  const auto& maj = d.class_rows(pair.majority);
  rows.insert(rows.end(), maj.begin(), maj.end());
  std::sort(rows.begin(), rows.end());

  std::vector<double> y(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) y[k] = d.label(rows[k]) == pair.majority ? 1.0 : 0.0;

  FeatureRanking out;
  out.rho.resize(d.num_features());
  std::vector<double> col(rows.size());
  for (std::size_t m = 0; m < d.num_features(); ++m) {
    for (std::size_t k = 0; k < rows.size(); ++k) col[k] = d.features()(rows[k], m);
    out.rho[m] = rows.size() >= 2 ? spearman_rho(col, y) : 0.0;
  }
  out.order.resize(d.num_features());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(out.rho[a]) > std::abs(out.rho[b]); });
  return out;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double phi_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

namespace {

// Lower-tail quantile for p in (0, 0.5]: rational approximation (Acklam)
// followed by one Halley step against erfc.
double lower_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = phi_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double phi_inv(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) throw std::domain_error("phi_inv: p outside [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p <= 0.5) return lower_quantile(p);
  return -lower_quantile(1.0 - p);
}

namespace {

void check_spec(const TruncSpec& s) {
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw std::invalid_argument("TruncSpec: sigma must be > 0");
  if (!(s.lower <= s.center && s.center <= s.upper))
    throw std::invalid_argument("TruncSpec: center must lie within [lower, upper]");
}

}  // namespace

double truncnorm_from_uniform(const TruncSpec& spec, double u) {
  check_spec(spec);
  if (spec.upper == spec.lower) return 0.0;
  const double a = (spec.lower - spec.center) / spec.sigma;
  const double b = (spec.upper - spec.center) / spec.sigma;
  const double phi_a = phi_cdf(a);
  const double q_b = phi_cdf(-b);
  double mass;
  if (b <= 0.0) {
    mass = phi_cdf(b) - phi_a;
  } else if (a >= 0.0) {
    mass = phi_cdf(-a) - q_b;
  } else {
    mass = 1.0 - phi_a - q_b;
  }
  if (!(mass > 0.0)) return 0.0;

  double z;
  const double p = phi_a + u * mass;
  if (p <= 0.5) {
    z = phi_inv(p);
  } else {
    z = -phi_inv(q_b + (1.0 - u) * mass);
  }
  z = std::clamp(z, a, b);

  const double value = std::clamp(spec.center + spec.sigma * z, spec.lower, spec.upper);
  double delta = value - spec.center;
  while (spec.center + delta > spec.upper) delta = std::nextafter(delta, 0.0);
  while (spec.center + delta < spec.lower) delta = std::nextafter(delta, 0.0);
  return delta;
}

double truncnorm_sample(const TruncSpec& spec, Rng& rng) {
  if (spec.upper == spec.lower) {
    check_spec(spec);
    return 0.0;
  }
  return truncnorm_from_uniform(spec, uniform_open(rng));
}

double truncnorm_cdf(const TruncSpec& spec, double delta) {
  check_spec(spec);
  const double lo = spec.lower - spec.center;
  const double hi = spec.upper - spec.center;
  if (delta < lo) return 0.0;
  if (delta >= hi) return 1.0;
  const double a = lo / spec.sigma;
  const double b = hi / spec.sigma;
  const double z = delta / spec.sigma;
  return (phi_cdf(z) - phi_cdf(a)) / (phi_cdf(b) - phi_cdf(a));
}

}  // namespace cfo
