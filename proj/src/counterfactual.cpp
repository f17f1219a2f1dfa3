#include "cfo/counterfactual.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cfo/parallel.hpp"

namespace cfo {

void GenerationParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (epsilon && !(*epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (trials < 1) throw std::invalid_argument("trials must be a positive integer");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) throw std::invalid_argument("target_ratio must be in (0, 1]");
  if (!(boundary_tau > 0.0)) throw std::invalid_argument("boundary_tau must be > 0");
  if (ridge_rho < 0.0) throw std::invalid_argument("ridge_rho must be >= 0");
}

double mad_distance(std::span<const double> x, std::span<const double> x_prime, const FeatureStats& stats) {
  if (x.size() != x_prime.size() || x.size() != stats.size())
    throw std::invalid_argument("mad_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (stats.mad[m] > 0.0) d += std::abs(x[m] - x_prime[m]) / stats.mad[m];
  }
  return d;
}

Rng round_stream(const SearchContext& ctx, std::size_t n, int m) {
  return derive_stream(ctx.seed, {static_cast<std::uint64_t>(ctx.model.pair.minority),
                                  static_cast<std::uint64_t>(ctx.model.pair.majority), n,
                                  static_cast<std::uint64_t>(m)});
}

namespace {

// Runs the T trials of round m, calling on_accept(trial, x_prime, distance)
// for each trial that passes the distance and inversion checks.
template <class OnAccept>
void search_round(std::span<const double> x, int m, const SearchContext& ctx, Rng& rng,
                  std::vector<double>& x_prime, OnAccept&& on_accept) {
  const std::size_t width = x.size();
  if (m < 1 || static_cast<std::size_t>(m) > width) throw std::invalid_argument("perturb_round: m outside 1..M");
  const auto& stats = ctx.stats;
  for (int t = 0; t < ctx.trials; ++t) {
    std::copy(x.begin(), x.end(), x_prime.begin());
    for (int k = 0; k < m; ++k) {
      const std::size_t f = ctx.ranking.order[static_cast<std::size_t>(k)];
      if (!stats.perturbable(f)) continue;
      const TruncSpec spec{x[f], stats.stddev[f], stats.min[f], stats.max[f]};
      x_prime[f] = x[f] + truncnorm_sample(spec, rng);
    }
    const double d = mad_distance(x, x_prime, stats);
    if (d < ctx.epsilon && predict(ctx.model, x_prime) == ctx.model.pair.minority) on_accept(t, x_prime, d);
  }
}

std::vector<double> delta_of(std::span<const double> x, const std::vector<double>& x_prime) {
  std::vector<double> delta(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) delta[k] = x_prime[k] - x[k];
  return delta;
}

}  // namespace

std::vector<Candidate> perturb_round(std::span<const double> x, int m, const SearchContext& ctx, Rng& rng) {
  std::vector<Candidate> out;
  std::vector<double> x_prime(x.size());
  search_round(x, m, ctx, rng, x_prime, [&](int t, const std::vector<double>& xp, double d) {
    out.push_back({delta_of(x, xp), d, m, t});
  });
  return out;
}

SampleOutcome generate_for_sample(std::span<const double> x, std::size_t n, const SearchContext& ctx,
                                  bool log_candidates) {
  SampleOutcome out;
  const int rounds = static_cast<int>(x.size());
  out.accepted_per_round.assign(x.size(), 0);
  if (log_candidates) out.log = CandidateSet{n, {}};
  if (predict(ctx.model, x) != ctx.model.pair.majority) {
    out.predicted_minority = true;
    return out;
  }

  std::vector<double> x_prime(x.size());
  std::vector<double> best_values;
  double best_distance = 0.0;
  int best_round = 0;
  for (int m = 1; m <= rounds; ++m) {
    Rng rng = round_stream(ctx, n, m);
    search_round(x, m, ctx, rng, x_prime, [&](int t, const std::vector<double>& xp, double d) {
      ++out.accepted_per_round[static_cast<std::size_t>(m - 1)];
      if (out.log) out.log->candidates.push_back({delta_of(x, xp), d, m, t});
      if (best_values.empty() || d < best_distance) {
        best_values = xp;
        best_distance = d;
        best_round = m;
      }
    });
  }
  if (!best_values.empty()) {
    out.sample = CounterfactualSample{std::move(best_values), n, best_distance, ctx.model.pair.minority, best_round};
  }
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double default_epsilon(const Dataset& d, ClassPair pair, const FeatureStats& stats) {
  const auto& lo = d.class_rows(pair.minority);
  const auto& hi = d.class_rows(pair.majority);
  const std::size_t total = lo.size() * hi.size();
  if (total == 0) throw DataError("default_epsilon: empty class in pair");
  constexpr std::size_t kMaxPairs = 4'000'000;
  const std::size_t stride = (total + kMaxPairs - 1) / kMaxPairs;
  std::vector<double> dist;
  dist.reserve(total / stride + 1);
  for (std::size_t k = 0; k < total; k += stride) {
    dist.push_back(mad_distance(d.row(lo[k / hi.size()]), d.row(hi[k % hi.size()]), stats));
  }
  std::sort(dist.begin(), dist.end());
  const double eps = quantile_sorted(dist, 0.25);
  if (!(eps > 0.0)) throw DataError("default_epsilon: 25th percentile of pairwise distances is zero; pass epsilon");
  return eps;
}

std::size_t needed_count(std::size_t minority, std::size_t majority, double target_ratio) {
  const auto target = static_cast<std::size_t>(std::ceil(target_ratio * static_cast<double>(majority) - 1e-9));
  return target > minority ? target - minority : 0;
}

namespace {

struct PairRun {
  GenerationReport report;
  LinearModel model;
  std::vector<CounterfactualSample> samples;
  std::vector<CandidateSet> logs;
};

PairRun run_pair(const Dataset& factual, ClassPair pair, const GenerationParams& params, std::size_t minority_now) {
  const auto start = std::chrono::steady_clock::now();
  PairRun run;
  auto& rep = run.report;
  rep.pair = pair;
  rep.minority_name = factual.class_name(pair.minority);
  rep.majority_name = factual.class_name(pair.majority);
  rep.minority_before = minority_now;
  const auto& majority_rows = factual.class_rows(pair.majority);
  rep.majority_size = majority_rows.size();
  rep.needed = params.exhaustive ? majority_rows.size()
                                 : std::min(needed_count(minority_now, majority_rows.size(), params.target_ratio),
                                            majority_rows.size());
  const std::size_t width = factual.num_features();
  rep.accepted_per_round.assign(width, 0);
  rep.chosen_round_histogram.assign(width, 0);
  rep.distance_histogram.assign(10, 0);

  const FeatureStats stats = compute_feature_stats(factual);
  run.model = train_ridge(factual, pair, params.ridge_rho, &rep.warnings);
  const FeatureRanking ranking = rank_features(factual, pair);
  rep.feature_order = ranking.order;
  rep.feature_rho = ranking.rho;
  if (params.epsilon) {
    rep.epsilon = *params.epsilon;
    rep.epsilon_source = "user";
  } else {
    rep.epsilon = default_epsilon(factual, pair, stats);
    rep.epsilon_source = "pairwise_mad_distance_q25";
  }
  if (rep.needed == 0) {
    rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
  }

  const SearchContext ctx{ranking, stats, run.model, rep.epsilon, params.trials, params.seed};
  constexpr std::size_t kBlock = 256;
  std::vector<double> chosen;
  for (std::size_t begin = 0; begin < majority_rows.size() && run.samples.size() < rep.needed; begin += kBlock) {
    const std::size_t count = std::min(kBlock, majority_rows.size() - begin);
    std::vector<SampleOutcome> block(count);
    parallel_for(count, params.threads, [&](std::size_t k) {
      const std::size_t n = majority_rows[begin + k];
      block[k] = generate_for_sample(factual.row(n), n, ctx, params.log_candidates);
    });
    for (auto& outcome : block) {
      if (run.samples.size() >= rep.needed) break;
      ++rep.attempted;
      for (std::size_t m = 0; m < width; ++m) rep.accepted_per_round[m] += outcome.accepted_per_round[m];
      if (outcome.predicted_minority) ++rep.skipped_predicted_minority;
      if (outcome.log) run.logs.push_back(std::move(*outcome.log));
      if (!outcome.sample) {
        if (!outcome.predicted_minority) ++rep.no_candidate;
        continue;
      }
      ++rep.succeeded;
      ++rep.chosen_round_histogram[static_cast<std::size_t>(outcome.sample->round - 1)];
      const double d = outcome.sample->distance;
      const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(10.0 * d / rep.epsilon));
      ++rep.distance_histogram[bin];
      chosen.push_back(d);
      run.samples.push_back(std::move(*outcome.sample));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  if (!chosen.empty()) {
    rep.distance = {chosen.front(), quantile_sorted(chosen, 0.25), quantile_sorted(chosen, 0.5),
                    quantile_sorted(chosen, 0.75), chosen.back()};
  }
  if (rep.succeeded < rep.needed && !params.exhaustive) {
    rep.warnings.push_back("target not reached: " + std::to_string(rep.succeeded) + " of " +
                           std::to_string(rep.needed) + " counterfactuals found");
  }
  rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Dataset append_samples(const Dataset& d, const std::vector<CounterfactualSample>& samples) {
  Matrix rows(0, 0);
  std::vector<int> labels;
  std::vector<std::string> prov;
  for (const auto& s : samples) {
    rows.append_row(s.values);
    labels.push_back(s.label);
    prov.push_back("counterfactual:" + std::to_string(s.source_index));
  }
  return d.appended(rows, labels, prov);
}

}  // namespace

OversampleResult oversample(const Dataset& d, ClassPair pair, const GenerationParams& params) {
  params.validate();
  auto run = run_pair(d, pair, params, d.class_size(pair.minority));
  OversampleResult out{append_samples(d, run.samples), {std::move(run.report)}, {std::move(run.model)},
                       std::move(run.samples), std::move(run.logs)};
  return out;
}

OversampleResult oversample_all(const Dataset& d, const GenerationParams& params) {
  params.validate();
  const auto pairs = params.pair_policy == PairPolicy::AllPairs ? class_pairs(d) : largest_majority_pairs(d);
  std::vector<std::size_t> counts(static_cast<std::size_t>(d.num_classes()) + 1, 0);
  for (int c = 1; c <= d.num_classes(); ++c) counts[static_cast<std::size_t>(c)] = d.class_size(c);
  OversampleResult out{d, {}, {}, {}, {}};
  for (const auto& pair : pairs) {
    auto run = run_pair(d, pair, params, counts[static_cast<std::size_t>(pair.minority)]);
    counts[static_cast<std::size_t>(pair.minority)] += run.samples.size();
    out.reports.push_back(std::move(run.report));
    out.models.push_back(std::move(run.model));
    out.samples.insert(out.samples.end(), std::make_move_iterator(run.samples.begin()),
                       std::make_move_iterator(run.samples.end()));
    out.candidate_logs.insert(out.candidate_logs.end(), std::make_move_iterator(run.logs.begin()),
                              std::make_move_iterator(run.logs.end()));
  }
  out.augmented = append_samples(d, out.samples);
  return out;
}

}  // namespace cfo
