#include "cfo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cfo/numerics.hpp"

namespace cfo {

std::string to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::RandomDuplication: return "random";
    case BaselineMethod::Smote: return "smote";
    case BaselineMethod::Adasyn: return "adasyn";
  }
  return "unknown";
}

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "random" || name == "random_dup") return BaselineMethod::RandomDuplication;
  if (name == "smote") return BaselineMethod::Smote;
  if (name == "adasyn") return BaselineMethod::Adasyn;
  throw std::invalid_argument("unknown baseline method '" + name + "'");
}

std::vector<double> interpolate(std::span<const double> x, std::span<const double> neighbour, double u) {
  if (x.size() != neighbour.size()) throw std::invalid_argument("interpolate: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x[k] + u * (neighbour[k] - x[k]);
    out[k] = std::clamp(v, std::min(x[k], neighbour[k]), std::max(x[k], neighbour[k]));
  }
  return out;
}

std::vector<std::size_t> largest_remainder(std::span<const double> weights, std::size_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  if (weights.empty() || !(sum > 0.0)) return out;
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double share = weights[k] / sum * static_cast<double>(total);
    out[k] = static_cast<std::size_t>(std::floor(share));
    frac[k] = share - static_cast<double>(out[k]);
    assigned += out[k];
  }
  std::vector<std::size_t> idx(weights.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t t = 0; assigned < total; ++t, ++assigned) ++out[idx[t % idx.size()]];
  return out;
}

std::vector<std::size_t> nearest_rows(const Matrix& x, std::span<const std::size_t> candidates,
                                      std::span<const double> query, int k, std::size_t exclude) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(candidates.size());
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    if (candidates[t] == exclude) continue;
    const auto r = x.row(candidates[t]);
    double s = 0.0;
    for (std::size_t c = 0; c < query.size(); ++c) s += (r[c] - query[c]) * (r[c] - query[c]);
    dist.emplace_back(s, t);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<std::size_t> out(kk);
  for (std::size_t t = 0; t < kk; ++t) out[t] = dist[t].second;
  return out;
}

namespace {

struct Pending {
  Matrix rows{0, 0};
  std::vector<int> labels;
  std::vector<std::string> provenance;

  void add(std::span<const double> row, int label, std::string prov) {
    rows.append_row(row);
    labels.push_back(label);
    provenance.push_back(std::move(prov));
  }
};

BaselineReport start_report(const Dataset& d, ClassPair pair, const BaselineSpec& spec, std::size_t minority_now) {
  if (spec.k_neighbors < 1) throw std::invalid_argument("k_neighbors must be positive");
  if (!(spec.target_ratio > 0.0 && spec.target_ratio <= 1.0))
    throw std::invalid_argument("target_ratio must be in (0, 1]");
  BaselineReport rep;
  rep.pair = pair;
  rep.minority_name = d.class_name(pair.minority);
  rep.majority_name = d.class_name(pair.majority);
  rep.minority_before = minority_now;
  rep.majority_size = d.class_size(pair.majority);
  rep.needed = needed_count(minority_now, rep.majority_size, spec.target_ratio);
  return rep;
}

Rng baseline_stream(const BaselineSpec& spec, ClassPair pair) {
  return derive_stream(spec.seed, {0xba5e11e5ULL, static_cast<std::uint64_t>(spec.method),
                                   static_cast<std::uint64_t>(pair.minority),
                                   static_cast<std::uint64_t>(pair.majority)});
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(n)));
}

void require_neighbours(const std::vector<std::size_t>& minority, const BaselineSpec& spec) {
  if (minority.size() <= static_cast<std::size_t>(spec.k_neighbors))
    throw DataError("too few minority samples (" + std::to_string(minority.size()) + ") for k_neighbors = " +
                    std::to_string(spec.k_neighbors));
}

// Each minority row's k nearest minority neighbours, as dataset row indices.
std::vector<std::vector<std::size_t>> minority_neighbours(const Dataset& d, const std::vector<std::size_t>& minority,
                                                          int k) {
  std::vector<std::vector<std::size_t>> out(minority.size());
  for (std::size_t t = 0; t < minority.size(); ++t) {
    for (std::size_t pos : nearest_rows(d.features(), minority, d.row(minority[t]), k, minority[t]))
      out[t].push_back(minority[pos]);
  }
  return out;
}

void run_random(const Dataset& d, ClassPair pair, const BaselineSpec& spec, BaselineReport& rep, Pending& out) {
  const auto& minority = d.class_rows(pair.minority);
  if (minority.empty()) throw DataError("random_oversample: empty minority class");
  Rng rng = baseline_stream(spec, pair);
  for (std::size_t s = 0; s < rep.needed; ++s) {
    const std::size_t donor = minority[uniform_index(rng, minority.size())];
    out.add(d.row(donor), pair.minority, "random:" + std::to_string(donor));
  }
  rep.appended = rep.needed;
}

void run_smote(const Dataset& d, ClassPair pair, const BaselineSpec& spec, BaselineReport& rep, Pending& out) {
  if (rep.needed == 0) return;
  const auto& minority = d.class_rows(pair.minority);
  require_neighbours(minority, spec);
  const auto neighbours = minority_neighbours(d, minority, spec.k_neighbors);
  Rng rng = baseline_stream(spec, pair);
  for (std::size_t s = 0; s < rep.needed; ++s) {
    const std::size_t t = uniform_index(rng, minority.size());
    const std::size_t nn = neighbours[t][uniform_index(rng, neighbours[t].size())];
    const double u = uniform_open(rng);
    out.add(interpolate(d.row(minority[t]), d.row(nn), u), pair.minority, "smote:" + std::to_string(minority[t]));
  }
  rep.appended = rep.needed;
}

void run_adasyn(const Dataset& d, ClassPair pair, const BaselineSpec& spec, BaselineReport& rep, Pending& out) {
  if (rep.needed == 0) return;
  const auto& minority = d.class_rows(pair.minority);
  require_neighbours(minority, spec);
  std::vector<std::size_t> everyone(d.size());
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  std::vector<double> hardness(minority.size());
  for (std::size_t t = 0; t < minority.size(); ++t) {
    const auto nn = nearest_rows(d.features(), everyone, d.row(minority[t]), spec.k_neighbors, minority[t]);
    std::size_t foreign = 0;
    for (std::size_t r : nn) foreign += d.label(r) != pair.minority ? 1 : 0;
    hardness[t] = static_cast<double>(foreign) / static_cast<double>(nn.size());
  }
  if (std::all_of(hardness.begin(), hardness.end(), [](double h) { return h == 0.0; })) {
    rep.warnings.push_back("adasyn: no minority sample has majority neighbours, using uniform quotas");
    std::fill(hardness.begin(), hardness.end(), 1.0);
  }
  rep.quotas = largest_remainder(hardness, rep.needed);
  const auto neighbours = minority_neighbours(d, minority, spec.k_neighbors);
  Rng rng = baseline_stream(spec, pair);
  for (std::size_t t = 0; t < minority.size(); ++t) {
    for (std::size_t q = 0; q < rep.quotas[t]; ++q) {
      const std::size_t nn = neighbours[t][uniform_index(rng, neighbours[t].size())];
      const double u = uniform_open(rng);
      out.add(interpolate(d.row(minority[t]), d.row(nn), u), pair.minority, "adasyn:" + std::to_string(minority[t]));
    }
  }
  rep.appended = rep.needed;
}

void run_method(const Dataset& d, ClassPair pair, const BaselineSpec& spec, BaselineReport& rep, Pending& out) {
  switch (spec.method) {
    case BaselineMethod::RandomDuplication: run_random(d, pair, spec, rep, out); break;
    case BaselineMethod::Smote: run_smote(d, pair, spec, rep, out); break;
    case BaselineMethod::Adasyn: run_adasyn(d, pair, spec, rep, out); break;
  }
}

BaselineResult single_pair(const Dataset& d, ClassPair pair, BaselineSpec spec, BaselineMethod method) {
  spec.method = method;
  auto rep = start_report(d, pair, spec, d.class_size(pair.minority));
  Pending pending;
  run_method(d, pair, spec, rep, pending);
  return {d.appended(pending.rows, pending.labels, pending.provenance), {std::move(rep)}};
}

}  // namespace

BaselineResult random_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec) {
  return single_pair(d, pair, spec, BaselineMethod::RandomDuplication);
}

BaselineResult smote_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec) {
  return single_pair(d, pair, spec, BaselineMethod::Smote);
}

BaselineResult adasyn_oversample(const Dataset& d, ClassPair pair, const BaselineSpec& spec) {
  return single_pair(d, pair, spec, BaselineMethod::Adasyn);
}

BaselineResult baseline_oversample(const Dataset& d, const BaselineSpec& spec) {
  const auto pairs = spec.pair_policy == PairPolicy::AllPairs ? class_pairs(d) : largest_majority_pairs(d);
  std::vector<std::size_t> counts(static_cast<std::size_t>(d.num_classes()) + 1, 0);
  for (int c = 1; c <= d.num_classes(); ++c) counts[static_cast<std::size_t>(c)] = d.class_size(c);
  Pending pending;
  std::vector<BaselineReport> reports;
  for (const auto& pair : pairs) {
    auto rep = start_report(d, pair, spec, counts[static_cast<std::size_t>(pair.minority)]);
    run_method(d, pair, spec, rep, pending);
    counts[static_cast<std::size_t>(pair.minority)] += rep.appended;
    reports.push_back(std::move(rep));
  }
  return {d.appended(pending.rows, pending.labels, pending.provenance), std::move(reports)};
}

}  // namespace cfo
