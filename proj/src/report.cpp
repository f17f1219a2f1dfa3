#include "cfo/report.hpp"

#include <fstream>
#include <ostream>

namespace cfo {

namespace {

Json pair_json(ClassPair p, const std::string& minority, const std::string& majority) {
  return Json{{"minority", {{"id", p.minority}, {"name", minority}}},
              {"majority", {{"id", p.majority}, {"name", majority}}}};
}

std::string policy_name(PairPolicy p) {
  return p == PairPolicy::AllPairs ? "all_pairs" : "largest_majority";
}

}  // namespace

Json to_json(const IngestionReport& r) {
  Json classes = Json::array();
  for (std::size_t k = 0; k < r.classes.size(); ++k) {
    classes.push_back({{"id", k + 1}, {"label", r.classes[k].first}, {"size", r.classes[k].second}});
  }
  return Json{{"source", r.source},
              {"rows_read", r.rows_read},
              {"rows_dropped", r.rows_dropped},
              {"rows_kept", r.rows_read - r.rows_dropped},
              {"classes", classes},
              {"warnings", r.warnings}};
}

Json to_json(const FeatureStats& s, const std::vector<std::string>& feature_names) {
  Json out = Json::array();
  for (std::size_t m = 0; m < s.size(); ++m) {
    out.push_back({{"feature", feature_names.at(m)},
                   {"min", s.min[m]},
                   {"max", s.max[m]},
                   {"std", s.stddev[m]},
                   {"median", s.median[m]},
                   {"mad", s.mad[m]},
                   {"perturbable", s.perturbable(m)}});
  }
  return out;
}

Json to_json(const GenerationParams& p) {
  return Json{{"lambda", p.lambda},
              {"lambda_role", "recorded only; inversion is a hard constraint"},
              {"epsilon", p.epsilon ? Json(*p.epsilon) : Json("adaptive")},
              {"trials", p.trials},
              {"seed", p.seed},
              {"target_ratio", p.target_ratio},
              {"boundary_tau", p.boundary_tau},
              {"exhaustive", p.exhaustive},
              {"pair_policy", policy_name(p.pair_policy)},
              {"ridge_rho", p.ridge_rho},
              {"rng_streams", "mt19937_64 per (seed, minority, majority, row, round), splitmix64-derived"}};
}

Json to_json(const GenerationReport& r, bool include_timing) {
  Json j{{"pair", pair_json(r.pair, r.minority_name, r.majority_name)},
         {"minority_before", r.minority_before},
         {"majority_size", r.majority_size},
         {"needed", r.needed},
         {"attempted", r.attempted},
         {"succeeded", r.succeeded},
         {"skipped_predicted_minority", r.skipped_predicted_minority},
         {"no_candidate", r.no_candidate},
         {"epsilon", r.epsilon},
         {"epsilon_source", r.epsilon_source},
         {"feature_order", r.feature_order},
         {"feature_rho", r.feature_rho},
         {"accepted_per_round", r.accepted_per_round},
         {"chosen_round_histogram", r.chosen_round_histogram},
         {"distance_quantiles",
          {{"min", r.distance.min}, {"q25", r.distance.q25}, {"median", r.distance.median},
           {"q75", r.distance.q75}, {"max", r.distance.max}}},
         {"distance_histogram", {{"range", {0.0, r.epsilon}}, {"counts", r.distance_histogram}}},
         {"warnings", r.warnings}};
  if (include_timing) j["elapsed_seconds"] = r.elapsed_seconds;
  return j;
}

Json to_json(const BaselineSpec& s) {
  return Json{{"method", to_string(s.method)},
              {"k_neighbors", s.k_neighbors},
              {"seed", s.seed},
              {"target_ratio", s.target_ratio},
              {"pair_policy", policy_name(s.pair_policy)}};
}

Json to_json(const BaselineReport& r) {
  Json j{{"pair", pair_json(r.pair, r.minority_name, r.majority_name)},
         {"minority_before", r.minority_before},
         {"majority_size", r.majority_size},
         {"needed", r.needed},
         {"appended", r.appended},
         {"warnings", r.warnings}};
  if (!r.quotas.empty()) j["quotas"] = r.quotas;
  return j;
}

Json to_json(const MetricsReport& r) {
  Json positives = Json::array();
  for (int c : r.positive_classes) positives.push_back({{"id", c}, {"name", r.class_names.at(static_cast<std::size_t>(c - 1))}});
  Json folds = Json::array();
  for (const auto& f : r.fold_results) {
    folds.push_back({{"run", f.run},
                     {"fold", f.fold},
                     {"train_size", f.train_size},
                     {"augmented_size", f.augmented_size},
                     {"test_size", f.test_size},
                     {"f_measure", f.f_measure},
                     {"g_mean", f.g_mean},
                     {"f_per_positive", f.f_per_positive},
                     {"g_per_positive", f.g_per_positive},
                     {"correct_per_class", f.correct_per_class}});
  }
  return Json{{"folds", r.folds},
              {"runs", r.runs},
              {"seed", r.seed},
              {"classes", r.class_names},
              {"positive_classes", positives},
              {"averaging", "macro over positive (minority) classes, one-vs-rest"},
              {"f_measure", {{"mean", r.f_measure}, {"std_over_folds", r.f_std_folds}, {"std_over_runs", r.f_std_runs}}},
              {"g_mean", {{"mean", r.g_mean}, {"std_over_folds", r.g_std_folds}, {"std_over_runs", r.g_std_runs}}},
              {"mean_correct_per_class", r.mean_correct_per_class},
              {"leakage", {{"checked_rows", r.leakage_checks}, {"violations", r.leakage_violations}}},
              {"per_fold", folds},
              {"warnings", r.warnings}};
}

Json to_json(const RegionCounts& r) {
  const double total = static_cast<double>(r.total());
  auto pct = [&](std::size_t n) { return total > 0 ? 100.0 * static_cast<double>(n) / total : 0.0; };
  return Json{{"majority", r.majority},
              {"boundary_minority", r.boundary_minority},
              {"interior_minority", r.interior_minority},
              {"total", r.total()},
              {"percent", {{"majority", pct(r.majority)},
                           {"boundary_minority", pct(r.boundary_minority)},
                           {"interior_minority", pct(r.interior_minority)}}}};
}

Json to_json(const CensusReport& r) {
  return Json{{"tau", r.tau}, {"generated", to_json(r.generated)}, {"original", to_json(r.original)}};
}

Json model_to_json(const LinearModel& m) {
  return Json{{"type", "ridge"},
              {"weights", m.weights},
              {"intercept", m.intercept},
              {"pair", pair_json(m.pair, m.minority_name, m.majority_name)},
              {"targets", {{"minority", 0.0}, {"majority", 1.0}}},
              {"threshold", m.threshold},
              {"rho", m.reg}};
}

LinearModel model_from_json(const Json& j) {
  LinearModel m;
  try {
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    const auto& pair = j.at("pair");
    m.pair.minority = pair.at("minority").at("id").get<int>();
    m.pair.majority = pair.at("majority").at("id").get<int>();
    m.minority_name = pair.at("minority").at("name").get<std::string>();
    m.majority_name = pair.at("majority").at("name").get<std::string>();
    m.threshold = j.value("threshold", 0.5);
    m.reg = j.value("rho", kDefaultRidgeRho);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid model JSON: ") + e.what());
  }
  return m;
}

void write_fold_csv(std::ostream& out, const MetricsReport& r) {
  out << "run,fold,train_size,augmented_size,test_size,f_measure,g_mean\n";
  for (const auto& f : r.fold_results) {
    out << f.run << ',' << f.fold << ',' << f.train_size << ',' << f.augmented_size << ',' << f.test_size << ','
        << format_double(f.f_measure) << ',' << format_double(f.g_mean) << '\n';
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

}  // namespace cfo
