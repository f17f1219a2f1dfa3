#include "cfo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cfo/baselines.hpp"
#include "cfo/counterfactual.hpp"
#include "cfo/dataset.hpp"
#include "cfo/evaluation.hpp"
#include "cfo/report.hpp"
#include "cfo/synthetic.hpp"

namespace cfo {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  // shared
  std::string input;
  std::string output;
  std::string report;
  std::string label = "label";
  std::vector<std::string> pair;
  bool all_pairs = false;
  std::uint64_t seed = 42;
  int threads = 1;
  double target_ratio = 1.0;

  // synth
  SynthSpec synth;
  std::vector<double> majority_center{0.0, 0.0};
  std::vector<double> minority_center{4.0, 4.0};

  // counterfactual
  double lambda = 1.0;
  double epsilon = 0.0;
  int trials = 50;
  double tau = 0.15;
  double rho = kDefaultRidgeRho;
  bool exhaustive = false;
  bool timing = false;
  std::string model_out;

  // baselines
  std::string method;
  int k_neighbors = 5;

  // evaluate
  std::string classifier = "knn";
  int knn_k = 5;
  int folds = 10;
  int runs = 1;
  std::string folds_csv;

  // census
  std::string factual;
  std::string augmented;
  std::string model;
  std::string method_name;

  // report
  std::vector<std::string> inputs;
  std::string csv_out;
};

void add_generation_flags(CLI::App* sub, Options& o, CLI::Option*& epsilon_opt) {
  sub->add_option("--lambda", o.lambda, "Loss weight of the prediction term (recorded)")->check(CLI::PositiveNumber);
  epsilon_opt = sub->add_option("--epsilon", o.epsilon, "Distance budget (default: adaptive)")->check(CLI::PositiveNumber);
  sub->add_option("--trials", o.trials, "Trials per round")->check(CLI::PositiveNumber);
  sub->add_option("--target-ratio", o.target_ratio, "Desired minority/majority ratio")->check(CLI::Range(1e-12, 1.0));
  sub->add_option("--tau", o.tau, "Boundary band half-width in score units")->check(CLI::PositiveNumber);
  sub->add_option("--rho", o.rho, "Ridge penalty")->check(CLI::NonNegativeNumber);
  sub->add_flag("--exhaustive", o.exhaustive, "One counterfactual per majority row, ignoring the target ratio");
}

GenerationParams generation_params(const Options& o, bool epsilon_given) {
  GenerationParams p;
  p.lambda = o.lambda;
  if (epsilon_given) p.epsilon = o.epsilon;
  p.trials = o.trials;
  p.seed = o.seed;
  p.target_ratio = o.target_ratio;
  p.boundary_tau = o.tau;
  p.exhaustive = o.exhaustive;
  p.pair_policy = o.all_pairs ? PairPolicy::AllPairs : PairPolicy::LargestMajority;
  p.ridge_rho = o.rho;
  p.threads = o.threads;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::optional<ClassPair> resolve_pair(const Dataset& d, const std::vector<std::string>& names) {
  if (names.empty()) return std::nullopt;
  const auto i = d.find_class(names[0]);
  const auto j = d.find_class(names[1]);
  if (!i || !j) throw UsageError("--pair: unknown class '" + (i ? names[1] : names[0]) + "'");
  if (*i == *j) throw UsageError("--pair: classes must differ");
  return ClassPair{*i, *j};
}

Json pair_selection(const Options& o) {
  if (!o.pair.empty()) return Json{{"mode", "explicit"}, {"classes", o.pair}};
  return Json{{"mode", o.all_pairs ? "all_pairs" : "largest_majority"}};
}

Json header(const std::string& command) {
  return Json{{"tool", kToolVersion}, {"command", command}};
}

LoadedDataset load(const std::string& path, const std::string& label, std::vector<std::string> order = {}) {
  return load_csv(path, CsvOptions{label, std::move(order)});
}

void emit_json(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

std::string report_path(const Options& o) {
  if (!o.report.empty()) return o.report;
  return o.output + ".report.json";
}

int cmd_synth(const Options& o, std::ostream&) {
  SynthSpec s = o.synth;
  s.seed = o.seed;
  s.majority_center = {o.majority_center.at(0), o.majority_center.at(1)};
  s.minority_center = {o.minority_center.at(0), o.minority_center.at(1)};
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_csv(o.output, make_synthetic(s), o.label);
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const auto loaded = load(o.input, o.label);
  const auto& d = loaded.data;
  Json pairs = Json::array();
  for (const auto& p : class_pairs(d)) {
    pairs.push_back({{"minority", d.class_name(p.minority)}, {"majority", d.class_name(p.majority)}});
  }
  Json j = header("stats");
  j["config"] = {{"input", o.input}, {"label_column", o.label}};
  j["ingestion"] = to_json(loaded.report);
  j["class_pairs"] = pairs;
  j["feature_stats"] = to_json(compute_feature_stats(d), d.feature_names());
  emit_json(j, o.output, out);
  return 0;
}

int cmd_oversample(const Options& o, bool epsilon_given, std::ostream&) {
  const GenerationParams params = generation_params(o, epsilon_given);
  const auto loaded = load(o.input, o.label);
  const auto pair = resolve_pair(loaded.data, o.pair);
  const auto result = pair ? oversample(loaded.data, *pair, params) : oversample_all(loaded.data, params);
  write_csv(o.output, result.augmented, o.label, true);

  Json j = header("oversample");
  j["config"] = {{"input", o.input},
                 {"output", o.output},
                 {"label_column", o.label},
                 {"pair_selection", pair_selection(o)},
                 {"params", to_json(params)}};
  j["ingestion"] = to_json(loaded.report);
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r, o.timing));
  j["pairs"] = reports;
  Json models = Json::array();
  for (const auto& m : result.models) models.push_back(model_to_json(m));
  j["models"] = models;
  j["rows_appended"] = result.samples.size();
  write_json(report_path(o), j);
  if (!o.model_out.empty()) write_json(o.model_out, models.size() == 1 ? models[0] : models);
  return 0;
}

int cmd_baseline(const Options& o, std::ostream&) {
  BaselineSpec spec;
  spec.method = parse_baseline_method(o.method);
  spec.k_neighbors = o.k_neighbors;
  spec.seed = o.seed;
  spec.target_ratio = o.target_ratio;
  spec.pair_policy = o.all_pairs ? PairPolicy::AllPairs : PairPolicy::LargestMajority;
  const auto loaded = load(o.input, o.label);
  const auto pair = resolve_pair(loaded.data, o.pair);
  BaselineResult result = [&] {
    if (!pair) return baseline_oversample(loaded.data, spec);
    switch (spec.method) {
      case BaselineMethod::RandomDuplication: return random_oversample(loaded.data, *pair, spec);
      case BaselineMethod::Smote: return smote_oversample(loaded.data, *pair, spec);
      case BaselineMethod::Adasyn: break;
    }
    return adasyn_oversample(loaded.data, *pair, spec);
  }();
  write_csv(o.output, result.augmented, o.label, true);
  Json j = header("baseline");
  j["config"] = {{"input", o.input},
                 {"output", o.output},
                 {"label_column", o.label},
                 {"pair_selection", pair_selection(o)},
                 {"params", to_json(spec)}};
  j["ingestion"] = to_json(loaded.report);
  Json reports = Json::array();
  for (const auto& r : result.reports) reports.push_back(to_json(r));
  j["pairs"] = reports;
  write_json(report_path(o), j);
  return 0;
}

int cmd_evaluate(const Options& o, bool epsilon_given, std::ostream& out) {
  Oversampler sampler;
  Json method_params;
  if (o.method == "none") {
    sampler = identity_oversampler();
    method_params = Json::object();
  } else if (o.method == "counterfactual") {
    const auto params = generation_params(o, epsilon_given);
    sampler = counterfactual_oversampler(params);
    method_params = to_json(params);
  } else {
    BaselineSpec spec;
    spec.method = parse_baseline_method(o.method);
    spec.k_neighbors = o.k_neighbors;
    spec.target_ratio = o.target_ratio;
    spec.pair_policy = o.all_pairs ? PairPolicy::AllPairs : PairPolicy::LargestMajority;
    sampler = baseline_oversampler(spec);
    method_params = to_json(spec);
  }
  const ClassifierFactory clf = o.classifier == "knn" ? knn_classifier(o.knn_k) : ridge_classifier(o.rho);

  const auto loaded = load(o.input, o.label);
  const auto metrics = kfold_evaluate(loaded.data, sampler, clf, o.folds, o.runs, o.seed, o.threads);
  Json j = header("evaluate");
  j["method"] = o.method;
  j["classifier"] = o.classifier;
  j["config"] = {{"input", o.input},
                 {"label_column", o.label},
                 {"method", o.method},
                 {"method_params", method_params},
                 {"classifier", {{"name", o.classifier}, {"k", o.knn_k}, {"rho", o.rho}}},
                 {"folds", o.folds},
                 {"runs", o.runs},
                 {"seed", o.seed},
                 {"seed_derivation", "fold assignment per (seed, run, class); oversampler seed per (seed, run, fold)"}};
  j["ingestion"] = to_json(loaded.report);
  j["metrics"] = to_json(metrics);
  emit_json(j, o.output, out);
  if (!o.folds_csv.empty()) {
    std::ofstream csv(o.folds_csv, std::ios::binary);
    if (!csv) throw DataError("cannot write '" + o.folds_csv + "'");
    write_fold_csv(csv, metrics);
  }
  return 0;
}

std::vector<LinearModel> read_models(const std::string& path) {
  const Json j = read_json(path);
  std::vector<LinearModel> models;
  if (j.is_array()) {
    for (const auto& m : j) models.push_back(model_from_json(m));
  } else if (j.contains("models")) {
    for (const auto& m : j.at("models")) models.push_back(model_from_json(m));
  } else {
    models.push_back(model_from_json(j));
  }
  if (models.empty()) throw DataError("'" + path + "' holds no model");
  return models;
}

int cmd_census(const Options& o, std::ostream& out) {
  const auto factual = load(o.factual, o.label);
  const auto& fd = factual.data;
  const auto augmented = load(o.augmented, o.label, fd.class_names());
  const auto& ad = augmented.data;
  if (ad.num_features() != fd.num_features()) throw DataError("census: factual and augmented feature counts differ");

  LinearModel model;
  std::string model_source;
  const auto explicit_pair = resolve_pair(fd, o.pair);
  if (!o.model.empty()) {
    const auto models = read_models(o.model);
    model = models.front();
    if (explicit_pair) {
      const auto it = std::find_if(models.begin(), models.end(), [&](const LinearModel& m) {
        return m.minority_name == fd.class_name(explicit_pair->minority) &&
               m.majority_name == fd.class_name(explicit_pair->majority);
      });
      if (it == models.end()) throw DataError("census: no model for the requested pair");
      model = *it;
    }
    const auto i = fd.find_class(model.minority_name);
    const auto jj = fd.find_class(model.majority_name);
    if (!i || !jj) throw DataError("census: model classes do not match the factual dataset");
    model.pair = {*i, *jj};
    if (model.weights.size() != fd.num_features()) throw DataError("census: model dimension mismatch");
    model_source = o.model;
  } else {
    const auto pairs = largest_majority_pairs(fd);
    const ClassPair pair = explicit_pair ? *explicit_pair : pairs.at(0);
    model = train_ridge(fd, pair, o.rho);
    model_source = "trained on factual data (rho " + format_double(o.rho) + ")";
  }

  Matrix generated(0, ad.num_features());
  const bool has_provenance =
      std::any_of(ad.provenance().begin(), ad.provenance().end(), [](const auto& p) { return p != kFactualProvenance; });
  for (std::size_t n = 0; n < ad.size(); ++n) {
    const bool is_generated = has_provenance ? ad.provenance()[n] != kFactualProvenance : n >= fd.size();
    if (is_generated && ad.label(n) == model.pair.minority) generated.append_row(ad.row(n));
  }
  const auto census = region_census(fd, generated, model, o.tau);
  Json j = header("census");
  j["method"] = o.method_name.empty() ? std::filesystem::path(o.augmented).stem().string() : o.method_name;
  j["config"] = {{"factual", o.factual},
                 {"augmented", o.augmented},
                 {"label_column", o.label},
                 {"model", model_source},
                 {"tau", o.tau}};
  j["model"] = model_to_json(model);
  j["census"] = to_json(census);
  emit_json(j, o.output, out);
  return 0;
}

std::string percent(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << v << '%';
  return s.str();
}

std::string fixed3(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  return q + "\"";
}

void emit_table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows,
                std::ostream& md, std::ostream* csv) {
  md << '|';
  for (const auto& h : head) md << ' ' << h << " |";
  md << "\n|";
  for (std::size_t k = 0; k < head.size(); ++k) md << (k == 0 ? " :--- |" : " ---: |");
  md << '\n';
  for (const auto& r : rows) {
    md << '|';
    for (const auto& c : r) md << ' ' << c << " |";
    md << '\n';
  }
  if (csv) {
    for (std::size_t k = 0; k < head.size(); ++k) *csv << (k ? "," : "") << csv_cell(head[k]);
    *csv << '\n';
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) *csv << (k ? "," : "") << csv_cell(r[k]);
      *csv << '\n';
    }
  }
}

int cmd_report(const Options& o, std::ostream& out) {
  std::vector<std::vector<std::string>> census_rows, metric_rows;
  std::vector<std::string> census_head{"Method", "Majority", "Boundary minority", "Interior minority", "tau"};
  std::vector<std::string> metric_head{"Method", "Classifier", "F-measure", "G-Mean", "Folds x runs"};
  for (const auto& path : o.inputs) {
    const Json j = read_json(path);
    const std::string command = j.value("command", "");
    if (command == "census") {
      const auto& g = j.at("census").at("generated");
      const auto& pct = g.at("percent");
      auto cell = [&](const char* key) {
        return std::to_string(g.at(key).get<std::size_t>()) + " (" + percent(pct.at(key).get<double>()) + ")";
      };
      census_rows.push_back({j.value("method", path), cell("majority"), cell("boundary_minority"),
                             cell("interior_minority"), format_double(j.at("census").at("tau").get<double>())});
    } else if (command == "evaluate") {
      const auto& m = j.at("metrics");
      auto cell = [&](const char* key) {
        return fixed3(m.at(key).at("mean").get<double>()) + " (±" + fixed3(m.at(key).at("std_over_folds").get<double>()) + ")";
      };
      metric_rows.push_back({j.value("method", path), j.value("classifier", ""), cell("f_measure"), cell("g_mean"),
                             std::to_string(m.at("folds").get<int>()) + "x" + std::to_string(m.at("runs").get<int>())});
    } else {
      throw DataError("'" + path + "': not a census or evaluate report");
    }
  }

  std::ostringstream md;
  std::ofstream csv_file;
  std::ostream* csv = nullptr;
  if (!o.csv_out.empty()) {
    csv_file.open(o.csv_out, std::ios::binary);
    if (!csv_file) throw DataError("cannot write '" + o.csv_out + "'");
    csv = &csv_file;
  }
  if (!census_rows.empty()) emit_table(census_head, census_rows, md, csv);
  if (!census_rows.empty() && !metric_rows.empty()) {
    md << '\n';
    if (csv) *csv << '\n';
  }
  if (!metric_rows.empty()) emit_table(metric_head, metric_rows, md, csv);
  if (o.output.empty()) {
    out << md.str();
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw DataError("cannot write '" + o.output + "'");
    f << md.str();
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual minority oversampling for imbalanced tabular data", "cfo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto* synth = app.add_subcommand("synth", "Write the two-cluster synthetic dataset as CSV");
  synth->add_option("--out", o.output, "Output CSV")->required();
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--label", o.label, "Label column name");
  synth->add_option("--n-total", o.synth.n_total, "Total samples")->check(CLI::PositiveNumber);
  synth->add_option("--n-minority", o.synth.n_minority, "Minority samples (including noise)")->check(CLI::PositiveNumber);
  synth->add_option("--n-noise", o.synth.n_noise, "Minority samples planted in the majority cluster");
  synth->add_option("--majority-center", o.majority_center, "x,y")->expected(2)->delimiter(',');
  synth->add_option("--minority-center", o.minority_center, "x,y")->expected(2)->delimiter(',');
  synth->add_option("--spread", o.synth.spread, "Cluster standard deviation")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Ingestion report, class pairs and feature statistics as JSON");
  stats->add_option("--in", o.input, "Input CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--label", o.label, "Label column name");
  stats->add_option("--out", o.output, "Output JSON (default: stdout)");

  auto add_pair_flags = [&](CLI::App* sub) {
    auto* pair = sub->add_option("--pair", o.pair, "Explicit pair: MINORITY MAJORITY (label or id)")->expected(2);
    auto* all = sub->add_flag("--all-pairs", o.all_pairs, "Use every (i, j) with N_i < N_j");
    pair->excludes(all);
    all->excludes(pair);
  };

  CLI::Option* eps_over = nullptr;
  auto* over = app.add_subcommand("oversample", "Counterfactual oversampling: CSV -> augmented CSV + JSON report");
  over->add_option("--in", o.input, "Input CSV")->required()->check(CLI::ExistingFile);
  over->add_option("--out", o.output, "Augmented CSV")->required();
  over->add_option("--report", o.report, "Report JSON (default: <out>.report.json)");
  over->add_option("--model-out", o.model_out, "Write the frozen classifier(s) as JSON");
  over->add_option("--label", o.label, "Label column name");
  over->add_option("--seed", o.seed, "Random seed");
  over->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  over->add_flag("--timing", o.timing, "Include wall-clock time in the report");
  add_pair_flags(over);
  add_generation_flags(over, o, eps_over);

  auto* base = app.add_subcommand("baseline", "Reference oversamplers: random duplication, SMOTE, ADASYN");
  base->add_option("--method", o.method, "random | smote | adasyn")
      ->required()
      ->check(CLI::IsMember({"random", "smote", "adasyn"}));
  base->add_option("--in", o.input, "Input CSV")->required()->check(CLI::ExistingFile);
  base->add_option("--out", o.output, "Augmented CSV")->required();
  base->add_option("--report", o.report, "Report JSON (default: <out>.report.json)");
  base->add_option("--label", o.label, "Label column name");
  base->add_option("--seed", o.seed, "Random seed");
  base->add_option("--k", o.k_neighbors, "Neighbours for SMOTE/ADASYN")->check(CLI::PositiveNumber);
  base->add_option("--target-ratio", o.target_ratio, "Desired minority/majority ratio")->check(CLI::Range(1e-12, 1.0));
  add_pair_flags(base);

  CLI::Option* eps_eval = nullptr;
  auto* eval = app.add_subcommand("evaluate", "Stratified k-fold F-measure / G-Mean as JSON");
  eval->add_option("--in", o.input, "Input CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--label", o.label, "Label column name");
  eval->add_option("--method", o.method, "none | counterfactual | random | smote | adasyn")
      ->required()
      ->check(CLI::IsMember({"none", "counterfactual", "random", "smote", "adasyn"}));
  eval->add_option("--classifier", o.classifier, "knn | ridge")->check(CLI::IsMember({"knn", "ridge"}));
  eval->add_option("--knn-k", o.knn_k, "Neighbours for the kNN classifier")->check(CLI::PositiveNumber);
  eval->add_option("--k", o.k_neighbors, "Neighbours for SMOTE/ADASYN")->check(CLI::PositiveNumber);
  eval->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2, 1000));
  eval->add_option("--runs", o.runs, "Repetitions with derived seeds")->check(CLI::PositiveNumber);
  eval->add_option("--seed", o.seed, "Random seed");
  eval->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--out", o.output, "Output JSON (default: stdout)");
  eval->add_option("--folds-csv", o.folds_csv, "Per-fold CSV");
  eval->add_flag("--all-pairs", o.all_pairs, "Oversample every (i, j) with N_i < N_j");
  add_generation_flags(eval, o, eps_eval);

  auto* cens = app.add_subcommand("census", "Count generated rows per decision region as JSON");
  cens->add_option("--factual", o.factual, "Factual CSV")->required()->check(CLI::ExistingFile);
  cens->add_option("--augmented", o.augmented, "Augmented CSV")->required()->check(CLI::ExistingFile);
  cens->add_option("--model", o.model, "Model JSON from `oversample --model-out` (default: train on factual)")
      ->check(CLI::ExistingFile);
  cens->add_option("--pair", o.pair, "MINORITY MAJORITY")->expected(2);
  cens->add_option("--label", o.label, "Label column name");
  cens->add_option("--tau", o.tau, "Boundary band half-width in score units")->check(CLI::PositiveNumber);
  cens->add_option("--rho", o.rho, "Ridge penalty when training the census model")->check(CLI::NonNegativeNumber);
  cens->add_option("--method", o.method_name, "Name recorded for the report table");
  cens->add_option("--out", o.output, "Output JSON (default: stdout)");

  auto* rep = app.add_subcommand("report", "Merge census / evaluate JSON reports into a table");
  rep->add_option("--in", o.inputs, "Report JSON files")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", o.output, "Markdown output (default: stdout)");
  rep->add_option("--csv", o.csv_out, "CSV output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cfo: " << e.what() << '\n';
    const auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failing->help();
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (over->parsed()) return cmd_oversample(o, eps_over->count() > 0, out);
    if (base->parsed()) return cmd_baseline(o, out);
    if (eval->parsed()) return cmd_evaluate(o, eps_eval->count() > 0, out);
    if (cens->parsed()) return cmd_census(o, out);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const UsageError& e) {
    err << "cfo: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "cfo: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cfo
