#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cfo/baselines.hpp"
#include "cfo/counterfactual.hpp"
#include "cfo/evaluation.hpp"
#include "cfo/numerics.hpp"
#include "cfo/report.hpp"
#include "cfo/synthetic.hpp"

namespace py = pybind11;

namespace cfo {
namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Reports go through the same serializers as the CLI, then into Python objects.
py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Matrix to_matrix(const Array& x) {
  if (x.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(x.shape(0)), cols = static_cast<std::size_t>(x.shape(1));
  Matrix m(rows, cols);
  const auto v = x.unchecked<2>();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v(r, c);
  return m;
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

PairPolicy policy(bool all_pairs) { return all_pairs ? PairPolicy::AllPairs : PairPolicy::LargestMajority; }

Dataset from_arrays(const Array& x, std::vector<int> y, std::vector<std::string> class_names,
                    std::vector<std::string> feature_names) {
  auto m = to_matrix(x);
  if (feature_names.empty())
    for (std::size_t k = 0; k < m.cols(); ++k) feature_names.push_back("x" + std::to_string(k + 1));
  if (class_names.empty()) {
    int top = 0;
    for (int v : y) top = std::max(top, v);
    for (int c = 1; c <= top; ++c) class_names.push_back(std::to_string(c));
  }
  return Dataset(std::move(m), std::move(y), std::move(class_names), std::move(feature_names));
}

GenerationParams generation_params(int trials, std::optional<double> epsilon, std::uint64_t seed,
                                   double target_ratio, bool exhaustive, bool all_pairs, double ridge_rho,
                                   int threads) {
  GenerationParams p;
  p.trials = trials;
  p.epsilon = epsilon;
  p.seed = seed;
  p.target_ratio = target_ratio;
  p.exhaustive = exhaustive;
  p.pair_policy = policy(all_pairs);
  p.ridge_rho = ridge_rho;
  p.threads = threads;
  p.validate();
  return p;
}

BaselineSpec baseline_spec(const std::string& method, int k, std::uint64_t seed, double target_ratio,
                           bool all_pairs) {
  BaselineSpec s;
  s.method = parse_baseline_method(method);
  s.k_neighbors = k;
  s.seed = seed;
  s.target_ratio = target_ratio;
  s.pair_policy = policy(all_pairs);
  return s;
}

}  // namespace
}  // namespace cfo

PYBIND11_MODULE(_core, m) {
  using namespace cfo;
  m.doc() = "Counterfactual minority oversampling";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&from_arrays), py::arg("x"), py::arg("y"), py::arg("class_names") = std::vector<std::string>{},
           py::arg("feature_names") = std::vector<std::string>{},
           "Labels are 1-based class ids indexing class_names.")
      .def_property_readonly("x", [](const Dataset& d) { return from_matrix(d.features()); })
      .def_property_readonly("y", [](const Dataset& d) { return d.labels(); })
      .def_property_readonly("class_names", &Dataset::class_names)
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("provenance", &Dataset::provenance)
      .def("class_size", &Dataset::class_size)
      .def("__len__", &Dataset::size)
      .def(
          "to_csv",
          [](const Dataset& d, const std::filesystem::path& path, const std::string& label_column,
             bool with_provenance) { write_csv(path, d, label_column, with_provenance); },
          py::arg("path"), py::arg("label_column") = "label", py::arg("with_provenance") = false)
      .def("stats", [](const Dataset& d) { return to_py(to_json(compute_feature_stats(d), d.feature_names())); });

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& label_column, std::vector<std::string> order) {
        auto loaded = load_csv(path, CsvOptions{label_column, std::move(order)});
        return py::make_tuple(std::move(loaded.data), to_py(to_json(loaded.report)));
      },
      py::arg("path"), py::arg("label_column") = "label", py::arg("class_order") = std::vector<std::string>{});

  m.def(
      "make_synthetic",
      [](std::size_t n_total, std::size_t n_minority, std::size_t n_noise, double spread, std::uint64_t seed) {
        SynthSpec s;
        s.n_total = n_total;
        s.n_minority = n_minority;
        s.n_noise = n_noise;
        s.spread = spread;
        s.seed = seed;
        return make_synthetic(s);
      },
      py::arg("n_total") = 1000, py::arg("n_minority") = 83, py::arg("n_noise") = 4, py::arg("spread") = 1.0,
      py::arg("seed") = 42);

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("weights", &LinearModel::weights)
      .def_readonly("intercept", &LinearModel::intercept)
      .def_property_readonly("pair", [](const LinearModel& lm) { return py::make_tuple(lm.pair.minority, lm.pair.majority); })
      .def("score", [](const LinearModel& lm, std::vector<double> x) { return score(lm, x); })
      .def("predict", [](const LinearModel& lm, std::vector<double> x) { return predict(lm, x); })
      .def("to_dict", [](const LinearModel& lm) { return to_py(model_to_json(lm)); });

  m.def(
      "train_ridge",
      [](const Dataset& d, int minority, int majority, double rho) { return train_ridge(d, {minority, majority}, rho); },
      py::arg("data"), py::arg("minority"), py::arg("majority"), py::arg("rho") = kDefaultRidgeRho);

  m.def(
      "oversample",
      [](const Dataset& d, int trials, std::optional<double> epsilon, std::uint64_t seed, double target_ratio,
         bool exhaustive, bool all_pairs, double ridge_rho, int threads) {
        const auto p = generation_params(trials, epsilon, seed, target_ratio, exhaustive, all_pairs, ridge_rho, threads);
        auto r = oversample_all(d, p);
        py::list reports;
        for (const auto& rep : r.reports) reports.append(to_py(to_json(rep)));
        return py::make_tuple(std::move(r.augmented), reports, r.models);
      },
      py::arg("data"), py::arg("trials") = 50, py::arg("epsilon") = py::none(), py::arg("seed") = 42,
      py::arg("target_ratio") = 1.0, py::arg("exhaustive") = false, py::arg("all_pairs") = false,
      py::arg("ridge_rho") = kDefaultRidgeRho, py::arg("threads") = 1,
      "Returns (augmented dataset, per-pair reports, per-pair models).");

  m.def(
      "baseline",
      [](const Dataset& d, const std::string& method, int k, std::uint64_t seed, double target_ratio, bool all_pairs) {
        auto r = baseline_oversample(d, baseline_spec(method, k, seed, target_ratio, all_pairs));
        py::list reports;
        for (const auto& rep : r.reports) reports.append(to_py(to_json(rep)));
        return py::make_tuple(std::move(r.augmented), reports);
      },
      py::arg("data"), py::arg("method") = "smote", py::arg("k") = 5, py::arg("seed") = 42,
      py::arg("target_ratio") = 1.0, py::arg("all_pairs") = false);

  m.def(
      "evaluate",
      [](const Dataset& d, const std::string& method, const std::string& classifier, int k_neighbors, int folds,
         int runs, std::uint64_t seed, int trials, int threads) {
        Oversampler os;
        if (method == "none") {
          os = identity_oversampler();
        } else if (method == "counterfactual") {
          os = counterfactual_oversampler(generation_params(trials, std::nullopt, seed, 1.0, false, false,
                                                            kDefaultRidgeRho, 1));
        } else {
          os = baseline_oversampler(baseline_spec(method, 5, seed, 1.0, false));
        }
        ClassifierFactory cls;
        if (classifier == "knn") {
          cls = knn_classifier(k_neighbors);
        } else if (classifier == "ridge") {
          cls = ridge_classifier();
        } else {
          throw std::invalid_argument("unknown classifier: " + classifier);
        }
        MetricsReport r;
        {
          py::gil_scoped_release release;
          r = kfold_evaluate(d, os, cls, folds, runs, seed, threads);
        }
        return to_py(to_json(r));
      },
      py::arg("data"), py::arg("method") = "counterfactual", py::arg("classifier") = "knn", py::arg("k_neighbors") = 1,
      py::arg("folds") = 10, py::arg("runs") = 1, py::arg("seed") = 42, py::arg("trials") = 50,
      py::arg("threads") = 1, "method is one of none, counterfactual, random, smote, adasyn.");

  m.def(
      "region_census",
      [](const Dataset& factual, const Array& generated, const LinearModel& model, double tau) {
        return to_py(to_json(region_census(factual, to_matrix(generated), model, tau)));
      },
      py::arg("factual"), py::arg("generated"), py::arg("model"), py::arg("tau") = 0.15);

  m.def(
      "f_measure",
      [](std::vector<int> truth, std::vector<int> predicted, int classes, int positive) {
        return f_measure(ConfusionMatrix::from_predictions(truth, predicted, classes), positive);
      },
      py::arg("truth"), py::arg("predicted"), py::arg("classes"), py::arg("positive"));
  m.def(
      "g_mean",
      [](std::vector<int> truth, std::vector<int> predicted, int classes, int positive) {
        return g_mean(ConfusionMatrix::from_predictions(truth, predicted, classes), positive);
      },
      py::arg("truth"), py::arg("predicted"), py::arg("classes"), py::arg("positive"));

  m.def("spearman", [](std::vector<double> x, std::vector<double> y) { return spearman_rho(x, y); });
  m.def("phi_inv", &phi_inv);
}
