#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfo {

/// Raised for malformed input data and failed computations (CLI exit code 1).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Appends a row; the first append on an empty 0x0 matrix fixes the width.
  void append_row(std::span<const double> values);

  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr const char* kFactualProvenance = "factual";

/// Immutable labelled table. Class ids are dense in 1..C and, for datasets
/// produced by the loader, ordered by ascending class size (id 1 = smallest).
class Dataset {
 public:
  Dataset(Matrix features, std::vector<int> labels, std::vector<std::string> class_names,
          std::vector<std::string> feature_names, std::vector<std::string> provenance = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_features() const noexcept { return features_.cols(); }
  int num_classes() const noexcept { return static_cast<int>(class_names_.size()); }

  const Matrix& features() const noexcept { return features_; }
  std::span<const double> row(std::size_t n) const { return features_.row(n); }
  int label(std::size_t n) const { return labels_[n]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Row indices of class `c`, ascending.
  const std::vector<std::size_t>& class_rows(int c) const;
  std::size_t class_size(int c) const { return class_rows(c).size(); }

  const std::string& class_name(int c) const;
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  /// Resolves a class by name, or by its numeric id when no name matches.
  std::optional<int> find_class(const std::string& name_or_id) const;

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& provenance() const noexcept { return provenance_; }

  /// New dataset with the given rows, in the given order, keeping class ids.
  Dataset subset(std::span<const std::size_t> rows) const;
  /// New dataset with extra rows appended after all existing rows.
  Dataset appended(const Matrix& rows, std::span<const int> labels,
                   std::span<const std::string> provenance) const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> provenance_;
  std::vector<std::vector<std::size_t>> class_index_;
};

struct IngestionReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  /// Class names by id (index 0 = id 1), with the size of each class.
  std::vector<std::pair<std::string, std::size_t>> classes;
  std::vector<std::string> warnings;
};

struct LoadedDataset {
  Dataset data;
  IngestionReport report;
};

struct CsvOptions {
  std::string label_column = "label";
  /// Fixes the id assignment (index 0 = id 1) instead of ordering by class size.
  /// Labels not listed are appended in size order.
  std::vector<std::string> class_order;
};

/// Reads a CSV with a header row. Cells that are empty, NA or NaN drop their
/// row; any other non-numeric feature cell is an error. A column named
/// `provenance` is carried through as row metadata.
LoadedDataset read_csv(std::istream& in, const CsvOptions& options, std::string source = "<stream>");
LoadedDataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
inline LoadedDataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  return load_csv(path, CsvOptions{label_column, {}});
}

/// Writes features, then the label column, then `provenance` when requested.
/// Values use the shortest representation that round-trips.
void write_csv(std::ostream& out, const Dataset& d, const std::string& label_column = "label",
               bool with_provenance = false);
void write_csv(const std::filesystem::path& path, const Dataset& d,
               const std::string& label_column = "label", bool with_provenance = false);

std::string format_double(double v);

struct FeatureStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> stddev;  // population standard deviation
  std::vector<double> median;
  std::vector<double> mad;

  std::size_t size() const noexcept { return mad.size(); }
  /// A feature with zero MAD or zero spread is excluded from distances and never perturbed.
  bool perturbable(std::size_t m) const { return mad[m] > 0.0 && stddev[m] > 0.0 && max[m] > min[m]; }
};

FeatureStats compute_feature_stats(const Dataset& d);

/// Median of the values (mean of the two middle values for even counts).
double median(std::vector<double> values);

struct ClassPair {
  int minority = 0;
  int majority = 0;
  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

/// Every (i, j) with N_i < N_j, ordered by i then j.
std::vector<ClassPair> class_pairs(const Dataset& d);

/// One pair per class that has a strictly larger class: (i, largest class).
std::vector<ClassPair> largest_majority_pairs(const Dataset& d);

}  // namespace cfo
