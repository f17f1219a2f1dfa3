#include "cfo/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace cfo {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw std::invalid_argument("Matrix::append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Dataset::Dataset(Matrix features, std::vector<int> labels, std::vector<std::string> class_names,
                 std::vector<std::string> feature_names, std::vector<std::string> provenance)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      feature_names_(std::move(feature_names)),
      provenance_(std::move(provenance)) {
  if (features_.rows() != labels_.size())
    throw std::invalid_argument("Dataset: feature rows and labels differ in length");
  if (labels_.size() < 2) throw DataError("Dataset: need at least 2 samples");
  if (features_.cols() < 1) throw DataError("Dataset: need at least 1 feature");
  if (class_names_.size() < 2) throw DataError("Dataset: need at least 2 classes");
  if (feature_names_.empty()) {
    for (std::size_t m = 0; m < features_.cols(); ++m) feature_names_.push_back("x" + std::to_string(m + 1));
  }
  if (feature_names_.size() != features_.cols())
    throw std::invalid_argument("Dataset: feature_names length mismatch");
  if (provenance_.empty()) provenance_.assign(labels_.size(), kFactualProvenance);
  if (provenance_.size() != labels_.size()) throw std::invalid_argument("Dataset: provenance length mismatch");
  for (double v : features_.data()) {
    if (!std::isfinite(v)) throw DataError("Dataset: non-finite feature value");
  }
  class_index_.resize(class_names_.size());
  for (std::size_t n = 0; n < labels_.size(); ++n) {
    const int c = labels_[n];
    if (c < 1 || c > num_classes()) throw std::invalid_argument("Dataset: label out of range 1..C");
    class_index_[c - 1].push_back(n);
  }
}

const std::vector<std::size_t>& Dataset::class_rows(int c) const {
  if (c < 1 || c > num_classes()) throw std::out_of_range("Dataset: unknown class id " + std::to_string(c));
  return class_index_[c - 1];
}

const std::string& Dataset::class_name(int c) const {
  if (c < 1 || c > num_classes()) throw std::out_of_range("Dataset: unknown class id " + std::to_string(c));
  return class_names_[c - 1];
}

std::optional<int> Dataset::find_class(const std::string& name_or_id) const {
  for (std::size_t k = 0; k < class_names_.size(); ++k) {
    if (class_names_[k] == name_or_id) return static_cast<int>(k + 1);
  }
  int id = 0;
  const auto* end = name_or_id.data() + name_or_id.size();
  auto [ptr, ec] = std::from_chars(name_or_id.data(), end, id);
  if (ec == std::errc{} && ptr == end && id >= 1 && id <= num_classes()) return id;
  return std::nullopt;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Matrix x(0, 0);
  std::vector<int> y;
  std::vector<std::string> prov;
  y.reserve(rows.size());
  prov.reserve(rows.size());
  for (std::size_t r : rows) {
    x.append_row(row(r));
    y.push_back(labels_[r]);
    prov.push_back(provenance_[r]);
  }
  return Dataset(std::move(x), std::move(y), class_names_, feature_names_, std::move(prov));
}

Dataset Dataset::appended(const Matrix& rows, std::span<const int> labels,
                          std::span<const std::string> provenance) const {
  if (rows.rows() != labels.size() || labels.size() != provenance.size())
    throw std::invalid_argument("Dataset::appended: length mismatch");
  if (rows.rows() > 0 && rows.cols() != num_features())
    throw std::invalid_argument("Dataset::appended: feature count mismatch");
  Matrix x = features_;
  std::vector<int> y = labels_;
  std::vector<std::string> prov = provenance_;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    x.append_row(rows.row(r));
    y.push_back(labels[r]);
    prov.push_back(provenance[r]);
  }
  return Dataset(std::move(x), std::move(y), class_names_, feature_names_, std::move(prov));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "?";
}

std::optional<double> parse_real(const std::string& cell) {
  double v = 0.0;
  const char* begin = cell.data();
  if (!cell.empty() && cell.front() == '+') ++begin;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

LoadedDataset read_csv(std::istream& in, const CsvOptions& options, std::string source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file, header row required");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  std::optional<std::size_t> label_col;
  std::optional<std::size_t> prov_col;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == options.label_column) {
      label_col = k;
    } else if (header[k] == "provenance") {
      prov_col = k;
    } else {
      feature_cols.push_back(k);
      feature_names.push_back(header[k]);
    }
  }
  if (!label_col) throw DataError(source + ": label column '" + options.label_column + "' not found");
  if (feature_cols.empty()) throw DataError(source + ": no feature columns");

  IngestionReport report;
  report.source = source;
  Matrix x(0, feature_cols.size());
  std::vector<std::string> raw_labels;
  std::vector<std::string> provenance;
  std::vector<double> values(feature_cols.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++report.rows_read;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(cells.size()));
    bool drop = is_missing(cells[*label_col]);
    for (std::size_t k = 0; k < feature_cols.size() && !drop; ++k) {
      const auto& cell = cells[feature_cols[k]];
      if (is_missing(cell)) {
        drop = true;
        break;
      }
      const auto v = parse_real(cell);
      if (!v) throw DataError(source + ":" + std::to_string(line_no) + ": column '" + header[feature_cols[k]] +
                              "' is not a real number: '" + cell + "'");
      if (!std::isfinite(*v)) {
        drop = true;
        break;
      }
      values[k] = *v;
    }
    if (drop) {
      ++report.rows_dropped;
      continue;
    }
    x.append_row(values);
    raw_labels.push_back(cells[*label_col]);
    provenance.push_back(prov_col ? cells[*prov_col] : std::string(kFactualProvenance));
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& l : raw_labels) ++counts[l];
  if (counts.size() < 2) throw DataError(source + ": need at least 2 classes, found " + std::to_string(counts.size()));

  std::vector<std::string> names;
  for (const auto& fixed : options.class_order) {
    if (std::find(names.begin(), names.end(), fixed) == names.end()) names.push_back(fixed);
  }
  std::vector<std::pair<std::string, std::size_t>> rest;
  for (const auto& [name, n] : counts) {
    if (std::find(names.begin(), names.end(), name) == names.end()) rest.emplace_back(name, n);
  }
  // Ascending size, ties by name; std::map iteration already sorted by name.
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& r : rest) names.push_back(r.first);

  std::map<std::string, int> ids;
  for (std::size_t k = 0; k < names.size(); ++k) ids[names[k]] = static_cast<int>(k + 1);
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) labels.push_back(ids[l]);

  for (const auto& name : names) {
    const auto it = counts.find(name);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    report.classes.emplace_back(name, n);
    if (n < 2) report.warnings.push_back("class '" + name + "' has fewer than 2 samples");
  }

  Dataset d(std::move(x), std::move(labels), std::move(names), std::move(feature_names), std::move(provenance));
  return {std::move(d), std::move(report)};
}

LoadedDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_csv(in, options, path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& d, const std::string& label_column, bool with_provenance) {
  for (const auto& name : d.feature_names()) out << quote_if_needed(name) << ',';
  out << quote_if_needed(label_column);
  if (with_provenance) out << ",provenance";
  out << '\n';
  for (std::size_t n = 0; n < d.size(); ++n) {
    for (double v : d.row(n)) out << format_double(v) << ',';
    out << quote_if_needed(d.class_name(d.label(n)));
    if (with_provenance) out << ',' << quote_if_needed(d.provenance()[n]);
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& d, const std::string& label_column,
               bool with_provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(out, d, label_column, with_provenance);
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty range");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

FeatureStats compute_feature_stats(const Dataset& d) {
  const std::size_t n = d.size();
  const std::size_t m_count = d.num_features();
  FeatureStats s;
  s.min.resize(m_count);
  s.max.resize(m_count);
  s.stddev.resize(m_count);
  s.median.resize(m_count);
  s.mad.resize(m_count);
  std::vector<double> col(n);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t r = 0; r < n; ++r) col[r] = d.features()(r, m);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    s.min[m] = *lo;
    s.max[m] = *hi;
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    s.stddev[m] = std::sqrt(ss / static_cast<double>(n));
    if (*lo == *hi) s.stddev[m] = 0.0;
    s.median[m] = median(col);
    std::vector<double> dev(n);
    for (std::size_t r = 0; r < n; ++r) dev[r] = std::abs(col[r] - s.median[m]);
    s.mad[m] = median(std::move(dev));
  }
  return s;
}

std::vector<ClassPair> class_pairs(const Dataset& d) {
  std::vector<ClassPair> pairs;
  for (int i = 1; i <= d.num_classes(); ++i) {
    for (int j = 1; j <= d.num_classes(); ++j) {
      if (d.class_size(i) < d.class_size(j)) pairs.push_back({i, j});
    }
  }
  return pairs;
}

std::vector<ClassPair> largest_majority_pairs(const Dataset& d) {
  std::vector<ClassPair> pairs;
  for (int i = 1; i <= d.num_classes(); ++i) {
    int best = 0;
    for (int j = 1; j <= d.num_classes(); ++j) {
      if (d.class_size(j) <= d.class_size(i)) continue;
      if (best == 0 || d.class_size(j) >= d.class_size(best)) best = j;
    }
    if (best != 0) pairs.push_back({i, best});
  }
  return pairs;
}

}  // namespace cfo
