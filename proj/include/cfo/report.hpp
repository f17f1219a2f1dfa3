#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfo/baselines.hpp"
#include "cfo/classifier.hpp"
#include "cfo/counterfactual.hpp"
#include "cfo/dataset.hpp"
#include "cfo/evaluation.hpp"

namespace cfo {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "cfo 0.1.0";

Json to_json(const IngestionReport& r);
Json to_json(const FeatureStats& s, const std::vector<std::string>& feature_names);
Json to_json(const GenerationParams& p);
/// Timing fields are omitted unless requested so that reports of identical
/// runs compare equal byte for byte.
Json to_json(const GenerationReport& r, bool include_timing = false);
Json to_json(const BaselineSpec& s);
Json to_json(const BaselineReport& r);
Json to_json(const MetricsReport& r);
Json to_json(const RegionCounts& r);
Json to_json(const CensusReport& r);

Json model_to_json(const LinearModel& m);
LinearModel model_from_json(const Json& j);

/// One row per (run, fold).
void write_fold_csv(std::ostream& out, const MetricsReport& r);

/// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace cfo
