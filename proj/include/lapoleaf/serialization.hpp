#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lapoleaf/dataset.hpp"
#include "lapoleaf/model.hpp"
#include "lapoleaf/propagation.hpp"

namespace lapoleaf {

inline constexpr int kModelFormatVersion = 1;

/// Run configuration as read from a JSON document:
///
///   {"percent": 5, "alpha": 0.5, "h": {"kind": "linear", "a": 0.1},
///    "n_max": null, "metric": "euclidean", "mode": "classification",
///    "label_column": "label", "truth_column": "truth", "pop_column": null,
///    "feature_columns": [], "classes": [], "seed": 0}
///
/// Every key is optional; unknown keys are rejected.
struct Config {
  FitParams fit;
  CsvSchema schema;
  std::uint64_t seed = 0;
};

Config default_config();
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);
std::string config_to_json(const Config& config);

/// Versioned JSON model: parameters, frozen d_c, dataset, tree arrays
/// {rho, delta, gamma, ln, root} and forest {roots, subtree_id, layer}.
/// Root parents are written as -1.
void save_model(std::ostream& out, const Model& model);
void save_model(const std::filesystem::path& path, const Model& model);

/// Reads a model and rebuilds distances, tree, forest and labels from its
/// dataset and d_c. Throws ValidationError if the stored arrays disagree
/// with the rebuild.
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

/// CSV with columns index,label,score_<class>... (classification) or
/// index,value (regression). `rows` maps each output row to a model row.
void write_predictions_csv(std::ostream& out, const Predictions& pred, const Dataset& data,
                           std::span<const std::size_t> rows, std::size_t first_index = 0);

/// Class name for classification, formatted number for regression.
std::string format_label(const Dataset& data, double value);

}  // namespace lapoleaf
