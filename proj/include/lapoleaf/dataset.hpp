#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lapoleaf/core.hpp"

namespace lapoleaf {

enum class TaskMode { classification, regression };

std::string to_string(TaskMode mode);
TaskMode task_mode_from_string(const std::string& name);

/// Canonical in-memory dataset.
///
/// Each row is a (possibly fat) node: `pop[i]` raw points that share the
/// feature vector `features.row(i)`. Known labels are class ids stored as
/// doubles in classification mode and real targets in regression mode.
/// Features are used as-is; callers are expected to scale them beforehand.
struct Dataset {
  Matrix features;
  std::vector<std::size_t> pop;
  std::vector<std::optional<double>> label;
  TaskMode mode = TaskMode::classification;
  /// Class names in class-id order. Empty in regression mode.
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dims() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  /// Width of a label vector: K in classification, 1 in regression.
  std::size_t label_width() const noexcept {
    return mode == TaskMode::classification ? class_names.size() : 1;
  }
  std::size_t labeled_count() const noexcept;

  /// Appends one point. Throws ValidationError on a width mismatch or a
  /// non-finite value.
  void append(std::span<const double> x, std::size_t population = 1,
              std::optional<double> known = std::nullopt);
};

/// Throws ValidationError when any Dataset invariant is broken, including
/// the presence of duplicate feature rows.
void validate(const Dataset& data);

/// Same as validate() without the O(N log N) duplicate scan.
void validate_values(const Dataset& data);

/// Column roles for CSV input.
struct CsvSchema {
  TaskMode mode = TaskMode::classification;
  /// Column holding training labels; empty cells (or "?") mark unlabeled rows.
  std::optional<std::string> label_column;
  /// Column holding held-out ground truth, used only for evaluation.
  std::optional<std::string> truth_column;
  /// Optional population column for pre-merged data.
  std::optional<std::string> pop_column;
  /// Feature columns; empty means every column not named above.
  std::vector<std::string> feature_columns;
  /// Known class names. Empty means infer the sorted set of names seen.
  std::vector<std::string> classes;
};

struct CsvTable {
  Dataset data;
  /// Ground truth per row, encoded like Dataset::label. Empty if no
  /// truth column was configured.
  std::vector<std::optional<double>> truth;
};

CsvTable read_csv(std::istream& in, const CsvSchema& schema);
CsvTable load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Writes features, a `pop` column and a `label` column in a form that
/// load_csv reads back with {label_column="label", pop_column="pop"}.
void write_csv(std::ostream& out, const Dataset& data);

struct MergeResult {
  Dataset data;
  /// row_map[r] is the merged row holding raw row r.
  std::vector<std::size_t> row_map;
  std::vector<std::string> warnings;
};

/// Collapses rows with identical feature vectors into fat nodes.
///
/// Populations add up. Conflicting classification labels resolve to the
/// population-weighted majority (ties to the lowest class id); conflicting
/// regression targets resolve to their population-weighted mean. Both emit
/// a warning. Output rows keep the order of first occurrence.
MergeResult merge_duplicates(const Dataset& raw);

/// Lag-embeds a series: row t holds series[t, t+lag) and is labeled with
/// series[t+lag]. Produces series.size() - lag rows in regression mode.
Dataset fold_time_series(std::span<const double> series, std::size_t lag);

}  // namespace lapoleaf
