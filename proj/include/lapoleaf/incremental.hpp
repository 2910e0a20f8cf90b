#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lapoleaf/model.hpp"

namespace lapoleaf {

struct InsertResult {
  std::size_t row = 0;      ///< model row now holding the point
  bool merged = false;      ///< true if it matched an existing point
  std::uint64_t distance_evaluations = 0;
  /// Existing points whose leading node had to be searched again.
  std::size_t rescanned = 0;
};

/// Adds an unlabeled point to a fitted model with d_c held fixed, then
/// brings the forest and the label state up to date.
///
/// Costs exactly N distance evaluations. Densities are updated additively
/// and only points whose denser set changed in a way that can move their
/// leading node are rescanned. The result matches fit_with_cutoff() on the
/// extended dataset. A point identical to an existing one increments that
/// row's population instead of adding a row.
///
/// Not thread-safe: the model must not be read while this runs.
InsertResult insert_point(Model& model, std::span<const double> x);

struct NewLabel {
  std::size_t row = 0;
  double value = 0.0;  ///< class id or regression value
  std::vector<double> scores;
  bool merged = false;
};

/// insert_point() followed by reading the new point's finalized label.
NewLabel predict_new(Model& model, std::span<const double> x);

}  // namespace lapoleaf
