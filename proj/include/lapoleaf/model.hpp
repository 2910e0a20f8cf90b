#pragma once

#include <cstddef>
#include <vector>

#include "lapoleaf/dataset.hpp"
#include "lapoleaf/distance.hpp"
#include "lapoleaf/leading_tree.hpp"
#include "lapoleaf/lodog.hpp"
#include "lapoleaf/propagation.hpp"

namespace lapoleaf {

struct FitParams {
  /// Percentile of pairwise distances used as the cut-off distance.
  double percent = 2.0;
  LodogParams lodog;
  Metric metric = Metric::euclidean;

  void validate() const;

  friend bool operator==(const FitParams&, const FitParams&) = default;
};

/// Wall time of the four pipeline stages, in seconds.
struct StageTimings {
  double preprocessing = 0.0;  ///< filled by callers that load and merge data
  double distance = 0.0;
  double oleaf = 0.0;        ///< density, leading tree, objective and split
  double propagation = 0.0;
};

/// A fitted model. All members describe the same N points; d_c stays at
/// the value chosen by the initial fit for the lifetime of the model.
struct Model {
  Dataset data;
  DistanceMatrix dm;
  FitParams params;
  double d_c = 0.0;
  LeadingTree tree;
  LodogCurve curve;
  LeadingForest forest;
  LabelState state;
  /// density_order(tree.rho), kept for incremental updates.
  std::vector<std::size_t> order;

  std::size_t size() const noexcept { return data.size(); }
};

/// Full pipeline on deduplicated data; d_c comes from params.percent.
Model fit(Dataset data, const FitParams& params, StageTimings* timings = nullptr);

/// Full pipeline with a given cut-off distance.
Model fit_with_cutoff(Dataset data, const FitParams& params, double d_c,
                      StageTimings* timings = nullptr);

/// Re-derives objective, forest and labels from the model's tree.
void refresh_forest(Model& model, StageTimings* timings = nullptr);

Predictions predictions(const Model& model);

}  // namespace lapoleaf
