#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lapoleaf/dataset.hpp"
#include "lapoleaf/distance.hpp"

namespace lapoleaf::baseline {

struct IterativeParams {
  std::size_t k = 10;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100000;
};

struct IterativeResult {
  std::vector<double> value;  ///< class id or regression value per point
  std::size_t iterations = 0;
  bool converged = false;
};

/// Plain iterative label propagation on a symmetrized k-NN graph with
/// Gaussian weights exp(-(d/d_c)^2): F <- D^-1 W F with known labels
/// clamped after every sweep, until the largest change drops below the
/// tolerance. Used only as a point of comparison.
IterativeResult knn_label_propagation(const Dataset& data, const DistanceMatrix& dm, double d_c,
                                      const IterativeParams& params = {});

/// Mean target of the k nearest training rows.
double knn_regress(const Matrix& train, std::span<const double> targets,
                   std::span<const double> query, std::size_t k);

}  // namespace lapoleaf::baseline
